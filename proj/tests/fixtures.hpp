#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sshdx/sshdx.hpp"

namespace fx {

using namespace sshdx;

inline oracle::Mat to_mat(const BitMatrix& m) {
    oracle::Mat out{m.rows(), m.cols(), {}};
    for (std::size_t r = 0; r < m.rows(); ++r) out.data.push_back(m.row(r).to_mask());
    return out;
}

inline BitMatrix from_mat(const oracle::Mat& m) {
    BitMatrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (m.get(r, c)) out.set(r, c);
        }
    }
    return out;
}

inline oracle::Words words_of(const LinearCode& c) {
    oracle::Words gens;
    for (std::size_t r = 0; r < c.generator().rows(); ++r) gens.push_back(c.generator().row(r).to_mask());
    return oracle::span(gens);
}

inline LinearCode even_weight(std::size_t n) { return dual(LinearCode::repetition(n)); }

/// Random m x n matrix with independent fair bits.
inline BitMatrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
    BitMatrix out(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (rng.bit()) out.set(r, c);
        }
    }
    return out;
}

/// ∂₂ random, ∂₁ rows drawn from the left kernel of ∂₂ by enumeration. Degenerate
/// rows and columns are allowed.
inline ChainComplex random_complex(Rng& rng, std::size_t x0, std::size_t x1, std::size_t x2) {
    const auto d2 = random_matrix(rng, x1, x2);
    const auto left_kernel = oracle::dual(to_mat(d2).columns(), x1);
    BitMatrix d1(x0, x1);
    for (std::size_t r = 0; r < x0; ++r) {
        const auto w = left_kernel[rng.below(left_kernel.size())];
        for (std::size_t c = 0; c < x1; ++c) {
            if ((w >> c) & 1u) d1.set(r, c);
        }
    }
    return ChainComplex(d1, d2, true);
}

/// Random complex whose co-boundary cohomology is nontrivial and whose ∂₁ has no
/// zero column, as needed to encode an XOR instance.
inline ChainComplex random_encodable_complex(Rng& rng, std::size_t max_x0, std::size_t max_x1) {
    while (true) {
        const std::size_t x0 = 1 + rng.below(max_x0);
        const std::size_t x1 = 2 + rng.below(max_x1 - 1);
        const std::size_t x2 = 1 + rng.below(3);
        auto x = random_complex(rng, x0, x1, x2);
        const auto w = x.d1().column_weights();
        if (std::find(w.begin(), w.end(), 0) != w.end()) continue;
        // dim Z¹ - dim B¹ by enumeration
        const auto z = oracle::kernel(to_mat(x.delta1()));
        const auto b = oracle::span(to_mat(x.d1()).data);
        if (z.size() > b.size()) return x;
    }
}

struct ComplexFixture {
    std::string name;
    GroupTable group;
    std::vector<std::size_t> a, b;
    LinearCode ca, cb;
};

inline ComplexFixture z6_golden() {
    return {"Z6", cyclic_group(6), {1, 5}, {2, 4}, LinearCode::repetition(2), LinearCode::repetition(2)};
}

inline ComplexFixture z10_delta2() {
    return {"Z10-d2", cyclic_group(10), {1, 9}, {3, 7}, LinearCode::repetition(2), LinearCode::repetition(2)};
}

inline ComplexFixture z10_delta4() {
    return {"Z10-d4", cyclic_group(10), {1, 9, 2, 8}, {3, 7, 4, 6}, LinearCode::repetition(4), even_weight(4)};
}

inline ComplexFixture z9_delta4() {
    return {"Z9-d4", cyclic_group(9), {1, 8, 2, 7}, {3, 6, 4, 5}, LinearCode::repetition(4), even_weight(4)};
}

/// Two order-3 elements with inverses on the left, two order-5 elements with
/// inverses on the right; elements of different orders are never conjugate.
inline ComplexFixture a5_delta4() {
    auto g = psl2(5);
    auto pick = [&](std::size_t order) {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < g.order() && out.size() < 4; ++x) {
            if (g.element_order(x) != order) continue;
            if (std::find(out.begin(), out.end(), x) != out.end()) continue;
            out.push_back(x);
            out.push_back(g.inv(x));
        }
        return out;
    };
    auto a = pick(3);
    auto b = pick(5);
    return {"A5-d4", std::move(g), a, b, LinearCode::repetition(4), even_weight(4)};
}

inline LeftRightCayleyComplex build(const ComplexFixture& f) { return build_lr_complex(f.group, f.a, f.b); }

inline ChainComplex build_chain(const ComplexFixture& f) { return build_lz_complex(build(f), f.ca, f.cb); }

inline XorInstance random_instance(Rng& rng, std::size_t vars, std::size_t constraints, std::size_t max_arity) {
    std::vector<XorConstraint> cs;
    for (std::size_t i = 0; i < constraints; ++i) {
        const std::size_t k = 1 + rng.below(std::min(max_arity, vars));
        auto idx = rng.sample(vars, k);
        std::sort(idx.begin(), idx.end());
        cs.push_back({idx, rng.bit()});
    }
    return XorInstance(vars, cs);
}

/// x_i + x_j = 1 around a triangle: unsatisfiable, every pair consistent.
inline XorInstance triangle_odd() { return XorInstance(3, {{{0, 1}, true}, {{1, 2}, true}, {{0, 2}, true}}); }

inline std::vector<std::pair<oracle::Word, bool>> oracle_constraints(const XorInstance& inst) {
    std::vector<std::pair<oracle::Word, bool>> out;
    for (const auto& c : inst.constraints()) {
        oracle::Word m = 0;
        for (auto j : c.support) m |= oracle::Word{1} << j;
        out.emplace_back(m, c.rhs);
    }
    return out;
}

}  // namespace fx
