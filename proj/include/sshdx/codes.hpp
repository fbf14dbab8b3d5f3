#pragma once

// Classical binary linear codes, tensor / dual tensor codes, robustness checks and
// the bounded random search for base code pairs.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/error.hpp"
#include "sshdx/linalg.hpp"
#include "sshdx/util.hpp"

namespace sshdx {

/// Minimum distance; `infinite()` for the zero code, which has no nonzero word.
class Distance {
public:
    Distance() = default;
    explicit Distance(std::size_t d) : value_(d) {}
    static Distance infinity() { return Distance(); }

    bool infinite() const noexcept { return !value_.has_value(); }
    std::size_t value() const {
        if (!value_) throw DomainError("distance of the zero code is infinite");
        return *value_;
    }

    /// d >= q * n (infinity satisfies every bound).
    bool at_least(const Rational& q, std::size_t n) const {
        if (!value_) return true;
        return static_cast<std::int64_t>(*value_) * q.denominator() >= q.numerator() * static_cast<std::int64_t>(n);
    }

    /// count * d <= bound; an infinite distance admits only count == 0.
    bool times_at_most(std::size_t count, std::size_t bound) const {
        if (!value_) return count == 0;
        return count * *value_ <= bound;
    }

    friend Distance operator*(const Distance& a, const Distance& b) {
        if (a.infinite() || b.infinite()) return infinity();
        return Distance(a.value() * b.value());
    }
    friend Distance min(const Distance& a, const Distance& b) {
        if (a.infinite()) return b;
        if (b.infinite()) return a;
        return Distance(std::min(a.value(), b.value()));
    }

    std::string to_string() const { return value_ ? std::to_string(*value_) : std::string("inf"); }

    bool operator==(const Distance&) const = default;

private:
    std::optional<std::size_t> value_;
};

/// A subspace of F2^n carried by a full-rank generator (k x n) and parity matrix ((n-k) x n).
class LinearCode {
public:
    LinearCode() = default;

    std::size_t length() const noexcept { return generator_.cols(); }
    std::size_t dim() const noexcept { return generator_.rows(); }
    const BitMatrix& generator() const noexcept { return generator_; }
    const BitMatrix& parity() const noexcept { return parity_; }

    bool contains(const BitVec& v) const { return parity_.apply(v).is_zero(); }
    Subspace as_subspace() const { return Subspace::span(generator_); }

    static LinearCode from_generator(const BitMatrix& g) {
        if (rank(g) != g.rows()) {
            throw DegenerateError("generator matrix with " + std::to_string(g.rows()) + " rows has rank " +
                                  std::to_string(rank(g)));
        }
        LinearCode c;
        c.generator_ = g;
        c.parity_ = kernel_basis(g).basis();
        return c;
    }

    /// Kernel of `h`; `h` may be rank deficient.
    static LinearCode from_parity(const BitMatrix& h) {
        LinearCode c;
        c.generator_ = kernel_basis(h).basis();
        c.parity_ = Subspace::span(h).basis();
        return c;
    }

    /// Span of arbitrary rows (dependent rows allowed).
    static LinearCode from_spanning(const BitMatrix& rows) { return from_generator(Subspace::span(rows).basis()); }

    static LinearCode zero(std::size_t n) { return from_generator(BitMatrix(0, n)); }
    static LinearCode full(std::size_t n) { return from_generator(BitMatrix::identity(n)); }
    static LinearCode repetition(std::size_t n) {
        BitMatrix g(1, n);
        for (std::size_t i = 0; i < n; ++i) g.set(0, i);
        return from_generator(g);
    }

private:
    BitMatrix generator_;
    BitMatrix parity_;
};

inline LinearCode code_from_generator(const BitMatrix& g) { return LinearCode::from_generator(g); }

inline bool same_code(const LinearCode& a, const LinearCode& b) {
    return a.length() == b.length() && a.as_subspace() == b.as_subspace();
}

/// Minimum weight over nonzero codewords, by enumerating all 2^k words.
inline Distance distance(const LinearCode& c, std::uint64_t budget = kDefaultBudget) {
    if (c.dim() == 0) return Distance::infinity();
    require_budget(pow2_saturated(c.dim()), budget, "code distance");
    BitVec cur(c.length());
    std::size_t best = c.length() + 1;
    const std::uint64_t total = pow2_saturated(c.dim());
    for (std::uint64_t i = 1; i < total; ++i) {
        cur ^= c.generator().row(static_cast<std::size_t>(std::countr_zero(i)));
        best = std::min(best, cur.weight());
    }
    return Distance(best);
}

/// The orthogonal complement: generator and parity swap roles.
inline LinearCode dual(const LinearCode& c) { return LinearCode::from_generator(c.parity()); }

/// u (x) v flattened row-major: entry (a, b) at a * |v| + b.
inline BitVec kron(const BitVec& u, const BitVec& v) {
    BitVec out(u.size() * v.size());
    for (auto a : u.support()) {
        for (auto b : v.support()) out.set(a * v.size() + b);
    }
    return out;
}

/// Rows kron(x_i, y_j) for every pair of rows, i-major.
inline BitMatrix kron_rows(const BitMatrix& x, const BitMatrix& y) {
    BitMatrix out(0, x.cols() * y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < y.rows(); ++j) out.append_row(kron(x.row(i), y.row(j)));
    }
    return out;
}

/// C_A (x) C_B: |A| x |B| matrices with columns in C_A and rows in C_B.
inline LinearCode tensor_code(const LinearCode& ca, const LinearCode& cb) {
    return LinearCode::from_generator(kron_rows(ca.generator(), cb.generator()));
}

/// C_A (x) F2^B + F2^A (x) C_B over an index grid A x B of equal sides.
class DualTensorCode {
public:
    DualTensorCode(LinearCode ca, LinearCode cb, std::uint64_t budget = kDefaultBudget)
        : code_a_(std::move(ca)), code_b_(std::move(cb)) {
        if (code_a_.length() != code_b_.length()) {
            throw ShapeError("dual tensor code needs equal lengths, got " + std::to_string(code_a_.length()) +
                             " and " + std::to_string(code_b_.length()));
        }
        const std::size_t n = code_a_.length();
        const auto id = BitMatrix::identity(n);
        BitMatrix spanning = kron_rows(code_a_.generator(), id);
        const auto right = kron_rows(id, code_b_.generator());
        for (const auto& r : right.row_data()) spanning.append_row(r);
        code_ = LinearCode::from_spanning(spanning);
        parity_ = kron_rows(code_a_.parity(), code_b_.parity());
        d_a_ = distance(code_a_, budget);
        d_b_ = distance(code_b_, budget);
    }

    const LinearCode& code_a() const noexcept { return code_a_; }
    const LinearCode& code_b() const noexcept { return code_b_; }
    /// The sum code itself (generator is a reduced basis of the sum).
    const LinearCode& code() const noexcept { return code_; }
    /// kron(H_A, H_B): membership test derived from the two parity matrices.
    const BitMatrix& derived_parity() const noexcept { return parity_; }

    std::size_t side() const noexcept { return code_a_.length(); }
    std::size_t dim() const noexcept { return code_.dim(); }
    const Distance& distance_a() const noexcept { return d_a_; }
    const Distance& distance_b() const noexcept { return d_b_; }

    bool contains(const BitVec& word) const { return parity_.apply(word).is_zero(); }

private:
    LinearCode code_a_;
    LinearCode code_b_;
    LinearCode code_;
    BitMatrix parity_;
    Distance d_a_;
    Distance d_b_;
};

inline DualTensorCode dual_tensor_code(const LinearCode& ca, const LinearCode& cb,
                                       std::uint64_t budget = kDefaultBudget) {
    return DualTensorCode(ca, cb, budget);
}

struct RobustnessWitness {
    BitVec codeword;                        // word on the (punctured) grid, row-major
    std::vector<std::size_t> removed_rows;  // punctured coordinates of A
    std::vector<std::size_t> removed_cols;  // punctured coordinates of B
};

struct RobustnessReport {
    std::size_t w = 0;
    std::size_t p = 0;
    bool holds = true;
    std::optional<RobustnessWitness> witness;
};

namespace detail {

inline std::uint64_t row_mask_of(std::uint64_t word, std::size_t side, std::size_t a) {
    return (word >> (a * side)) & ((std::uint64_t{1} << side) - 1);
}

/// Support of `word` covered by some rows A' and columns B' with |A'| d_B <= |c| and
/// |B'| d_A <= |c|. Enumerates A' over subsets of the nonzero rows; B' is then forced.
inline bool has_cover(std::uint64_t word, std::size_t side, const Distance& d_a, const Distance& d_b) {
    const auto weight = static_cast<std::size_t>(std::popcount(word));
    std::vector<std::uint64_t> rows(side);
    std::uint64_t nonzero_rows = 0;
    for (std::size_t a = 0; a < side; ++a) {
        rows[a] = row_mask_of(word, side, a);
        if (rows[a] != 0) nonzero_rows |= std::uint64_t{1} << a;
    }
    // Iterate over all subsets of nonzero_rows.
    std::uint64_t sub = 0;
    while (true) {
        const auto a_count = static_cast<std::size_t>(std::popcount(sub));
        if (d_b.times_at_most(a_count, weight)) {
            std::uint64_t cols = 0;
            for (std::size_t a = 0; a < side; ++a) {
                if (!((sub >> a) & 1u)) cols |= rows[a];
            }
            if (d_a.times_at_most(static_cast<std::size_t>(std::popcount(cols)), weight)) return true;
        }
        if (sub == nonzero_rows) break;
        sub = (sub - nonzero_rows) & nonzero_rows;
    }
    return false;
}

inline std::vector<std::uint64_t> basis_masks(const BitMatrix& g) {
    if (g.cols() > 64) throw ParameterError("robustness checks need words of at most 64 coordinates");
    std::vector<std::uint64_t> out;
    for (const auto& r : g.row_data()) out.push_back(r.to_mask());
    return out;
}

inline std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> out;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < keep.size() && keep[j] == i) {
            ++j;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace detail

/// Every codeword c with 0 < |c| < w is zero outside A' x B ∪ A x B' for some
/// |A'| <= |c|/d_B and |B'| <= |c|/d_A.
inline RobustnessReport is_w_robust(const DualTensorCode& dt, std::size_t w, std::uint64_t budget = kDefaultBudget) {
    RobustnessReport report;
    report.w = w;
    if (w <= 1) return report;
    const std::size_t side = dt.side();
    if (side > 8) throw ParameterError("robustness checks support side length at most 8");
    const std::uint64_t total = pow2_saturated(dt.dim());
    const std::uint64_t light = count_subsets_up_to(side * side, 1, w - 1);
    auto fails = [&](std::uint64_t word) {
        if (detail::has_cover(word, side, dt.distance_a(), dt.distance_b())) return false;
        report.holds = false;
        report.witness = RobustnessWitness{BitVec::from_mask(side * side, word), {}, {}};
        return true;
    };
    if (light < total) {
        // few light supports: test each one for membership
        require_budget(light, budget, "robustness enumeration");
        const auto checks = detail::basis_masks(dt.derived_parity());
        for (std::size_t k = 1; k < w && k <= side * side; ++k) {
            const bool done = !for_each_combination(side * side, k, [&](const std::vector<std::size_t>& s) {
                std::uint64_t word = 0;
                for (auto i : s) word |= std::uint64_t{1} << i;
                for (auto h : checks) {
                    if (std::popcount(h & word) & 1) return true;
                }
                return !fails(word);
            });
            if (done) return report;
        }
        return report;
    }
    require_budget(total, budget, "robustness enumeration");
    const auto basis = detail::basis_masks(dt.code().generator());
    std::uint64_t cur = 0;
    for (std::uint64_t i = 1; i < total; ++i) {
        cur ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
        if (static_cast<std::size_t>(std::popcount(cur)) >= w) continue;
        if (fails(cur)) return report;
    }
    return report;
}

/// Restriction of C to the coordinates in `keep` (sorted).
inline LinearCode puncture(const LinearCode& c, const std::vector<std::size_t>& keep) {
    BitMatrix rows(0, keep.size());
    for (const auto& g : c.generator().row_data()) {
        BitVec r(keep.size());
        for (std::size_t j = 0; j < keep.size(); ++j) {
            if (g.get(keep[j])) r.set(j);
        }
        rows.append_row(std::move(r));
    }
    return LinearCode::from_spanning(rows);
}

/// For every w' <= p and every A', B' of size side - w', the punctured dual tensor
/// code C_{A'} (x) F2^{B'} + F2^{A'} (x) C_{B'} is w-robust.
inline RobustnessReport is_puncture_resistant(const DualTensorCode& dt, std::size_t w, std::size_t p,
                                              std::uint64_t budget = kDefaultBudget) {
    RobustnessReport report;
    report.w = w;
    report.p = p;
    const std::size_t side = dt.side();
    for (std::size_t removed = 0; removed <= std::min(p, side); ++removed) {
        const std::size_t keep = side - removed;
        std::vector<std::vector<std::size_t>> subsets;
        for_each_combination(side, keep, [&](const std::vector<std::size_t>& s) {
            subsets.push_back(s);
            return true;
        });
        require_budget(static_cast<std::uint64_t>(subsets.size()) * subsets.size(), budget, "puncture pairs");
        for (const auto& rows_kept : subsets) {
            const auto pa = puncture(dt.code_a(), rows_kept);
            for (const auto& cols_kept : subsets) {
                const DualTensorCode punctured(pa, puncture(dt.code_b(), cols_kept), budget);
                auto r = is_w_robust(punctured, w, budget);
                if (!r.holds) {
                    report.holds = false;
                    report.witness = std::move(r.witness);
                    report.witness->removed_rows = detail::complement(side, rows_kept);
                    report.witness->removed_cols = detail::complement(side, cols_kept);
                    return report;
                }
            }
        }
    }
    return report;
}

/// Whether some generator matrix of C has at least two ones in every row and column.
/// Backtracking over sets of independent codewords of weight >= 2.
inline bool admits_two_ones_generator(const LinearCode& c, std::uint64_t budget = kDefaultBudget) {
    const std::size_t n = c.length();
    const std::size_t k = c.dim();
    if (n > 64) throw ParameterError("generator shape search supports length at most 64");
    if (n == 0) return true;
    if (k == 0) return false;
    require_budget(pow2_saturated(k), budget, "generator shape search");

    std::vector<std::uint64_t> candidates;
    {
        const auto basis = detail::basis_masks(c.generator());
        std::uint64_t cur = 0;
        for (std::uint64_t i = 1; i < pow2_saturated(k); ++i) {
            cur ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
            if (std::popcount(cur) >= 2) candidates.push_back(cur);
        }
        std::sort(candidates.begin(), candidates.end());
    }
    // Columns no candidate can cover twice make the answer immediate.
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t hits = 0;
        for (auto m : candidates) hits += (m >> j) & 1u;
        if (hits < 2) return false;
    }

    std::uint64_t nodes = 0;
    std::vector<std::size_t> cover(n, 0);
    std::vector<std::uint64_t> echelon;  // xor basis keyed by highest bit

    auto independent_insert = [&](std::uint64_t v) -> bool {
        for (auto b : echelon) {
            if ((v ^ b) < v) v ^= b;
        }
        if (v == 0) return false;
        echelon.push_back(v);
        std::sort(echelon.rbegin(), echelon.rend());
        return true;
    };

    std::function<bool(std::size_t, std::size_t)> extend = [&](std::size_t start, std::size_t chosen) -> bool {
        if (++nodes > budget) throw ResourceError("generator shape search exceeded budget");
        const std::size_t remaining = k - chosen;
        for (std::size_t j = 0; j < n; ++j) {
            if (cover[j] + remaining < 2) return false;
        }
        if (remaining == 0) return true;
        for (std::size_t i = start; i + remaining <= candidates.size(); ++i) {
            const auto saved = echelon;
            if (!independent_insert(candidates[i])) continue;
            for (std::size_t j = 0; j < n; ++j) cover[j] += (candidates[i] >> j) & 1u;
            const bool ok = extend(i + 1, chosen + 1);
            for (std::size_t j = 0; j < n; ++j) cover[j] -= (candidates[i] >> j) & 1u;
            echelon = saved;
            if (ok) return true;
        }
        return false;
    };
    return extend(0, 0);
}

struct BaseCodeSearchParams {
    std::size_t delta_len = 0;  // Δ, the common code length
    Rational r{1, 4};
    Rational delta{1, 4};
    std::size_t w = 2;
    std::size_t p = 0;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultBudget;
};

/// Verdicts of the four base-code conditions on a candidate pair.
struct BaseCodeChecks {
    bool dimensions = false;
    bool distances = false;
    bool robust_c0 = false;  // (C_A (x) C_B)^⊥ = C_A^⊥ (x) F + F (x) C_B^⊥
    bool robust_c1 = false;  // (C_A^⊥ (x) C_B^⊥)^⊥ = C_A (x) F + F (x) C_B
    bool generator_shape = false;

    bool all() const noexcept { return dimensions && distances && robust_c0 && robust_c1 && generator_shape; }
};

inline BaseCodeChecks check_base_codes(const LinearCode& ca, const LinearCode& cb, const BaseCodeSearchParams& prm) {
    BaseCodeChecks out;
    const std::size_t n = prm.delta_len;
    const std::size_t ka = floor_fraction(prm.r, n);
    out.dimensions = ca.length() == n && cb.length() == n && ca.dim() == ka && cb.dim() == n - ka;
    if (!out.dimensions) return out;
    const auto ca_dual = dual(ca);
    const auto cb_dual = dual(cb);
    out.distances = true;
    for (const auto* c : {&ca, &cb, &ca_dual, &cb_dual}) {
        if (!distance(*c, prm.budget).at_least(prm.delta, n)) out.distances = false;
    }
    if (!out.distances) return out;
    out.robust_c0 = is_puncture_resistant(DualTensorCode(ca_dual, cb_dual, prm.budget), prm.w, prm.p, prm.budget).holds;
    if (!out.robust_c0) return out;
    out.robust_c1 = is_puncture_resistant(DualTensorCode(ca, cb, prm.budget), prm.w, prm.p, prm.budget).holds;
    if (!out.robust_c1) return out;
    out.generator_shape = true;
    for (const auto* c : {&ca, &cb, &ca_dual, &cb_dual}) {
        if (!admits_two_ones_generator(*c, prm.budget)) out.generator_shape = false;
    }
    return out;
}

struct BaseCodePair {
    LinearCode code_a;
    LinearCode code_b;
    std::size_t trial = 0;
};

namespace detail {

inline BitMatrix random_full_rank(Rng& rng, std::size_t rows, std::size_t cols) {
    while (true) {
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (rng.bit()) m.set(r, c);
            }
        }
        if (rank(m) == rows) return m;
    }
}

}  // namespace detail

/// Samples C_A and C_B^⊥ from uniformly random full-rank floor(rΔ) x Δ generator
/// matrices, trial by trial, and returns the first pair passing every condition.
inline std::optional<BaseCodePair> search_base_codes(const BaseCodeSearchParams& prm) {
    if (prm.r <= Rational(0) || prm.r >= Rational(1, 2)) {
        throw ParameterError("rate must satisfy 0 < r < 1/2, got " + to_string(prm.r));
    }
    const std::size_t ka = floor_fraction(prm.r, prm.delta_len);
    if (ka == 0) {
        throw ParameterError("floor(r * Δ) = 0 for r = " + to_string(prm.r) + ", Δ = " + std::to_string(prm.delta_len));
    }
    for (std::size_t t = 0; t < prm.trials; ++t) {
        Rng rng(prm.seed, t);
        const auto ca = LinearCode::from_generator(detail::random_full_rank(rng, ka, prm.delta_len));
        const auto cb_dual = LinearCode::from_generator(detail::random_full_rank(rng, ka, prm.delta_len));
        const auto cb = dual(cb_dual);
        if (check_base_codes(ca, cb, prm).all()) return BaseCodePair{ca, cb, t};
    }
    return std::nullopt;
}

/// "f2code <n> <k>" followed by the generator in f2mat format.
inline void write_code(std::ostream& os, const LinearCode& c) {
    os << "f2code " << c.length() << ' ' << c.dim() << '\n';
    write_f2mat(os, c.generator());
}

inline std::string to_code_text(const LinearCode& c) {
    std::ostringstream os;
    write_code(os, c);
    return os.str();
}

inline LinearCode read_code(LineReader& in) {
    const auto tok = split_ws(in.next("f2code header"));
    if (tok.size() != 3 || tok[0] != "f2code") throw ParseError(in.line(), "expected 'f2code <n> <k>'");
    const auto n = parse_count(tok[1], in.line());
    const auto k = parse_count(tok[2], in.line());
    const auto g = read_f2mat(in);
    if (g.rows() != k || g.cols() != n) throw ParseError(in.line(), "generator shape does not match f2code header");
    try {
        return LinearCode::from_generator(g);
    } catch (const DegenerateError& e) {
        throw ParseError(in.line(), e.what());
    }
}

inline LinearCode parse_code(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    return read_code(in);
}

}  // namespace sshdx
