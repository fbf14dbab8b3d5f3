#pragma once

// Exact linear algebra over F2. Every elimination scans columns left to right and
// takes the lowest-index available row as pivot, so all outputs are canonical.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/error.hpp"

namespace sshdx {

struct EchelonForm {
    BitMatrix matrix;                 // reduced row echelon form, zero rows dropped
    std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Reduced row echelon form of the row space of `m`.
inline EchelonForm rref(const BitMatrix& m) {
    std::vector<BitVec> rows = m.row_data();
    std::vector<std::size_t> pivots;
    std::size_t next = 0;
    for (std::size_t c = 0; c < m.cols() && next < rows.size(); ++c) {
        std::size_t p = next;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[next], rows[p]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != next && rows[r].get(c)) rows[r] ^= rows[next];
        }
        pivots.push_back(c);
        ++next;
    }
    rows.resize(next);
    return {BitMatrix::from_rows(m.cols(), std::move(rows)), std::move(pivots)};
}

inline std::size_t rank(const BitMatrix& m) { return rref(m).pivots.size(); }

/// A subspace of F2^n held as a reduced-echelon basis.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient_dim) : basis_(0, ambient_dim) {}

    /// Span of the rows of `spanning`.
    static Subspace span(const BitMatrix& spanning) {
        auto e = rref(spanning);
        Subspace s;
        s.basis_ = std::move(e.matrix);
        s.pivots_ = std::move(e.pivots);
        return s;
    }

    static Subspace full(std::size_t n) { return span(BitMatrix::identity(n)); }

    std::size_t ambient_dim() const noexcept { return basis_.cols(); }
    std::size_t dim() const noexcept { return basis_.rows(); }
    const BitMatrix& basis() const noexcept { return basis_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    /// v reduced against the basis; zero iff v lies in the subspace.
    BitVec reduce(BitVec v) const {
        check_length(v);
        for (std::size_t r = 0; r < basis_.rows(); ++r) {
            if (v.get(pivots_[r])) v ^= basis_.row(r);
        }
        return v;
    }

    bool contains(const BitVec& v) const { return reduce(v).is_zero(); }

    /// Every element, in Gray-code order starting from zero.
    std::vector<BitVec> elements(std::uint64_t budget = kDefaultBudget) const {
        require_budget(pow2_saturated(dim()), budget, "subspace enumeration");
        std::vector<BitVec> out;
        out.reserve(static_cast<std::size_t>(pow2_saturated(dim())));
        BitVec cur(ambient_dim());
        out.push_back(cur);
        const std::uint64_t total = pow2_saturated(dim());
        for (std::uint64_t i = 1; i < total; ++i) {
            cur ^= basis_.row(static_cast<std::size_t>(std::countr_zero(i)));
            out.push_back(cur);
        }
        return out;
    }

    bool operator==(const Subspace& o) const noexcept { return basis_ == o.basis_; }

    void check_length(const BitVec& v) const {
        if (v.size() != ambient_dim()) {
            throw ShapeError("vector of length " + std::to_string(v.size()) + " tested against subspace of F2^" +
                             std::to_string(ambient_dim()));
        }
    }

private:
    BitMatrix basis_;
    std::vector<std::size_t> pivots_;
};

/// Null space {x : M x = 0}.
inline Subspace kernel_basis(const BitMatrix& m) {
    const auto e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    BitMatrix spanning(0, m.cols());
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVec v(m.cols());
        v.set(f);
        for (std::size_t r = 0; r < e.pivots.size(); ++r) {
            if (e.matrix.get(r, f)) v.set(e.pivots[r]);
        }
        spanning.append_row(std::move(v));
    }
    return Subspace::span(spanning);
}

/// Column space of M.
inline Subspace image_basis(const BitMatrix& m) { return Subspace::span(m.transpose()); }

/// Some x with M x = y: free variables are zero and pivot variables come from
/// back-substitution in reduced echelon form.
inline std::optional<BitVec> solve(const BitMatrix& m, const BitVec& y) {
    if (y.size() != m.rows()) {
        throw ShapeError("right-hand side has length " + std::to_string(y.size()) + ", matrix has " +
                         std::to_string(m.rows()) + " rows");
    }
    const std::size_t n = m.cols();
    // Augmented rows [M | y]; the rhs sits at column n.
    BitMatrix aug(0, n + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BitVec row(n + 1);
        for (auto c : m.row(r).support()) row.set(c);
        if (y.get(r)) row.set(n);
        aug.append_row(std::move(row));
    }
    const auto e = rref(aug);
    BitVec x(n);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        if (e.pivots[r] == n) return std::nullopt;
        if (e.matrix.get(r, n)) x.set(e.pivots[r]);
    }
    return x;
}

inline bool membership(const Subspace& s, const BitVec& v) { return s.contains(v); }

/// min over s in S of |v + s|, by exact enumeration of S.
inline std::size_t coset_min_weight(const BitVec& v, const Subspace& s, std::uint64_t budget = kDefaultBudget) {
    s.check_length(v);
    require_budget(pow2_saturated(s.dim()), budget, "coset enumeration");
    BitVec cur = v;
    std::size_t best = cur.weight();
    const std::uint64_t total = pow2_saturated(s.dim());
    for (std::uint64_t i = 1; i < total && best > 0; ++i) {
        cur ^= s.basis().row(static_cast<std::size_t>(std::countr_zero(i)));
        best = std::min(best, cur.weight());
    }
    return best;
}

/// Materialised subspace for repeated coset-distance queries against one space.
class CosetOracle {
public:
    CosetOracle(const Subspace& s, std::uint64_t budget) : elements_(s.elements(budget)), dim_(s.ambient_dim()) {}

    std::size_t distance(const BitVec& v) const {
        if (v.size() != dim_) throw ShapeError("coset query length mismatch");
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (const auto& e : elements_) {
            best = std::min(best, xor_weight(v, e));
            if (best == 0) break;
        }
        return best;
    }

    std::size_t size() const noexcept { return elements_.size(); }

private:
    std::vector<BitVec> elements_;
    std::size_t dim_;
};

/// Dimension of ker M.
inline std::size_t nullity(const BitMatrix& m) { return m.cols() - rank(m); }

}  // namespace sshdx
