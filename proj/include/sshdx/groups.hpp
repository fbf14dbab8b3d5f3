#pragma once

// Finite groups as explicit multiplication tables.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/error.hpp"
#include "sshdx/util.hpp"

namespace sshdx {

class GroupTable {
public:
    GroupTable() = default;

    /// Validates closure, identity, inverses and associativity (exhaustive up to
    /// order 64, sampled triples above).
    GroupTable(std::size_t order, std::vector<std::size_t> table, std::string name = {})
        : order_(order), mul_(std::move(table)), name_(std::move(name)) {
        if (order_ == 0) throw ParameterError("group order must be at least 1");
        if (mul_.size() != order_ * order_) throw ShapeError("multiplication table has wrong size");
        for (auto v : mul_) {
            if (v >= order_) throw ParameterError("multiplication table entry out of range");
        }
        std::optional<std::size_t> id;
        for (std::size_t e = 0; e < order_ && !id; ++e) {
            bool ok = true;
            for (std::size_t x = 0; x < order_ && ok; ++x) ok = mul(e, x) == x && mul(x, e) == x;
            if (ok) id = e;
        }
        if (!id) throw ParameterError("multiplication table has no identity");
        id_ = *id;
        inv_.assign(order_, order_);
        for (std::size_t x = 0; x < order_; ++x) {
            for (std::size_t y = 0; y < order_; ++y) {
                if (mul(x, y) == id_) {
                    inv_[x] = y;
                    break;
                }
            }
            if (inv_[x] == order_ || mul(inv_[x], x) != id_) {
                throw ParameterError("element " + std::to_string(x) + " has no two-sided inverse");
            }
        }
        check_associative();
    }

    std::size_t order() const noexcept { return order_; }
    std::size_t id() const noexcept { return id_; }
    std::size_t mul(std::size_t x, std::size_t y) const noexcept { return mul_[x * order_ + y]; }
    std::size_t inv(std::size_t x) const noexcept { return inv_[x]; }
    const std::string& name() const noexcept { return name_; }

    std::size_t element_order(std::size_t x) const {
        std::size_t k = 1;
        for (std::size_t y = x; y != id_; y = mul(y, x)) ++k;
        return k;
    }

    bool is_symmetric(const std::vector<std::size_t>& s) const {
        return std::all_of(s.begin(), s.end(), [&](std::size_t x) {
            return std::find(s.begin(), s.end(), inv(x)) != s.end();
        });
    }

    void check_element(std::size_t x) const {
        if (x >= order_) {
            throw ParameterError("element " + std::to_string(x) + " out of range for group of order " +
                                 std::to_string(order_));
        }
    }

    bool operator==(const GroupTable& o) const { return order_ == o.order_ && mul_ == o.mul_; }

private:
    void check_associative() const {
        auto bad = [&](std::size_t x, std::size_t y, std::size_t z) { return mul(mul(x, y), z) != mul(x, mul(y, z)); };
        if (order_ <= 64) {
            for (std::size_t x = 0; x < order_; ++x)
                for (std::size_t y = 0; y < order_; ++y)
                    for (std::size_t z = 0; z < order_; ++z)
                        if (bad(x, y, z)) throw ParameterError("multiplication table is not associative");
            return;
        }
        Rng rng(order_, 0x61);
        for (int i = 0; i < 200000; ++i) {
            if (bad(rng.below(order_), rng.below(order_), rng.below(order_))) {
                throw ParameterError("multiplication table is not associative");
            }
        }
    }

    std::size_t order_ = 0;
    std::vector<std::size_t> mul_;
    std::vector<std::size_t> inv_;
    std::size_t id_ = 0;
    std::string name_;
};

inline GroupTable cyclic_group(std::size_t m) {
    if (m == 0) throw ParameterError("cyclic group order must be at least 1");
    std::vector<std::size_t> mul(m * m);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) mul[x * m + y] = (x + y) % m;
    return GroupTable(m, std::move(mul), "Z" + std::to_string(m));
}

/// GF(p^k) with elements encoded as base-p digit strings of polynomial coefficients.
class FiniteField {
public:
    explicit FiniteField(std::size_t q) : q_(q) {
        if (q < 2) throw ParameterError("field size must be a prime power, got " + std::to_string(q));
        p_ = 2;
        while (q % p_ != 0) ++p_;
        std::size_t r = q;
        k_ = 0;
        while (r % p_ == 0) {
            r /= p_;
            ++k_;
        }
        if (r != 1) throw ParameterError("field size must be a prime power, got " + std::to_string(q));
        modulus_ = find_irreducible();
        add_.resize(q * q);
        mul_.resize(q * q);
        for (std::size_t x = 0; x < q; ++x) {
            for (std::size_t y = 0; y < q; ++y) {
                add_[x * q + y] = encode(poly_add(decode(x), decode(y)));
                mul_[x * q + y] = encode(poly_mulmod(decode(x), decode(y)));
            }
        }
    }

    std::size_t size() const noexcept { return q_; }
    std::size_t characteristic() const noexcept { return p_; }
    std::size_t add(std::size_t x, std::size_t y) const noexcept { return add_[x * q_ + y]; }
    std::size_t mul(std::size_t x, std::size_t y) const noexcept { return mul_[x * q_ + y]; }
    std::size_t neg(std::size_t x) const {
        for (std::size_t y = 0; y < q_; ++y)
            if (add(x, y) == 0) return y;
        throw InternalError("field element without additive inverse");
    }
    std::size_t sub(std::size_t x, std::size_t y) const { return add(x, neg(y)); }

private:
    using Poly = std::vector<std::size_t>;  // coefficient i of x^i, length k

    Poly decode(std::size_t x) const {
        Poly out(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            out[i] = x % p_;
            x /= p_;
        }
        return out;
    }
    std::size_t encode(const Poly& f) const {
        std::size_t x = 0;
        for (std::size_t i = k_; i-- > 0;) x = x * p_ + f[i];
        return x;
    }
    Poly poly_add(const Poly& a, const Poly& b) const {
        Poly out(k_);
        for (std::size_t i = 0; i < k_; ++i) out[i] = (a[i] + b[i]) % p_;
        return out;
    }
    /// Product reduced by the monic modulus x^k + sum m_i x^i.
    Poly poly_mulmod(const Poly& a, const Poly& b) const {
        std::vector<std::size_t> full(2 * k_, 0);
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j) full[i + j] = (full[i + j] + a[i] * b[j]) % p_;
        for (std::size_t d = 2 * k_; d-- > k_;) {
            const std::size_t c = full[d];
            if (c == 0) continue;
            full[d] = 0;
            for (std::size_t i = 0; i < k_; ++i) {
                full[d - k_ + i] = (full[d - k_ + i] + (p_ - c) * modulus_[i]) % p_;
            }
        }
        return Poly(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(k_));
    }

    /// Lowest-coded monic degree-k polynomial without a monic factor of degree <= k/2.
    Poly find_irreducible() const {
        if (k_ == 1) return Poly{0};
        std::size_t total = 1;
        for (std::size_t i = 0; i < k_; ++i) total *= p_;
        for (std::size_t code = 0; code < total; ++code) {
            Poly low(k_);
            std::size_t c = code;
            for (std::size_t i = 0; i < k_; ++i) {
                low[i] = c % p_;
                c /= p_;
            }
            if (irreducible(low)) return low;
        }
        throw InternalError("no irreducible polynomial found");
    }

    bool irreducible(const Poly& low) const {
        // f = x^k + low; test divisibility by every monic g with 1 <= deg g <= k/2.
        std::vector<std::size_t> f(low);
        f.push_back(1);
        for (std::size_t dg = 1; dg <= k_ / 2; ++dg) {
            std::size_t count = 1;
            for (std::size_t i = 0; i < dg; ++i) count *= p_;
            for (std::size_t code = 0; code < count; ++code) {
                std::vector<std::size_t> g(dg + 1);
                std::size_t c = code;
                for (std::size_t i = 0; i < dg; ++i) {
                    g[i] = c % p_;
                    c /= p_;
                }
                g[dg] = 1;
                auto r = f;
                for (std::size_t d = r.size(); d-- > dg;) {
                    const std::size_t lead = r[d];
                    if (lead == 0) continue;
                    for (std::size_t i = 0; i <= dg; ++i) {
                        r[d - dg + i] = (r[d - dg + i] + (p_ - lead) * g[i]) % p_;
                    }
                }
                if (std::all_of(r.begin(), r.end(), [](std::size_t v) { return v == 0; })) return false;
            }
        }
        return true;
    }

    std::size_t q_ = 0;
    std::size_t p_ = 0;
    std::size_t k_ = 0;
    Poly modulus_;
    std::vector<std::size_t> add_;
    std::vector<std::size_t> mul_;
};

using Matrix2 = std::array<std::size_t, 4>;  // (a, b, c, d) for [[a, b], [c, d]]

/// PSL2(q): elements are the canonical representatives of {M, -M}, the
/// lexicographically smaller tuple, sorted; element i is psl2_elements(q)[i].
inline std::vector<Matrix2> psl2_elements(std::size_t q) {
    if (q % 2 == 0 || q < 3 || q > 13) {
        throw ParameterError("psl2 needs an odd prime power 3 <= q <= 13, got " + std::to_string(q));
    }
    const FiniteField f(q);
    std::vector<Matrix2> out;
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            for (std::size_t c = 0; c < q; ++c)
                for (std::size_t d = 0; d < q; ++d) {
                    if (f.sub(f.mul(a, d), f.mul(b, c)) != 1) continue;
                    const Matrix2 m{a, b, c, d};
                    const Matrix2 neg{f.neg(a), f.neg(b), f.neg(c), f.neg(d)};
                    if (m <= neg) out.push_back(m);
                }
    std::sort(out.begin(), out.end());
    return out;
}

inline GroupTable psl2(std::size_t q) {
    const auto elems = psl2_elements(q);
    const FiniteField f(q);
    std::map<Matrix2, std::size_t> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = i;
    auto canon = [&](const Matrix2& m) {
        const Matrix2 neg{f.neg(m[0]), f.neg(m[1]), f.neg(m[2]), f.neg(m[3])};
        return std::min(m, neg);
    };
    const std::size_t n = elems.size();
    std::vector<std::size_t> mul(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& x = elems[i];
            const auto& y = elems[j];
            const Matrix2 p{f.add(f.mul(x[0], y[0]), f.mul(x[1], y[2])), f.add(f.mul(x[0], y[1]), f.mul(x[1], y[3])),
                            f.add(f.mul(x[2], y[0]), f.mul(x[3], y[2])), f.add(f.mul(x[2], y[1]), f.mul(x[3], y[3]))};
            mul[i * n + j] = index.at(canon(p));
        }
    }
    return GroupTable(n, std::move(mul), "PSL2(" + std::to_string(q) + ")");
}

/// Index of the PSL2(q) element represented by +-[[a, b], [c, d]].
inline std::size_t psl2_index(std::size_t q, const Matrix2& m) {
    const auto elems = psl2_elements(q);
    const FiniteField f(q);
    const Matrix2 neg{f.neg(m[0]), f.neg(m[1]), f.neg(m[2]), f.neg(m[3])};
    const auto key = std::min(m, neg);
    const auto it = std::lower_bound(elems.begin(), elems.end(), key);
    if (it == elems.end() || *it != key) throw ParameterError("matrix is not in SL2(" + std::to_string(q) + ")");
    return static_cast<std::size_t>(it - elems.begin());
}

/// "group <order>" followed by one row of the multiplication table per line.
inline void write_group(std::ostream& os, const GroupTable& g) {
    os << "group " << g.order() << '\n';
    for (std::size_t x = 0; x < g.order(); ++x) {
        for (std::size_t y = 0; y < g.order(); ++y) os << (y ? " " : "") << g.mul(x, y);
        os << '\n';
    }
}

inline GroupTable read_group(LineReader& in) {
    const auto head = split_ws(in.next("group header"));
    if (head.size() != 2 || head[0] != "group") throw ParseError(in.line(), "expected 'group <order>'");
    const auto n = parse_count(head[1], in.line());
    std::vector<std::size_t> mul;
    for (std::size_t x = 0; x < n; ++x) {
        const auto row = split_ws(in.next("multiplication table row"));
        if (row.size() != n) throw ParseError(in.line(), "row has " + std::to_string(row.size()) + " entries");
        for (const auto& t : row) mul.push_back(parse_count(t, in.line()));
    }
    try {
        return GroupTable(n, std::move(mul), "table");
    } catch (const ParameterError& e) {
        throw ParseError(in.line(), e.what());
    }
}

inline GroupTable parse_group(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    return read_group(in);
}

}  // namespace sshdx
