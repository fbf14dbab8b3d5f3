#pragma once

// XOR constraint systems built from chain complexes, exact values and the
// arity reduction to 3-XOR.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/chain.hpp"
#include "sshdx/error.hpp"
#include "sshdx/linalg.hpp"
#include "sshdx/util.hpp"

namespace sshdx {

/// sum_{j in support} x_j = rhs over F2; support sorted and duplicate-free.
struct XorConstraint {
    std::vector<std::size_t> support;
    bool rhs = false;

    bool operator==(const XorConstraint&) const = default;
};

/// Where constraints and variables came from. Constraint entries are "x1:<y>" for
/// a coordinate of X(1) or "split:<parent>:<side>" after reduction; variables are
/// "x0:<v>" or "dummy:<constraint>".
struct Provenance {
    std::vector<std::string> constraints;
    std::vector<std::string> variables;
};

class XorInstance {
public:
    XorInstance() = default;
    XorInstance(std::size_t num_vars, std::vector<XorConstraint> constraints)
        : num_vars_(num_vars), constraints_(std::move(constraints)) {
        for (std::size_t i = 0; i < constraints_.size(); ++i) validate(constraints_[i], i);
    }

    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t size() const noexcept { return constraints_.size(); }
    const std::vector<XorConstraint>& constraints() const noexcept { return constraints_; }
    const XorConstraint& operator[](std::size_t i) const { return constraints_[i]; }

    std::size_t max_arity() const {
        std::size_t k = 0;
        for (const auto& c : constraints_) k = std::max(k, c.support.size());
        return k;
    }

    const std::optional<Provenance>& provenance() const noexcept { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

    /// Number of constraints satisfied by an assignment.
    std::size_t satisfied(const BitVec& x) const {
        if (x.size() != num_vars_) throw ShapeError("assignment length differs from variable count");
        std::size_t ok = 0;
        for (const auto& c : constraints_) {
            bool p = false;
            for (auto j : c.support) p ^= x.get(j);
            ok += p == c.rhs ? 1 : 0;
        }
        return ok;
    }

    /// Constraint matrix (one row per constraint) and right-hand side.
    std::pair<BitMatrix, BitVec> system() const {
        BitMatrix m(0, num_vars_);
        BitVec rhs(constraints_.size());
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            m.append_row(BitVec::from_indices(num_vars_, constraints_[i].support));
            rhs.set(i, constraints_[i].rhs);
        }
        return {std::move(m), std::move(rhs)};
    }

    /// Provenance is not part of equality.
    bool operator==(const XorInstance& o) const { return num_vars_ == o.num_vars_ && constraints_ == o.constraints_; }

private:
    void validate(const XorConstraint& c, std::size_t i) const {
        if (c.support.empty()) throw ParameterError("constraint " + std::to_string(i) + " has empty support");
        for (std::size_t k = 0; k < c.support.size(); ++k) {
            if (c.support[k] >= num_vars_) throw ParameterError("constraint " + std::to_string(i) + " uses variable out of range");
            if (k > 0 && c.support[k] <= c.support[k - 1]) {
                throw ParameterError("constraint " + std::to_string(i) + " support is not strictly ascending");
            }
        }
    }

    std::size_t num_vars_ = 0;
    std::vector<XorConstraint> constraints_;
    std::optional<Provenance> provenance_;
};

/// Lexicographically smallest vector of the reduced kernel basis of δ₁ outside B¹.
inline BitVec pick_beta(const ChainComplex& x) {
    auto basis = kernel_basis(x.delta1()).basis().row_data();
    std::sort(basis.begin(), basis.end(), [](const BitVec& a, const BitVec& b) { return lex_less(a, b); });
    const auto cob = Subspace::span(x.d1());
    for (const auto& v : basis) {
        if (!cob.contains(v)) return v;
    }
    throw DomainError("H¹ is trivial: every cocycle is a coboundary");
}

/// One constraint per y in X(1): sum over v with ∂₁[v, y] = 1 of x_v equals β(y).
inline XorInstance xor_from_chain(const ChainComplex& x, const BitVec& beta) {
    if (beta.size() != x.x1()) {
        throw ShapeError("β has length " + std::to_string(beta.size()) + ", |X(1)| = " + std::to_string(x.x1()));
    }
    const auto cols = x.d1().transpose();
    std::vector<XorConstraint> cs;
    Provenance prov;
    for (std::size_t y = 0; y < x.x1(); ++y) {
        auto support = cols.row(y).support();
        if (support.empty()) throw DomainError("coordinate " + std::to_string(y) + " of X(1) has empty boundary");
        cs.push_back({std::move(support), beta.get(y)});
        prov.constraints.push_back("x1:" + std::to_string(y));
    }
    for (std::size_t v = 0; v < x.x0(); ++v) prov.variables.push_back("x0:" + std::to_string(v));
    XorInstance out(x.x0(), std::move(cs));
    out.set_provenance(std::move(prov));
    return out;
}

struct ValueReport {
    Rational value{1};
    std::size_t satisfied = 0;
    std::optional<BitVec> witness;
};

/// Exact maximum fraction of satisfied constraints over all 2^n assignments. Ties
/// go to the smallest assignment read as an integer with variable j at bit j.
inline ValueReport value_bruteforce(const XorInstance& inst, std::uint64_t budget = kDefaultBudget,
                                    std::size_t threads = 1) {
    const std::size_t n = inst.num_vars();
    if (n >= 63) throw ResourceError("too many variables for brute force");
    require_budget(pow2_saturated(n), budget, "assignment enumeration");
    ValueReport rep;
    if (inst.size() == 0) {
        rep.witness = BitVec(n);
        return rep;
    }
    std::vector<std::uint64_t> masks;
    std::vector<bool> rhs;
    for (const auto& c : inst.constraints()) {
        std::uint64_t m = 0;
        for (auto j : c.support) m |= std::uint64_t{1} << j;
        masks.push_back(m);
        rhs.push_back(c.rhs);
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, total));
    struct Best {
        std::size_t sat = 0;
        std::uint64_t assignment = 0;
        bool any = false;
    };
    std::vector<Best> best(workers);
    run_workers(workers, [&](std::size_t w) {
        const std::uint64_t lo = total / workers * w;
        const std::uint64_t hi = w + 1 == workers ? total : total / workers * (w + 1);
        auto& b = best[w];
        for (std::uint64_t a = lo; a < hi; ++a) {
            std::size_t sat = 0;
            for (std::size_t i = 0; i < masks.size(); ++i) sat += ((std::popcount(masks[i] & a) & 1) != 0) == rhs[i];
            if (!b.any || sat > b.sat) b = {sat, a, true};
        }
    });
    Best win = best[0];
    for (const auto& b : best) {
        if (b.any && (b.sat > win.sat || (b.sat == win.sat && b.assignment < win.assignment))) win = b;
    }
    rep.satisfied = win.sat;
    rep.value = Rational(static_cast<std::int64_t>(win.sat), static_cast<std::int64_t>(inst.size()));
    rep.witness = BitVec::from_mask(n, win.assignment);
    return rep;
}

/// d(β, B¹) / |X(1)|.
inline Rational unsat_fraction_via_distance(const ChainComplex& x, const BitVec& beta,
                                            std::uint64_t budget = kDefaultBudget) {
    if (x.x1() == 0) return Rational(0);
    const auto d = coset_min_weight(beta, Subspace::span(x.d1()), budget);
    return Rational(static_cast<std::int64_t>(d), static_cast<std::int64_t>(x.x1()));
}

struct ReductionRound {
    std::size_t arity_before = 0;
    std::size_t arity_after = 0;
    std::size_t vars_after = 0;
    std::size_t constraints_after = 0;
};

/// One application of the split: a constraint on j >= 4 variables becomes the first
/// floor(j/2) variables plus a fresh dummy y with the original rhs, followed by the
/// remaining variables plus y with rhs 0. Other constraints are copied.
inline XorInstance phi_once(const XorInstance& inst) {
    std::vector<XorConstraint> out;
    Provenance prov;
    const auto& src = inst.provenance();
    if (src) {
        prov.variables = src->variables;
    } else {
        for (std::size_t v = 0; v < inst.num_vars(); ++v) prov.variables.push_back("var:" + std::to_string(v));
    }
    std::size_t next_var = inst.num_vars();
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& c = inst[i];
        const std::string origin = src ? src->constraints[i] : "c:" + std::to_string(i);
        if (c.support.size() < 4) {
            out.push_back(c);
            prov.constraints.push_back(origin);
            continue;
        }
        const std::size_t half = c.support.size() / 2;
        const std::size_t y = next_var++;
        XorConstraint c0{{c.support.begin(), c.support.begin() + static_cast<std::ptrdiff_t>(half)}, c.rhs};
        XorConstraint c1{{c.support.begin() + static_cast<std::ptrdiff_t>(half), c.support.end()}, false};
        c0.support.push_back(y);
        c1.support.push_back(y);
        out.push_back(std::move(c0));
        out.push_back(std::move(c1));
        prov.constraints.push_back("split:" + origin + ":0");
        prov.constraints.push_back("split:" + origin + ":1");
        prov.variables.push_back("dummy:" + origin);
    }
    XorInstance res(next_var, std::move(out));
    res.set_provenance(std::move(prov));
    return res;
}

/// Applies phi_once until every constraint has arity <= 3.
inline XorInstance reduce_to_3xor(const XorInstance& inst, std::vector<ReductionRound>* trace = nullptr) {
    XorInstance cur = inst;
    while (cur.max_arity() > 3) {
        const std::size_t before = cur.max_arity();
        cur = phi_once(cur);
        if (trace) trace->push_back({before, cur.max_arity(), cur.num_vars(), cur.size()});
    }
    return cur;
}

/// "xor <n> <m>" then one line per constraint: ascending 1-based indices, "=", bit.
inline void write_xor(std::ostream& os, const XorInstance& inst) {
    os << "xor " << inst.num_vars() << ' ' << inst.size() << '\n';
    for (const auto& c : inst.constraints()) {
        for (auto j : c.support) os << (j + 1) << ' ';
        os << "= " << (c.rhs ? 1 : 0) << '\n';
    }
}

inline std::string serialize(const XorInstance& inst) {
    std::ostringstream os;
    write_xor(os, inst);
    return os.str();
}

inline XorInstance read_xor(LineReader& in) {
    const auto header = in.next("xor header");
    const auto tok = split_ws(header);
    if (tok.size() != 3 || tok[0] != "xor") throw ParseError(in.line(), "expected 'xor <num_vars> <num_constraints>'");
    const auto n = parse_count(tok[1], in.line());
    const auto m = parse_count(tok[2], in.line());
    if (header != "xor " + std::to_string(n) + " " + std::to_string(m)) {
        throw ParseError(in.line(), "header is not in canonical form");
    }
    std::vector<XorConstraint> cs;
    for (std::size_t i = 0; i < m; ++i) {
        const auto line = in.next("constraint " + std::to_string(i + 1));
        const auto parts = split_ws(line);
        if (parts.size() < 3 || parts[parts.size() - 2] != "=") {
            throw ParseError(in.line(), "expected '<indices> = <bit>'");
        }
        XorConstraint c;
        for (std::size_t k = 0; k + 2 < parts.size(); ++k) {
            const auto idx = parse_count(parts[k], in.line());
            if (idx == 0 || idx > n) throw ParseError(in.line(), "variable index " + parts[k] + " out of range");
            if (!c.support.empty() && idx - 1 <= c.support.back()) {
                throw ParseError(in.line(), "variable indices must be strictly ascending");
            }
            c.support.push_back(idx - 1);
        }
        const auto& bit = parts.back();
        if (bit != "0" && bit != "1") throw ParseError(in.line(), "right-hand side must be 0 or 1");
        c.rhs = bit == "1";
        std::string canonical;
        for (auto j : c.support) canonical += std::to_string(j + 1) + " ";
        canonical += "= " + bit;
        if (line != canonical) throw ParseError(in.line(), "constraint line is not in canonical form");
        cs.push_back(std::move(c));
    }
    if (!in.at_end()) throw ParseError(in.line() + 1, "unexpected content after last constraint");
    return XorInstance(n, std::move(cs));
}

inline XorInstance parse_xor(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    return read_xor(in);
}

}  // namespace sshdx
