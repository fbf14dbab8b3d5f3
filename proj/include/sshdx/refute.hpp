#pragma once

// ⊕-resolution over XOR systems: Gaussian refutations as derivation DAGs, the
// width-bounded closure, potential traces against a chain complex, and the
// closure-based pseudo-expectation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sshdx/bits.hpp"
#include "sshdx/chain.hpp"
#include "sshdx/error.hpp"
#include "sshdx/linalg.hpp"
#include "sshdx/util.hpp"
#include "sshdx/xor.hpp"

namespace sshdx {

struct ParityEquation {
    BitVec support;  // indicator over variables
    bool rhs = false;

    std::size_t width() const { return support.weight(); }
    bool is_contradiction() const { return support.is_zero() && rhs; }

    friend ParityEquation operator^(const ParityEquation& a, const ParityEquation& b) {
        ParityEquation out{a.support, a.rhs != b.rhs};
        out.support ^= b.support;
        return out;
    }
    bool operator==(const ParityEquation&) const = default;
};

inline ParityEquation equation_of(const XorInstance& inst, std::size_t i) {
    return {BitVec::from_indices(inst.num_vars(), inst[i].support), inst[i].rhs};
}

struct DagNode {
    ParityEquation equation;
    std::optional<std::size_t> leaf;  // instance constraint index for leaves
    std::array<std::size_t, 2> parents{0, 0};
};

/// Nodes are topologically ordered: parents precede children.
struct DerivationDag {
    std::vector<DagNode> nodes;
    std::size_t root = 0;

    std::size_t max_width() const {
        std::size_t w = 0;
        for (const auto& n : nodes) w = std::max(w, n.equation.width());
        return w;
    }
};

namespace detail {

/// Keeps only ancestors of `root`, preserving order.
inline DerivationDag prune_to_root(const std::vector<DagNode>& nodes, std::size_t root) {
    std::vector<char> keep(nodes.size(), 0);
    keep[root] = 1;
    for (std::size_t i = root + 1; i-- > 0;) {
        if (!keep[i] || nodes[i].leaf) continue;
        keep[nodes[i].parents[0]] = 1;
        keep[nodes[i].parents[1]] = 1;
    }
    std::vector<std::size_t> remap(nodes.size(), 0);
    DerivationDag dag;
    for (std::size_t i = 0; i <= root; ++i) {
        if (!keep[i]) continue;
        DagNode n = nodes[i];
        if (!n.leaf) n.parents = {remap[n.parents[0]], remap[n.parents[1]]};
        remap[i] = dag.nodes.size();
        dag.nodes.push_back(std::move(n));
    }
    dag.root = dag.nodes.size() - 1;
    return dag;
}

}  // namespace detail

/// A derivation of 0 = 1 read off incremental Gaussian elimination, or nothing if
/// the system is consistent.
inline std::optional<DerivationDag> gaussian_refute(const XorInstance& inst) {
    std::vector<DagNode> nodes;
    std::vector<std::optional<std::size_t>> pivot_node(inst.num_vars());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        nodes.push_back({equation_of(inst, i), i, {0, 0}});
        std::size_t cur = nodes.size() - 1;
        while (!nodes[cur].equation.support.is_zero()) {
            const std::size_t lead = nodes[cur].equation.support.first_one();
            if (!pivot_node[lead]) break;
            const std::size_t p = *pivot_node[lead];
            nodes.push_back({nodes[cur].equation ^ nodes[p].equation, std::nullopt, {cur, p}});
            cur = nodes.size() - 1;
        }
        const auto& eq = nodes[cur].equation;
        if (eq.support.is_zero()) {
            if (eq.rhs) return detail::prune_to_root(nodes, cur);
            continue;
        }
        pivot_node[eq.support.first_one()] = cur;
    }
    return std::nullopt;
}

/// Leaves match the instance, internal nodes are XORs of earlier parents, and the
/// root is 0 = 1.
inline bool check_dag(const DerivationDag& dag, const XorInstance& inst) {
    if (dag.nodes.empty() || dag.root >= dag.nodes.size()) return false;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        const auto& n = dag.nodes[i];
        if (n.equation.support.size() != inst.num_vars()) return false;
        if (n.leaf) {
            if (*n.leaf >= inst.size() || !(n.equation == equation_of(inst, *n.leaf))) return false;
        } else {
            if (n.parents[0] >= i || n.parents[1] >= i) return false;
            if (!(n.equation == (dag.nodes[n.parents[0]].equation ^ dag.nodes[n.parents[1]].equation))) return false;
        }
    }
    return dag.nodes[dag.root].equation.is_contradiction();
}

enum class ClosureStatus { refuted, not_refuted, inconclusive };

inline const char* to_string(ClosureStatus s) {
    switch (s) {
        case ClosureStatus::refuted: return "refuted";
        case ClosureStatus::not_refuted: return "not_refuted";
        default: return "inconclusive";
    }
}

struct ClosureResult {
    ClosureStatus status = ClosureStatus::not_refuted;
    std::size_t width = 0;
    /// Derived equations in insertion order; leaves first.
    std::vector<DagNode> equations;
    std::optional<std::size_t> contradiction;

    std::size_t size() const noexcept { return equations.size(); }

    /// rhs of the derived equation on `support`; the empty support derives 0.
    std::optional<bool> lookup(const BitVec& support) const {
        if (support.is_zero()) return false;
        const auto it = index.find(support);
        if (it == index.end()) return std::nullopt;
        return equations[it->second].equation.rhs;
    }

    /// One derivation of 0 = 1 by parent backtracking.
    std::optional<DerivationDag> refutation() const {
        if (!contradiction) return std::nullopt;
        return detail::prune_to_root(equations, *contradiction);
    }

    std::unordered_map<BitVec, std::size_t, BitVecHash> index;
};

/// Fixpoint of pairwise XOR restricted to equations of width <= w, starting from
/// the constraints of width <= w. Stops as soon as 0 = 1 appears. More than `cap`
/// equations makes the result inconclusive.
inline ClosureResult width_bounded_closure(const XorInstance& inst, std::size_t w, std::size_t cap,
                                           std::size_t threads = 1) {
    ClosureResult res;
    res.width = w;
    auto& eqs = res.equations;

    auto contradict = [&](std::size_t a, std::size_t b) {
        eqs.push_back({eqs[a].equation ^ eqs[b].equation, std::nullopt, {a, b}});
        res.contradiction = eqs.size() - 1;
        res.status = ClosureStatus::refuted;
    };

    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (inst[i].support.size() > w) continue;
        auto eq = equation_of(inst, i);
        const auto it = res.index.find(eq.support);
        if (it != res.index.end() && eqs[it->second].equation.rhs == eq.rhs) continue;
        eqs.push_back({std::move(eq), i, {0, 0}});
        if (it != res.index.end()) {
            contradict(it->second, eqs.size() - 1);
            return res;
        }
        res.index.emplace(eqs.back().equation.support, eqs.size() - 1);
    }
    if (eqs.size() > cap) {
        res.status = ClosureStatus::inconclusive;
        return res;
    }

    struct Candidate {
        ParityEquation eq;
        std::size_t a, b;
    };
    auto before = [](const Candidate& x, const Candidate& y) {
        if (x.eq.support != y.eq.support) return lex_less(x.eq.support, y.eq.support);
        if (x.eq.rhs != y.eq.rhs) return !x.eq.rhs;
        return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
    };

    std::size_t frontier = 0;
    const std::size_t workers = std::max<std::size_t>(1, threads);
    while (frontier < eqs.size()) {
        const std::size_t end = eqs.size();
        std::vector<std::vector<Candidate>> found(workers);
        run_workers(workers, [&](std::size_t wk) {
            for (std::size_t i = frontier + wk; i < end; i += workers) {
                for (std::size_t j = 0; j < i; ++j) {
                    if (xor_weight(eqs[i].equation.support, eqs[j].equation.support) > w) continue;
                    auto eq = eqs[i].equation ^ eqs[j].equation;
                    if (eq.support.is_zero()) {
                        if (eq.rhs) found[wk].push_back({std::move(eq), j, i});
                        continue;
                    }
                    const auto it = res.index.find(eq.support);
                    if (it != res.index.end() && eqs[it->second].equation.rhs == eq.rhs) continue;
                    found[wk].push_back({std::move(eq), j, i});
                }
            }
        });
        std::vector<Candidate> all;
        for (auto& f : found) all.insert(all.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
        std::sort(all.begin(), all.end(), before);
        frontier = end;

        // A contradiction anywhere in this round wins over the cap. Opposite
        // right-hand sides on one support sit next to each other after sorting.
        for (std::size_t k = 0; k < all.size(); ++k) {
            const auto& c = all[k];
            if (c.eq.support.is_zero()) {
                contradict(c.a, c.b);
                return res;
            }
            const auto it = res.index.find(c.eq.support);
            if (it != res.index.end()) {
                eqs.push_back({c.eq, std::nullopt, {c.a, c.b}});
                contradict(it->second, eqs.size() - 1);
                return res;
            }
            if (k > 0 && all[k - 1].eq.support == c.eq.support && all[k - 1].eq.rhs != c.eq.rhs) {
                eqs.push_back({all[k - 1].eq, std::nullopt, {all[k - 1].a, all[k - 1].b}});
                eqs.push_back({c.eq, std::nullopt, {c.a, c.b}});
                contradict(eqs.size() - 2, eqs.size() - 1);
                return res;
            }
        }
        for (auto& c : all) {
            if (res.index.count(c.eq.support)) continue;
            eqs.push_back({std::move(c.eq), std::nullopt, {c.a, c.b}});
            res.index.emplace(eqs.back().equation.support, eqs.size() - 1);
        }
        if (eqs.size() > cap) {
            res.status = ClosureStatus::inconclusive;
            return res;
        }
    }
    res.status = ClosureStatus::not_refuted;
    return res;
}

struct PotentialTrace {
    std::vector<BitVec> h;           // per node, XOR of leaf indicators over X(1)
    std::vector<std::size_t> kappa;  // per node, d(h_v, B₁)
    bool leaves_small = true;        // κ <= 1 at every leaf
    bool subadditive = true;         // κ(v) <= κ(v₁) + κ(v₂)
    bool equations_match = true;     // support of node v equals ∂₁ h_v
    bool root_is_cycle = false;      // ∂₁ h_r = 0
    bool root_nontrivial = false;    // h_r ∉ B₁
};

/// Leaves of `dag` must be constraints indexed by X(1), as produced by xor_from_chain.
inline PotentialTrace potential_trace(const DerivationDag& dag, const ChainComplex& x,
                                      std::uint64_t budget = kDefaultBudget) {
    const auto b1 = image_basis(x.d2());
    require_budget(pow2_saturated(b1.dim()), budget, "potential trace coset enumeration");
    const CosetOracle oracle(b1, budget);
    PotentialTrace tr;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        const auto& n = dag.nodes[i];
        BitVec h(x.x1());
        if (n.leaf) {
            if (*n.leaf >= x.x1()) throw DomainError("leaf " + std::to_string(*n.leaf) + " is not a coordinate of X(1)");
            h.set(*n.leaf);
        } else {
            h = tr.h[n.parents[0]];
            h ^= tr.h[n.parents[1]];
        }
        const auto k = oracle.distance(h);
        if (n.leaf && k > 1) tr.leaves_small = false;
        if (!n.leaf && k > tr.kappa[n.parents[0]] + tr.kappa[n.parents[1]]) tr.subadditive = false;
        if (n.equation.support.size() != x.x0() || !(x.d1().apply(h) == n.equation.support)) tr.equations_match = false;
        tr.h.push_back(std::move(h));
        tr.kappa.push_back(k);
    }
    const auto& hr = tr.h[dag.root];
    tr.root_is_cycle = x.d1().apply(hr).is_zero();
    tr.root_nontrivial = !b1.contains(hr);
    return tr;
}

/// Subsets ordered by size, then lexicographically by sorted index list.
struct SubsetOrder {
    bool operator()(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

/// Degree-2t functional on multilinear monomials x_S (x_j in {-1, 1}); subsets not
/// listed have moment 0.
class PseudoExpectation {
public:
    PseudoExpectation(std::size_t num_vars, std::size_t level) : n_(num_vars), t_(level) {}

    std::size_t num_vars() const noexcept { return n_; }
    std::size_t level() const noexcept { return t_; }
    const std::map<std::vector<std::size_t>, double, SubsetOrder>& moments() const noexcept { return moments_; }

    void set(std::vector<std::size_t> s, double v) {
        std::sort(s.begin(), s.end());
        if (s.size() > 2 * t_) throw ParameterError("moment degree exceeds 2t");
        if (v == 0.0) {
            moments_.erase(s);
        } else {
            moments_[std::move(s)] = v;
        }
    }

    double operator()(const std::vector<std::size_t>& s) const {
        if (s.size() > 2 * t_) throw DomainError("moment of degree " + std::to_string(s.size()) + " exceeds 2t");
        const auto it = moments_.find(s);
        return it == moments_.end() ? 0.0 : it->second;
    }

    bool operator==(const PseudoExpectation&) const = default;

private:
    std::size_t n_;
    std::size_t t_;
    std::map<std::vector<std::size_t>, double, SubsetOrder> moments_;
};

namespace detail {

inline std::vector<std::size_t> symmetric_difference(const std::vector<std::size_t>& a,
                                                     const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename Visit>
void for_each_subset_up_to(std::size_t n, std::size_t max_size, Visit&& visit) {
    for (std::size_t k = 0; k <= std::min(n, max_size); ++k) {
        for_each_combination(n, k, [&](const std::vector<std::size_t>& s) {
            visit(s);
            return true;
        });
    }
}

}  // namespace detail

struct PseudoExpectationChecks {
    bool scaling = false;
    bool respects_constraints = false;
    double min_eigenvalue = 0.0;
    bool psd = false;

    bool all() const noexcept { return scaling && respects_constraints && psd; }
};

/// Scaling, constraint respect on every multiplier x_S with |S| <= 2t - |T_i|, and
/// numeric PSD of the moment matrix on subsets of size <= t.
inline PseudoExpectationChecks check_pseudoexpectation(const PseudoExpectation& pe, const XorInstance& inst,
                                                       std::uint64_t budget = kDefaultBudget, double tol = 1e-8) {
    PseudoExpectationChecks out;
    const std::size_t n = pe.num_vars();
    const std::size_t t = pe.level();
    out.scaling = pe({}) == 1.0;

    out.respects_constraints = true;
    for (const auto& c : inst.constraints()) {
        if (c.support.size() > 2 * t) continue;
        require_budget(count_subsets_up_to(n, 0, 2 * t - c.support.size()), budget, "constraint respect check");
        const double sign = c.rhs ? -1.0 : 1.0;
        detail::for_each_subset_up_to(n, 2 * t - c.support.size(), [&](const std::vector<std::size_t>& s) {
            if (std::abs(pe(detail::symmetric_difference(c.support, s)) - sign * pe(s)) > 1e-12) {
                out.respects_constraints = false;
            }
        });
    }

    const auto dim = count_subsets_up_to(n, 0, t);
    if (dim > 4096 || dim > budget) throw ResourceError("moment matrix too large for dense eigensolve");
    std::vector<std::vector<std::size_t>> rows;
    detail::for_each_subset_up_to(n, t, [&](const std::vector<std::size_t>& s) { rows.push_back(s); });
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pe(detail::symmetric_difference(rows[i], rows[j]));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw InternalError("eigensolver failed on moment matrix");
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    out.psd = out.min_eigenvalue >= -tol;
    return out;
}

/// 1/2 + 1/(2m) sum_i (-1)^{z_i} Ẽ[x_{T_i}]; every |T_i| must be at most 2t.
inline double sos_objective(const PseudoExpectation& pe, const XorInstance& inst) {
    if (inst.size() == 0) return 1.0;
    double acc = 0.0;
    for (const auto& c : inst.constraints()) {
        if (c.support.size() > 2 * pe.level()) {
            throw DomainError("constraint of arity " + std::to_string(c.support.size()) + " exceeds degree 2t");
        }
        acc += (c.rhs ? -1.0 : 1.0) * pe(c.support);
    }
    return 0.5 + acc / (2.0 * static_cast<double>(inst.size()));
}

/// Ẽ[x_S] = (-1)^b when the width-2t closure derives (S, b), else 0. Empty when the
/// closure refutes the instance.
inline std::optional<PseudoExpectation> build_pseudoexpectation(const XorInstance& inst, std::size_t t,
                                                                std::size_t cap, std::size_t threads = 1,
                                                                std::uint64_t budget = kDefaultBudget) {
    const auto closure = width_bounded_closure(inst, 2 * t, cap, threads);
    if (closure.status == ClosureStatus::refuted) return std::nullopt;
    if (closure.status == ClosureStatus::inconclusive) {
        throw ResourceError("width-" + std::to_string(2 * t) + " closure exceeded cap " + std::to_string(cap));
    }
    PseudoExpectation pe(inst.num_vars(), t);
    pe.set({}, 1.0);
    for (const auto& node : closure.equations) {
        pe.set(node.equation.support.support(), node.equation.rhs ? -1.0 : 1.0);
    }
    const auto checks = check_pseudoexpectation(pe, inst, budget);
    if (!checks.all()) {
        throw InternalError("closure pseudo-expectation failed its checks (min eigenvalue " +
                            std::to_string(checks.min_eigenvalue) + ")");
    }
    return pe;
}

/// The point distribution at σ: Ẽ[x_S] = prod_{j in S} (-1)^{σ_j}.
inline PseudoExpectation pseudoexpectation_from_assignment(const BitVec& sigma, std::size_t t) {
    PseudoExpectation pe(sigma.size(), t);
    detail::for_each_subset_up_to(sigma.size(), 2 * t, [&](const std::vector<std::size_t>& s) {
        bool odd = false;
        for (auto j : s) odd ^= sigma.get(j);
        pe.set(s, odd ? -1.0 : 1.0);
    });
    return pe;
}

/// Nonzero moments in canonical subset order with 1-based variable indices.
inline nlohmann::ordered_json moments_to_json(const PseudoExpectation& pe) {
    nlohmann::ordered_json j;
    j["schema"] = "sshdx.moments/1";
    j["num_vars"] = pe.num_vars();
    j["level"] = pe.level();
    j["default"] = 0;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [s, v] : pe.moments()) {
        std::vector<std::size_t> one_based;
        for (auto x : s) one_based.push_back(x + 1);
        arr.push_back({{"subset", one_based}, {"value", v}});
    }
    j["moments"] = std::move(arr);
    return j;
}

inline PseudoExpectation moments_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != "sshdx.moments/1") throw ParameterError("unknown moments schema");
        PseudoExpectation pe(j.at("num_vars").get<std::size_t>(), j.at("level").get<std::size_t>());
        for (const auto& m : j.at("moments")) {
            std::vector<std::size_t> s;
            for (auto x : m.at("subset").get<std::vector<std::size_t>>()) {
                if (x == 0 || x > pe.num_vars()) throw ParameterError("moment subset index out of range");
                s.push_back(x - 1);
            }
            pe.set(std::move(s), m.at("value").get<double>());
        }
        return pe;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed moments file: ") + e.what());
    }
}

}  // namespace sshdx
