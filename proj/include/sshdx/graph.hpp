#pragma once

// Undirected multigraphs, Cayley graphs, spectra and expander-mixing checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sshdx/error.hpp"
#include "sshdx/groups.hpp"

namespace sshdx {

/// Edge multiset over vertices [0, n). A self-loop adds 1 to its vertex degree and
/// 1 to the adjacency diagonal.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : n_(n) {}
    Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) : n_(n) {
        for (auto [u, v] : edges) add_edge(u, v);
    }

    void add_edge(std::size_t u, std::size_t v) {
        if (u >= n_ || v >= n_) {
            throw ParameterError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range for " +
                                 std::to_string(n_) + " vertices");
        }
        edges_.emplace_back(u, v);
    }

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> d(n_, 0);
        for (auto [u, v] : edges_) {
            ++d[u];
            if (u != v) ++d[v];
        }
        return d;
    }

    /// Common degree, or nothing if the graph is irregular. The empty graph is 0-regular.
    std::optional<std::size_t> regular_degree() const {
        const auto d = degrees();
        if (d.empty()) return 0;
        if (std::any_of(d.begin(), d.end(), [&](std::size_t x) { return x != d[0]; })) return std::nullopt;
        return d[0];
    }

    /// Incident edge indices per vertex, ascending.
    std::vector<std::vector<std::size_t>> incidence() const {
        std::vector<std::vector<std::size_t>> inc(n_);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            inc[edges_[e].first].push_back(e);
            if (edges_[e].first != edges_[e].second) inc[edges_[e].second].push_back(e);
        }
        return inc;
    }

    Eigen::MatrixXd adjacency() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (auto [u, v] : edges_) {
            const auto iu = static_cast<Eigen::Index>(u);
            const auto iv = static_cast<Eigen::Index>(v);
            a(iu, iv) += 1.0;
            if (u != v) a(iv, iu) += 1.0;
        }
        return a;
    }

    /// Count of ordered pairs (s, t) in S x T joined by an edge, with multiplicity:
    /// 1_S^T A 1_T. An edge inside S ∩ T counts twice.
    std::size_t count_between(const std::vector<std::size_t>& s, const std::vector<std::size_t>& t) const {
        std::vector<char> in_s(n_, 0), in_t(n_, 0);
        for (auto x : s) in_s.at(x) = 1;
        for (auto x : t) in_t.at(x) = 1;
        std::size_t c = 0;
        for (auto [u, v] : edges_) {
            if (u == v) {
                c += (in_s[u] && in_t[u]) ? 1 : 0;
            } else {
                c += (in_s[u] && in_t[v]) ? 1 : 0;
                c += (in_s[v] && in_t[u]) ? 1 : 0;
            }
        }
        return c;
    }

    /// Bipartite double cover: vertex (v, i) is v + i * n, edge {u, v} lifts to
    /// {(u, 0), (v, 1)} and {(v, 0), (u, 1)}.
    Graph double_cover() const {
        Graph g(2 * n_);
        for (auto [u, v] : edges_) {
            g.add_edge(u, v + n_);
            if (u != v) g.add_edge(v, u + n_);
        }
        return g;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

enum class Side { left, right };

/// x ~ s x (left) or x ~ x s (right) for s in S. The arcs (x, s) and (s x, s^-1)
/// form one edge; s = id gives a self-loop.
inline Graph cayley_graph(const GroupTable& g, const std::vector<std::size_t>& s, Side side) {
    for (auto x : s) g.check_element(x);
    if (!g.is_symmetric(s)) throw ParameterError("generator set is not closed under inverses");
    auto gens = s;
    std::sort(gens.begin(), gens.end());
    if (std::adjacent_find(gens.begin(), gens.end()) != gens.end()) {
        throw ParameterError("generator set has repeated elements");
    }
    Graph out(g.order());
    for (std::size_t x = 0; x < g.order(); ++x) {
        for (auto a : gens) {
            const std::size_t y = side == Side::left ? g.mul(a, x) : g.mul(x, a);
            const auto key = std::make_pair(x, a);
            const auto partner = std::make_pair(y, g.inv(a));
            if (key <= partner) out.add_edge(x, y);
        }
    }
    return out;
}

/// Sorted adjacency spectrum, ascending.
inline std::vector<double> spectrum(const Graph& g) {
    if (g.vertex_count() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw InternalError("eigensolver failed");
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

/// max(|λ₂|, |λ_n|) of a regular graph.
inline double spectral_lambda(const Graph& g) {
    if (!g.regular_degree()) throw ParameterError("spectral lambda requires a regular graph");
    if (g.vertex_count() > 4096) throw ResourceError("graph too large for dense eigensolve");
    const auto ev = spectrum(g);
    if (ev.size() <= 1) return 0.0;
    // ev ascending: λ₁ = ev.back(), λ₂ = ev[n-2], λ_n = ev[0]
    return std::max(std::abs(ev[ev.size() - 2]), std::abs(ev.front()));
}

/// (Δ|S||T|/|V| + λ sqrt(|S||T|)) - |E(S, T)|. With `double_cover`, S holds cover
/// vertices in [0, n) and T in [n, 2n), and the bound uses the base graph's λ.
inline double expander_mixing_slack(const Graph& g, const std::vector<std::size_t>& s,
                                    const std::vector<std::size_t>& t, bool double_cover) {
    const auto deg = g.regular_degree();
    if (!deg) throw ParameterError("expander mixing requires a regular graph");
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> tt = t;
    for (auto x : s) {
        if (x >= n) throw ParameterError("vertex " + std::to_string(x) + " of S out of range");
    }
    for (auto& x : tt) {
        if (double_cover) {
            if (x < n || x >= 2 * n) throw ParameterError("vertex " + std::to_string(x) + " of T not on side 1");
            x -= n;
        } else if (x >= n) {
            throw ParameterError("vertex " + std::to_string(x) + " of T out of range");
        }
    }
    if (n == 0) return 0.0;
    const double lambda = spectral_lambda(g);
    const double ss = static_cast<double>(s.size());
    const double ts = static_cast<double>(tt.size());
    const double bound = static_cast<double>(*deg) * ss * ts / static_cast<double>(n) + lambda * std::sqrt(ss * ts);
    // Cover edges between side 0 and side 1 are exactly the base adjacency entries.
    return bound - static_cast<double>(g.count_between(s, tt));
}

}  // namespace sshdx
