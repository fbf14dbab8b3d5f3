#pragma once

// Three-term chain complexes F2^X(0) <- F2^X(1) <- F2^X(2) with ∂₁∂₂ = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/codes.hpp"
#include "sshdx/error.hpp"
#include "sshdx/graph.hpp"
#include "sshdx/linalg.hpp"
#include "sshdx/lr_complex.hpp"
#include "sshdx/util.hpp"

namespace sshdx {

enum class Direction { boundary, coboundary };

inline const char* to_string(Direction d) { return d == Direction::boundary ? "boundary" : "coboundary"; }

inline Direction parse_direction(const std::string& s) {
    if (s == "boundary") return Direction::boundary;
    if (s == "coboundary" || s == "co-boundary") return Direction::coboundary;
    throw ParameterError("direction must be 'boundary' or 'coboundary', got '" + s + "'");
}

class ChainComplex {
public:
    ChainComplex() = default;

    /// d1: |X(0)| x |X(1)|, d2: |X(1)| x |X(2)|.
    ChainComplex(BitMatrix d1, BitMatrix d2, bool allow_degenerate = false)
        : d1_(std::move(d1)), d2_(std::move(d2)), degenerate_allowed_(allow_degenerate) {
        if (d1_.cols() != d2_.rows()) {
            throw ShapeError("∂₁ has " + std::to_string(d1_.cols()) + " columns but ∂₂ has " +
                             std::to_string(d2_.rows()) + " rows");
        }
        const auto prod = d1_ * d2_;
        for (std::size_t r = 0; r < prod.rows(); ++r) {
            if (!prod.row(r).is_zero()) {
                throw ConstructionError("∂₁∂₂ != 0 at (row " + std::to_string(r) + ", column " +
                                        std::to_string(prod.row(r).first_one()) + ")");
            }
        }
        if (!allow_degenerate) check_nondegenerate();
    }

    std::size_t x0() const noexcept { return d1_.rows(); }
    std::size_t x1() const noexcept { return d1_.cols(); }
    std::size_t x2() const noexcept { return d2_.cols(); }

    const BitMatrix& d1() const noexcept { return d1_; }
    const BitMatrix& d2() const noexcept { return d2_; }
    BitMatrix delta0() const { return d1_.transpose(); }
    BitMatrix delta1() const { return d2_.transpose(); }
    bool degenerate_allowed() const noexcept { return degenerate_allowed_; }

private:
    void check_nondegenerate() const {
        auto check = [](const BitMatrix& m, const char* name) {
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (m.row(r).is_zero()) throw DegenerateError(std::string(name) + " has zero row " + std::to_string(r));
            }
            const auto w = m.column_weights();
            for (std::size_t c = 0; c < w.size(); ++c) {
                if (w[c] == 0) throw DegenerateError(std::string(name) + " has zero column " + std::to_string(c));
            }
        };
        check(d1_, "∂₁");
        check(d2_, "∂₂");
        if (x2() == 0) throw DegenerateError("X(2) is empty");
    }

    BitMatrix d1_;
    BitMatrix d2_;
    bool degenerate_allowed_ = false;
};

/// F2^{∅} <- F2^V <- F2^E: ∂₁ is the all-ones row, ∂₂ the vertex-edge incidence.
inline ChainComplex from_graph(const Graph& g) {
    const auto deg = g.degrees();
    for (std::size_t v = 0; v < deg.size(); ++v) {
        if (deg[v] == 0) throw DegenerateError("vertex " + std::to_string(v) + " is isolated");
    }
    BitMatrix d1(1, g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) d1.set(0, v);
    BitMatrix d2(g.vertex_count(), g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edges()[e];
        d2.flip(u, e);
        d2.flip(v, e);
    }
    return ChainComplex(std::move(d1), std::move(d2));
}

/// F2^V <- F2^E <- F2^F from vertex pairs and faces given as edge-index lists.
inline ChainComplex from_two_cells(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   const std::vector<std::vector<std::size_t>>& faces, bool allow_degenerate = false) {
    BitMatrix d1(vertices, edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        if (u >= vertices || v >= vertices) throw ParameterError("edge endpoint out of range");
        d1.flip(u, e);
        d1.flip(v, e);
    }
    BitMatrix d2(edges.size(), faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (auto e : faces[f]) {
            if (e >= edges.size()) throw ParameterError("face edge out of range");
            d2.flip(e, f);
        }
    }
    const auto prod = d1 * d2;
    for (std::size_t v = 0; v < prod.rows(); ++v) {
        if (!prod.row(v).is_zero()) {
            throw ConstructionError("vertex " + std::to_string(v) + " meets face " +
                                    std::to_string(prod.row(v).first_one()) + " in an odd number of edges");
        }
    }
    return ChainComplex(std::move(d1), std::move(d2), allow_degenerate);
}

/// Rows indexed v * r + j: parity check j of local_parity applied to the local view
/// of v, whose p-th coordinate is edge view_order[v][p].
inline BitMatrix tanner_map(const Graph& g, const BitMatrix& local_parity,
                            const std::vector<std::vector<std::size_t>>& view_order) {
    const auto deg = g.regular_degree();
    if (!deg) throw ShapeError("Tanner map needs a regular graph");
    if (local_parity.cols() != *deg) {
        throw ShapeError("local code length " + std::to_string(local_parity.cols()) + " differs from degree " +
                         std::to_string(*deg));
    }
    if (view_order.size() != g.vertex_count()) throw ShapeError("view order must list every vertex");
    const auto inc = g.incidence();
    const std::size_t r = local_parity.rows();
    BitMatrix out(g.vertex_count() * r, g.edge_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const auto& view = view_order[v];
        if (view.size() != *deg) throw ShapeError("view of vertex " + std::to_string(v) + " has wrong length");
        auto sorted = view;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != inc[v]) {
            throw ShapeError("view of vertex " + std::to_string(v) + " is not a permutation of its edges");
        }
        for (std::size_t j = 0; j < r; ++j) {
            for (auto p : local_parity.row(j).support()) out.flip(v * r + j, view[p]);
        }
    }
    return out;
}

inline BitMatrix tanner_map(const Graph& g, const BitMatrix& local_parity) {
    return tanner_map(g, local_parity, g.incidence());
}

/// δ₀ = C₀ᵀ, δ₁ = C₁ with C_i the Tanner maps of the square graphs for local codes
/// C₀^⊥ = (C_A ⊗ C_B)^⊥ and C₁^⊥ = (C_A^⊥ ⊗ C_B^⊥)^⊥.
inline ChainComplex build_lz_complex(const LeftRightCayleyComplex& cx, const LinearCode& ca, const LinearCode& cb) {
    if (ca.length() != cx.delta() || cb.length() != cx.delta()) {
        throw ConstructionError("base code lengths " + std::to_string(ca.length()) + ", " +
                                std::to_string(cb.length()) + " differ from Δ = " + std::to_string(cx.delta()));
    }
    const auto local0 = kron_rows(ca.generator(), cb.generator());
    const auto local1 = kron_rows(ca.parity(), cb.parity());
    const auto c0 = tanner_map(cx.square_graph(0), local0, cx.view_order(0));
    const auto c1 = tanner_map(cx.square_graph(1), local1, cx.view_order(1));
    return ChainComplex(c0, c1.transpose());
}

inline std::size_t max_degree(const ChainComplex& x) {
    std::size_t best = 0;
    for (const auto* m : {&x.d1(), &x.d2()}) {
        for (std::size_t r = 0; r < m->rows(); ++r) best = std::max(best, m->row_weight(r));
        for (auto w : m->column_weights()) best = std::max(best, w);
    }
    return best;
}

/// dim Z¹ - dim B¹ (equal to dim H₁).
inline std::size_t cohomology_dim(const ChainComplex& x) { return x.x1() - rank(x.d2()) - rank(x.d1()); }

inline ChainComplex dual_complex(const ChainComplex& x) {
    return ChainComplex(x.d2().transpose(), x.d1().transpose(), x.degenerate_allowed());
}

/// The operator, cycle space and boundary space seen from X(1) in one direction:
/// boundary uses (∂₁, Z₁, B₁), co-boundary uses (δ₁, Z¹, B¹).
struct DirectionSpaces {
    BitMatrix op;
    Subspace cycles;
    Subspace boundaries;
};

inline DirectionSpaces direction_spaces(const ChainComplex& x, Direction dir) {
    if (dir == Direction::boundary) return {x.d1(), kernel_basis(x.d1()), image_basis(x.d2())};
    auto op = x.delta1();
    auto z = kernel_basis(op);
    return {std::move(op), std::move(z), Subspace::span(x.d1())};
}

struct SystoleReport {
    std::size_t weight = 0;
    BitVec witness;
};

/// min |v| over v in Z \ B. Enumerates Z when 2^dim Z fits the budget, else
/// enumerates vectors by increasing weight.
inline SystoleReport min_nontrivial_weight(const DirectionSpaces& sp, std::uint64_t budget) {
    if (sp.cycles.dim() == sp.boundaries.dim()) throw DomainError("(co)homology is trivial");
    const std::size_t n = sp.cycles.ambient_dim();
    if (pow2_saturated(sp.cycles.dim()) <= budget) {
        std::optional<SystoleReport> best;
        BitVec cur(n);
        for (std::uint64_t i = 1; i < pow2_saturated(sp.cycles.dim()); ++i) {
            cur ^= sp.cycles.basis().row(static_cast<std::size_t>(std::countr_zero(i)));
            const auto w = cur.weight();
            if (best && (w > best->weight || (w == best->weight && !lex_less(cur, best->witness)))) continue;
            if (!sp.boundaries.contains(cur)) best = SystoleReport{w, cur};
        }
        return *best;
    }
    std::uint64_t visited = 0;
    for (std::size_t w = 1; w <= n; ++w) {
        std::optional<BitVec> found;
        for_each_combination(n, w, [&](const std::vector<std::size_t>& idx) {
            if (++visited > budget) throw ResourceError("systolic search exceeded budget " + std::to_string(budget));
            const auto v = BitVec::from_indices(n, idx);
            if (sp.op.apply(v).is_zero() && !sp.boundaries.contains(v)) {
                found = v;
                return false;
            }
            return true;
        });
        if (found) return {w, *found};
    }
    throw InternalError("nontrivial (co)homology without a nontrivial (co)cycle");
}

/// min |v| over v in Z¹ \ B¹.
inline std::size_t cosystolic_distance(const ChainComplex& x, std::uint64_t budget = kDefaultBudget) {
    return min_nontrivial_weight(direction_spaces(x, Direction::coboundary), budget).weight;
}

/// min |v| over v in Z₁ \ B₁.
inline std::size_t systolic_distance(const ChainComplex& x, std::uint64_t budget = kDefaultBudget) {
    return min_nontrivial_weight(direction_spaces(x, Direction::boundary), budget).weight;
}

/// |f + b| >= |f| for every b in B₁ (or B¹).
inline bool is_minimal(const ChainComplex& x, const BitVec& f, Direction dir, std::uint64_t budget = kDefaultBudget) {
    if (f.size() != x.x1()) throw ShapeError("chain length differs from |X(1)|");
    const auto sp = direction_spaces(x, dir);
    return coset_min_weight(f, sp.boundaries, budget) == f.weight();
}

enum class ExpansionMode { exhaustive, sampled };

inline const char* to_string(ExpansionMode m) { return m == ExpansionMode::exhaustive ? "exhaustive" : "sampled"; }

inline ExpansionMode parse_expansion_mode(const std::string& s) {
    if (s == "exhaustive") return ExpansionMode::exhaustive;
    if (s == "sampled") return ExpansionMode::sampled;
    throw ParameterError("expansion mode must be 'exhaustive' or 'sampled', got '" + s + "'");
}

struct ExpansionParams {
    Rational rho1{1, 10};
    Rational rho2{1, 10};
    Direction direction = Direction::coboundary;
    ExpansionMode mode = ExpansionMode::exhaustive;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::uint64_t budget = kDefaultBudget;
};

struct ExpansionReport {
    Direction direction = Direction::coboundary;
    Rational rho1, rho2;
    ExpansionMode mode = ExpansionMode::exhaustive;
    /// Isoperimetric form: every minimal f with 0 < |f| <= ρ₁|X(1)| has |∂f| >= ρ₂|f|.
    /// In sampled mode: no counterexample found.
    bool verified = true;
    std::optional<BitVec> counterexample;
    std::uint64_t chains_checked = 0;
    /// Definitional form: every f outside B with |f| <= ρ₁|X(1)| has |∂f| >= ρ₂ d(f, B).
    /// Exhaustive mode only.
    bool definitional_verified = true;
    std::optional<BitVec> definitional_counterexample;
};

namespace detail {

inline void keep_smaller(std::optional<BitVec>& slot, const BitVec& v) {
    if (!slot || lex_less(v, *slot)) slot = v;
}

/// Materialised boundary space for repeated distance queries.
struct SmallCoset {
    explicit SmallCoset(const Subspace& b, std::uint64_t budget) : elements(b.elements(budget)) {}
    std::size_t distance(const BitVec& f, std::size_t cap) const {
        std::size_t best = cap;
        for (const auto& e : elements) {
            best = std::min(best, xor_weight(f, e));
            if (best == 0) break;
        }
        return best;
    }
    std::vector<BitVec> elements;
};

}  // namespace detail

inline ExpansionReport check_ss_expansion(const ChainComplex& x, const ExpansionParams& prm) {
    if (prm.rho1 < Rational(0) || prm.rho2 < Rational(0)) throw ParameterError("ρ₁ and ρ₂ must be nonnegative");
    ExpansionReport rep;
    rep.direction = prm.direction;
    rep.rho1 = prm.rho1;
    rep.rho2 = prm.rho2;
    rep.mode = prm.mode;
    const auto sp = direction_spaces(x, prm.direction);
    const std::size_t n = x.x1();
    const std::size_t max_w = std::min(n, floor_fraction(prm.rho1, n));
    const auto num = prm.rho2.numerator();
    const auto den = prm.rho2.denominator();
    // |∂f| >= ρ₂ k  <=>  |∂f| * den >= num * k
    auto expands = [&](std::size_t bd, std::size_t k) {
        return static_cast<std::int64_t>(bd) * den >= num * static_cast<std::int64_t>(k);
    };
    const std::size_t workers = std::max<std::size_t>(1, prm.threads);

    if (prm.mode == ExpansionMode::exhaustive) {
        require_budget(count_subsets_up_to(n, 1, max_w), prm.budget, "small-set expansion enumeration");
        const detail::SmallCoset coset(sp.boundaries, prm.budget);
        struct Partial {
            std::optional<BitVec> iso, def;
            std::uint64_t count = 0;
        };
        std::vector<Partial> parts(workers);
        run_workers(workers, [&](std::size_t wk) {
            auto& part = parts[wk];
            for (std::size_t lead = wk; lead < n; lead += workers) {
                for (std::size_t w = 1; w <= max_w && w <= n - lead; ++w) {
                    for_each_combination(n - lead - 1, w - 1, [&](const std::vector<std::size_t>& rest) {
                        BitVec f(n);
                        f.set(lead);
                        for (auto r : rest) f.set(lead + 1 + r);
                        ++part.count;
                        const std::size_t bd = sp.op.apply(f).weight();
                        const std::size_t d = coset.distance(f, w);
                        if (d > 0 && !expands(bd, d)) detail::keep_smaller(part.def, f);
                        if (d == w && !expands(bd, w)) detail::keep_smaller(part.iso, f);
                        return true;
                    });
                }
            }
        });
        for (const auto& p : parts) {
            rep.chains_checked += p.count;
            if (p.iso) detail::keep_smaller(rep.counterexample, *p.iso);
            if (p.def) detail::keep_smaller(rep.definitional_counterexample, *p.def);
        }
        rep.verified = !rep.counterexample;
        rep.definitional_verified = !rep.definitional_counterexample;
        return rep;
    }

    // Sampled: random chains, greedily reduced by boundary basis vectors, then
    // checked exactly before being reported.
    if (max_w == 0) return rep;
    std::vector<std::optional<BitVec>> found(workers);
    run_workers(workers, [&](std::size_t wk) {
        for (std::size_t i = wk; i < prm.samples; i += workers) {
            Rng rng(prm.seed, i);
            const std::size_t w = 1 + static_cast<std::size_t>(rng.below(max_w));
            BitVec f = BitVec::from_indices(n, rng.sample(n, w));
            bool improved = true;
            while (improved) {
                improved = false;
                for (const auto& b : sp.boundaries.basis().row_data()) {
                    if (xor_weight(f, b) < f.weight()) {
                        f ^= b;
                        improved = true;
                    }
                }
            }
            if (f.is_zero()) continue;
            const std::size_t bd = sp.op.apply(f).weight();
            if (expands(bd, f.weight())) continue;
            try {
                if (coset_min_weight(f, sp.boundaries, prm.budget) != f.weight()) continue;
            } catch (const ResourceError&) {
                continue;
            }
            detail::keep_smaller(found[wk], f);
        }
    });
    for (const auto& f : found) {
        if (f) detail::keep_smaller(rep.counterexample, *f);
    }
    rep.chains_checked = prm.samples;
    rep.verified = !rep.counterexample;
    rep.definitional_verified = rep.verified;
    return rep;
}

/// min |∂f| / d(f, B) over f outside B with |f| <= max_weight; empty if no such f.
inline std::optional<Rational> expansion_ratio(const ChainComplex& x, Direction dir, std::size_t max_weight,
                                               std::uint64_t budget = kDefaultBudget) {
    const auto sp = direction_spaces(x, dir);
    const std::size_t n = x.x1();
    max_weight = std::min(max_weight, n);
    require_budget(count_subsets_up_to(n, 1, max_weight), budget, "expansion ratio enumeration");
    const detail::SmallCoset coset(sp.boundaries, budget);
    std::optional<Rational> best;
    for (std::size_t w = 1; w <= max_weight; ++w) {
        for_each_combination(n, w, [&](const std::vector<std::size_t>& idx) {
            const auto f = BitVec::from_indices(n, idx);
            const auto d = coset.distance(f, w);
            if (d == 0) return true;
            const Rational r(static_cast<std::int64_t>(sp.op.apply(f).weight()), static_cast<std::int64_t>(d));
            if (!best || r < *best) best = r;
            return true;
        });
    }
    return best;
}

struct TheoremConstants {
    double rho1;
    double rho2;
};

/// ρ₁ = δ / (6 Δ^{3/2+ε}), ρ₂ = 56 / Δ^{3-2ε}.
inline TheoremConstants theorem_constants(const Rational& delta, std::size_t big_delta, const Rational& eps) {
    const double d = boost::rational_cast<double>(delta);
    const double e = boost::rational_cast<double>(eps);
    const double D = static_cast<double>(big_delta);
    return {d / (6.0 * std::pow(D, 1.5 + e)), 56.0 / std::pow(D, 3.0 - 2.0 * e)};
}

/// "chain3 <x0> <x1> <x2>" followed by ∂₁ and ∂₂ as f2mat blocks.
inline void write_chain3(std::ostream& os, const ChainComplex& x) {
    os << "chain3 " << x.x0() << ' ' << x.x1() << ' ' << x.x2() << '\n';
    write_f2mat(os, x.d1());
    write_f2mat(os, x.d2());
}

inline std::string to_chain3_text(const ChainComplex& x) {
    std::ostringstream os;
    write_chain3(os, x);
    return os.str();
}

/// Reads the two matrices without validating the chain property.
inline std::pair<BitMatrix, BitMatrix> read_chain3_matrices(LineReader& in) {
    const auto tok = split_ws(in.next("chain3 header"));
    if (tok.size() != 4 || tok[0] != "chain3") throw ParseError(in.line(), "expected 'chain3 <x0> <x1> <x2>'");
    const auto x0 = parse_count(tok[1], in.line());
    const auto x1 = parse_count(tok[2], in.line());
    const auto x2 = parse_count(tok[3], in.line());
    auto d1 = read_f2mat(in);
    if (d1.rows() != x0 || d1.cols() != x1) throw ParseError(in.line(), "∂₁ shape does not match header");
    auto d2 = read_f2mat(in);
    if (d2.rows() != x1 || d2.cols() != x2) throw ParseError(in.line(), "∂₂ shape does not match header");
    return {std::move(d1), std::move(d2)};
}

inline ChainComplex read_chain3(LineReader& in, bool allow_degenerate = false) {
    auto [d1, d2] = read_chain3_matrices(in);
    return ChainComplex(std::move(d1), std::move(d2), allow_degenerate);
}

inline ChainComplex parse_chain3(const std::string& text, bool allow_degenerate = false) {
    std::istringstream is(text);
    LineReader in(is);
    return read_chain3(in, allow_degenerate);
}

}  // namespace sshdx
