#pragma once

// Double cover of the left-right Cayley complex: vertices G x {0, 1}, A-edges
// {(g,0),(ag,1)}, B-edges {(g,0),(gb,1)}, squares {(g,0),(ag,1),(gb,1),(agb,0)}.

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sshdx/bits.hpp"
#include "sshdx/error.hpp"
#include "sshdx/graph.hpp"
#include "sshdx/groups.hpp"

namespace sshdx {

struct ConjugacyWitness {
    std::size_t a, b, g;  // a g = g b
};

inline std::optional<ConjugacyWitness> find_conjugacy_witness(const GroupTable& g, const std::vector<std::size_t>& a,
                                                              const std::vector<std::size_t>& b) {
    for (auto x : a) {
        for (auto y : b) {
            for (std::size_t h = 0; h < g.order(); ++h) {
                if (g.mul(x, h) == g.mul(h, y)) return ConjugacyWitness{x, y, h};
            }
        }
    }
    return std::nullopt;
}

/// a g != g b for all a in A, b in B, g in G.
inline bool check_total_no_conjugacy(const GroupTable& g, const std::vector<std::size_t>& a,
                                     const std::vector<std::size_t>& b) {
    return !find_conjugacy_witness(g, a, b).has_value();
}

/// Square through (g,0) with left generator a and right generator b. Vertex fields
/// are group elements; the side is implied by the field.
struct Square {
    std::size_t g, a, b;      // canonical triple
    std::size_t ag, gb, agb;  // ag, gb on side 1; g, agb on side 0

    bool operator==(const Square&) const = default;
};

class LeftRightCayleyComplex {
public:
    std::size_t group_order() const noexcept { return order_; }
    std::size_t delta() const noexcept { return gens_a_.size(); }
    std::size_t vertex_count() const noexcept { return 2 * order_; }
    /// Vertex (g, i) has index g + i * |G|.
    std::size_t vertex(std::size_t g, std::size_t side) const noexcept { return g + side * order_; }

    const std::vector<std::size_t>& gens_a() const noexcept { return gens_a_; }
    const std::vector<std::size_t>& gens_b() const noexcept { return gens_b_; }
    /// Index of the inverse generator within gens_a / gens_b.
    const std::vector<std::size_t>& inverse_a() const noexcept { return inv_a_; }
    const std::vector<std::size_t>& inverse_b() const noexcept { return inv_b_; }

    const std::vector<Square>& squares() const noexcept { return squares_; }
    std::size_t square_count() const noexcept { return squares_.size(); }

    /// (g, a, ag) and (g, b, gb) as group elements.
    const std::vector<std::array<std::size_t, 3>>& edges_a() const noexcept { return edges_a_; }
    const std::vector<std::array<std::size_t, 3>>& edges_b() const noexcept { return edges_b_; }

    /// The group, when the complex was built from one (null after loading a dump).
    const std::shared_ptr<const GroupTable>& group() const noexcept { return group_; }

    /// Square ids seen from vertex (v, side), indexed by (ia, ib) -> ia * Δ + ib.
    std::vector<std::size_t> local_view(std::size_t side, std::size_t v) const {
        const std::size_t d2 = delta() * delta();
        const auto first = views_[side].begin() + static_cast<std::ptrdiff_t>(v * d2);
        return {first, first + static_cast<std::ptrdiff_t>(d2)};
    }

    /// G_i^□ on G: one edge per square, edge index = square index. Side 0 joins
    /// g and agb, side 1 joins ag and gb.
    Graph square_graph(std::size_t side) const {
        Graph out(order_);
        for (const auto& s : squares_) {
            if (side == 0) {
                out.add_edge(s.g, s.agb);
            } else {
                out.add_edge(s.ag, s.gb);
            }
        }
        return out;
    }

    /// Per-vertex view order for square_graph(side): the local view as edge ids.
    std::vector<std::vector<std::size_t>> view_order(std::size_t side) const {
        std::vector<std::vector<std::size_t>> out(order_);
        for (std::size_t v = 0; v < order_; ++v) out[v] = local_view(side, v);
        return out;
    }

    /// G^∪ = (V, E_A ∪ E_B), A-edges first.
    Graph union_graph() const {
        Graph out(vertex_count());
        for (const auto& e : edges_a_) out.add_edge(vertex(e[0], 0), vertex(e[2], 1));
        for (const auto& e : edges_b_) out.add_edge(vertex(e[0], 0), vertex(e[2], 1));
        return out;
    }

    friend LeftRightCayleyComplex build_lr_complex(const GroupTable&, const std::vector<std::size_t>&,
                                                   const std::vector<std::size_t>&);
    friend LeftRightCayleyComplex read_lr_complex(LineReader&);

private:
    std::size_t index_a(std::size_t a) const {
        return static_cast<std::size_t>(std::lower_bound(gens_a_.begin(), gens_a_.end(), a) - gens_a_.begin());
    }
    std::size_t index_b(std::size_t b) const {
        return static_cast<std::size_t>(std::lower_bound(gens_b_.begin(), gens_b_.end(), b) - gens_b_.begin());
    }

    /// Fills local views from the square list; each slot must be hit exactly once.
    void index_views() {
        const std::size_t d = delta();
        const std::size_t unset = squares_.size();
        for (auto& v : views_) v.assign(order_ * d * d, unset);
        auto put = [&](std::size_t side, std::size_t v, std::size_t ia, std::size_t ib, std::size_t s) {
            auto& slot = views_[side][v * d * d + ia * d + ib];
            if (slot != unset) {
                throw ConstructionError("square " + std::to_string(s) + " collides with square " +
                                        std::to_string(slot) + " in a local view");
            }
            slot = s;
        };
        for (std::size_t s = 0; s < squares_.size(); ++s) {
            const auto& q = squares_[s];
            const std::size_t ia = index_a(q.a);
            const std::size_t ib = index_b(q.b);
            put(0, q.g, ia, ib, s);
            put(0, q.agb, inv_a_[ia], inv_b_[ib], s);
            put(1, q.ag, inv_a_[ia], ib, s);
            put(1, q.gb, ia, inv_b_[ib], s);
        }
        for (const auto& v : views_) {
            if (std::find(v.begin(), v.end(), unset) != v.end()) {
                throw ConstructionError("some vertex is not incident to delta^2 squares");
            }
        }
    }

    std::shared_ptr<const GroupTable> group_;
    std::size_t order_ = 0;
    std::vector<std::size_t> gens_a_, gens_b_, inv_a_, inv_b_;
    std::vector<Square> squares_;
    std::vector<std::array<std::size_t, 3>> edges_a_, edges_b_;
    std::array<std::vector<std::size_t>, 2> views_;
};

namespace detail {

inline std::vector<std::size_t> checked_generators(const GroupTable& g, std::vector<std::size_t> s, const char* name) {
    for (auto x : s) g.check_element(x);
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw ParameterError(std::string("generator set ") + name + " has repeated elements");
    }
    if (!g.is_symmetric(s)) throw ParameterError(std::string("generator set ") + name + " is not closed under inverses");
    return s;
}

}  // namespace detail

inline LeftRightCayleyComplex build_lr_complex(const GroupTable& g, const std::vector<std::size_t>& a,
                                               const std::vector<std::size_t>& b) {
    LeftRightCayleyComplex cx;
    cx.gens_a_ = detail::checked_generators(g, a, "A");
    cx.gens_b_ = detail::checked_generators(g, b, "B");
    if (cx.gens_a_.size() != cx.gens_b_.size()) {
        throw ParameterError("|A| = " + std::to_string(a.size()) + " differs from |B| = " + std::to_string(b.size()));
    }
    if (cx.gens_a_.empty()) throw ParameterError("generator sets are empty");
    if (const auto w = find_conjugacy_witness(g, cx.gens_a_, cx.gens_b_)) {
        throw ConstructionError("total no-conjugacy fails: a=" + std::to_string(w->a) + " b=" + std::to_string(w->b) +
                                " g=" + std::to_string(w->g) + " satisfy ag = gb");
    }
    cx.group_ = std::make_shared<const GroupTable>(g);
    cx.order_ = g.order();
    for (auto x : cx.gens_a_) cx.inv_a_.push_back(cx.index_a(g.inv(x)));
    for (auto y : cx.gens_b_) cx.inv_b_.push_back(cx.index_b(g.inv(y)));

    for (std::size_t h = 0; h < g.order(); ++h) {
        for (auto x : cx.gens_a_) cx.edges_a_.push_back({h, x, g.mul(x, h)});
        for (auto y : cx.gens_b_) cx.edges_b_.push_back({h, y, g.mul(h, y)});
    }

    using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
    std::vector<Key> keys;
    for (std::size_t h = 0; h < g.order(); ++h) {
        for (auto x : cx.gens_a_) {
            for (auto y : cx.gens_b_) {
                const Key k1{h, x, y};
                const Key k2{g.mul(g.mul(x, h), y), g.inv(x), g.inv(y)};
                if (k1 < k2) keys.push_back(k1);
                if (k1 == k2) throw InternalError("square identified with itself despite total no-conjugacy");
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& [h, x, y] : keys) {
        cx.squares_.push_back({h, x, y, g.mul(x, h), g.mul(h, y), g.mul(g.mul(x, h), y)});
    }
    cx.index_views();
    return cx;
}

inline void write_lr_complex(std::ostream& os, const LeftRightCayleyComplex& cx) {
    auto list = [&](const char* tag, const std::vector<std::size_t>& v) {
        os << tag;
        for (auto x : v) os << ' ' << x;
        os << '\n';
    };
    os << "lrcomplex " << cx.group_order() << ' ' << cx.delta() << '\n';
    list("GENERATORS_A", cx.gens_a());
    list("INVERSES_A", cx.inverse_a());
    list("GENERATORS_B", cx.gens_b());
    list("INVERSES_B", cx.inverse_b());
    os << "VERTICES " << cx.vertex_count() << '\n';
    for (std::size_t side = 0; side < 2; ++side)
        for (std::size_t g = 0; g < cx.group_order(); ++g) os << g << ' ' << side << '\n';
    os << "EDGES_A " << cx.edges_a().size() << '\n';
    for (const auto& e : cx.edges_a()) os << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
    os << "EDGES_B " << cx.edges_b().size() << '\n';
    for (const auto& e : cx.edges_b()) os << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
    os << "SQUARES " << cx.square_count() << '\n';
    for (const auto& s : cx.squares()) {
        os << s.g << ' ' << s.a << ' ' << s.b << ' ' << s.ag << ' ' << s.gb << ' ' << s.agb << '\n';
    }
}

inline std::string to_lr_text(const LeftRightCayleyComplex& cx) {
    std::ostringstream os;
    write_lr_complex(os, cx);
    return os.str();
}

namespace detail {

inline std::vector<std::size_t> read_tagged_list(LineReader& in, const std::string& tag, std::size_t expected) {
    const auto tok = split_ws(in.next(tag));
    if (tok.empty() || tok[0] != tag) throw ParseError(in.line(), "expected " + tag);
    if (tok.size() != expected + 1) throw ParseError(in.line(), tag + " needs " + std::to_string(expected) + " entries");
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < tok.size(); ++i) out.push_back(parse_count(tok[i], in.line()));
    return out;
}

inline std::vector<std::vector<std::size_t>> read_section(LineReader& in, const std::string& tag, std::size_t width,
                                                          std::size_t bound) {
    const auto head = split_ws(in.next(tag));
    if (head.size() != 2 || head[0] != tag) throw ParseError(in.line(), "expected '" + tag + " <count>'");
    const auto n = parse_count(head[1], in.line());
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const auto tok = split_ws(in.next(tag + " entry"));
        if (tok.size() != width) throw ParseError(in.line(), tag + " entry needs " + std::to_string(width) + " fields");
        std::vector<std::size_t> row;
        for (const auto& t : tok) {
            row.push_back(parse_count(t, in.line()));
            if (row.back() >= bound) throw ParseError(in.line(), "value out of range");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Rebuilds a complex from its dump; the group table is not needed.
inline LeftRightCayleyComplex read_lr_complex(LineReader& in) {
    const auto head = split_ws(in.next("lrcomplex header"));
    if (head.size() != 3 || head[0] != "lrcomplex") throw ParseError(in.line(), "expected 'lrcomplex <order> <delta>'");
    LeftRightCayleyComplex cx;
    cx.order_ = parse_count(head[1], in.line());
    const auto d = parse_count(head[2], in.line());
    cx.gens_a_ = detail::read_tagged_list(in, "GENERATORS_A", d);
    cx.inv_a_ = detail::read_tagged_list(in, "INVERSES_A", d);
    cx.gens_b_ = detail::read_tagged_list(in, "GENERATORS_B", d);
    cx.inv_b_ = detail::read_tagged_list(in, "INVERSES_B", d);
    const std::size_t line = in.line();
    for (const auto* v : {&cx.gens_a_, &cx.gens_b_}) {
        if (!std::is_sorted(v->begin(), v->end())) throw ParseError(line, "generators must be sorted");
        for (auto x : *v)
            if (x >= cx.order_) throw ParseError(line, "generator out of range");
    }
    for (const auto* v : {&cx.inv_a_, &cx.inv_b_}) {
        for (auto x : *v)
            if (x >= d) throw ParseError(line, "inverse index out of range");
    }
    const auto verts = detail::read_section(in, "VERTICES", 2, cx.order_ < 2 ? 2 : cx.order_);
    if (verts.size() != 2 * cx.order_) throw ParseError(in.line(), "vertex count must be 2|G|");
    for (const auto& e : detail::read_section(in, "EDGES_A", 3, cx.order_)) cx.edges_a_.push_back({e[0], e[1], e[2]});
    for (const auto& e : detail::read_section(in, "EDGES_B", 3, cx.order_)) cx.edges_b_.push_back({e[0], e[1], e[2]});
    for (const auto& s : detail::read_section(in, "SQUARES", 6, cx.order_)) {
        if (!std::binary_search(cx.gens_a_.begin(), cx.gens_a_.end(), s[1]) ||
            !std::binary_search(cx.gens_b_.begin(), cx.gens_b_.end(), s[2])) {
            throw ParseError(in.line(), "square uses an unknown generator");
        }
        cx.squares_.push_back({s[0], s[1], s[2], s[3], s[4], s[5]});
    }
    try {
        cx.index_views();
    } catch (const ConstructionError& e) {
        throw ParseError(in.line(), e.what());
    }
    return cx;
}

inline LeftRightCayleyComplex parse_lr_complex(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    return read_lr_complex(in);
}

}  // namespace sshdx
