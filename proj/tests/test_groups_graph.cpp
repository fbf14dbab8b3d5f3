#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"

using namespace sshdx;

TEST(Groups, OrdersAndAxioms) {
    EXPECT_EQ(cyclic_group(6).order(), 6u);
    EXPECT_EQ(psl2(3).order(), 12u);
    EXPECT_EQ(psl2(5).order(), 60u);
    EXPECT_EQ(psl2(7).order(), 168u);
    EXPECT_THROW(psl2(4), ParameterError);
    EXPECT_THROW(psl2(2), ParameterError);
    EXPECT_THROW(cyclic_group(0), ParameterError);

    const auto g = psl2(5);
    for (std::size_t x = 0; x < g.order(); ++x) {
        EXPECT_EQ(g.mul(x, g.inv(x)), g.id());
        EXPECT_EQ(g.mul(g.id(), x), x);
    }
    // A5 has elements of orders 1, 2, 3, 5 only, with 1 + 15 + 20 + 24 elements
    std::map<std::size_t, std::size_t> by_order;
    for (std::size_t x = 0; x < g.order(); ++x) ++by_order[g.element_order(x)];
    EXPECT_EQ(by_order, (std::map<std::size_t, std::size_t>{{1, 1}, {2, 15}, {3, 20}, {5, 24}}));
}

TEST(Groups, RejectsBrokenTables) {
    // Z3 with one entry changed
    std::vector<std::size_t> t{0, 1, 2, 1, 2, 0, 2, 0, 1};
    EXPECT_NO_THROW(GroupTable(3, t));
    t[4] = 1;
    EXPECT_THROW(GroupTable(3, t), ParameterError);
    EXPECT_THROW(GroupTable(3, {0, 1, 2}), ShapeError);
    // a Latin square that is not associative: x * y = -x - y mod 5 has no identity
    std::vector<std::size_t> q;
    for (std::size_t x = 0; x < 5; ++x)
        for (std::size_t y = 0; y < 5; ++y) q.push_back((10 - x - y) % 5);
    EXPECT_THROW(GroupTable(5, q), ParameterError);
}

TEST(Groups, TableFileRoundTrip) {
    const auto g = psl2(3);
    std::ostringstream os;
    write_group(os, g);
    EXPECT_EQ(parse_group(os.str()), g);
    EXPECT_THROW(parse_group("group 2\n0 1\n"), ParseError);
    EXPECT_THROW(parse_group("group 2\n0 1\n1 1\n"), ParseError);
}

TEST(Cayley, CycleSpectrum) {
    const auto g = cyclic_group(6);
    const auto cay = cayley_graph(g, {1, 5}, Side::left);
    EXPECT_EQ(cay.regular_degree(), 2u);
    EXPECT_EQ(cay.edge_count(), 6u);
    // eigenvalues of C_n are 2 cos(2 pi k / n)
    std::vector<double> expect;
    for (int k = 0; k < 6; ++k) expect.push_back(2.0 * std::cos(2.0 * std::numbers::pi * k / 6.0));
    std::sort(expect.begin(), expect.end());
    const auto ev = spectrum(cay);
    ASSERT_EQ(ev.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-9);
    EXPECT_NEAR(spectral_lambda(cay), 2.0, 1e-9);
}

TEST(Cayley, CompleteGraphAndIdentityLoops) {
    Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    EXPECT_NEAR(spectral_lambda(k4), 1.0, 1e-9);

    // Z3 with S = G: a half-loop at every vertex plus both neighbours
    const auto cay = cayley_graph(cyclic_group(3), {0, 1, 2}, Side::right);
    EXPECT_EQ(cay.regular_degree(), 3u);
    EXPECT_EQ(cay.adjacency()(0, 0), 1.0);
    EXPECT_NEAR(spectral_lambda(cay), 0.0, 1e-9);
}

TEST(Cayley, GeneratorValidation) {
    const auto g = cyclic_group(6);
    EXPECT_THROW(cayley_graph(g, {1}, Side::left), ParameterError);
    EXPECT_THROW(cayley_graph(g, {1, 5, 5}, Side::left), ParameterError);
    EXPECT_THROW(cayley_graph(g, {1, 7}, Side::left), ParameterError);
    EXPECT_THROW(spectral_lambda(Graph(3, {{0, 1}})), ParameterError);
}

TEST(Cayley, LeftAndRightAgreeOnAbelianGroups) {
    const auto g = cyclic_group(10);
    const auto l = cayley_graph(g, {1, 9, 2, 8}, Side::left);
    const auto r = cayley_graph(g, {1, 9, 2, 8}, Side::right);
    EXPECT_EQ(l.adjacency(), r.adjacency());
}

TEST(ExpanderMixing, SlackIsNonNegativeOnRandomSets) {
    const auto f = fx::a5_delta4();
    const auto cay = cayley_graph(f.group, f.a, Side::left);
    ASSERT_EQ(cay.regular_degree(), 4u);
    const auto cover = cay.double_cover();
    EXPECT_EQ(cover.regular_degree(), 4u);
    Rng rng(29);
    const std::size_t n = cay.vertex_count();
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = rng.sample(n, 1 + rng.below(n));
        const auto t = rng.sample(n, 1 + rng.below(n));
        EXPECT_GE(expander_mixing_slack(cay, s, t, false), -1e-9);
        std::vector<std::size_t> t_cover;
        for (auto v : t) t_cover.push_back(v + n);
        EXPECT_GE(expander_mixing_slack(cay, s, t_cover, true), -1e-9);
        // cover edges from S to T' equal base adjacency counts
        EXPECT_EQ(cover.count_between(s, t_cover), cay.count_between(s, t));
    }
    EXPECT_THROW(expander_mixing_slack(cay, {0}, {1}, true), ParameterError);
}

TEST(ExpanderMixing, TightForFullVertexSet) {
    const auto cay = cayley_graph(cyclic_group(7), {1, 6}, Side::left);
    std::vector<std::size_t> all(7);
    std::iota(all.begin(), all.end(), 0);
    const double lambda = spectral_lambda(cay);
    // |E(V, V)| = d n, bound = d n + lambda n
    EXPECT_NEAR(expander_mixing_slack(cay, all, all, false), lambda * 7.0, 1e-9);
}
