#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace sshdx;

namespace {

ChainComplex triangle(bool with_face) {
    std::vector<std::vector<std::size_t>> faces;
    if (with_face) faces.push_back({0, 1, 2});
    return from_two_cells(3, {{0, 1}, {1, 2}, {0, 2}}, faces, !with_face);
}

ExpansionParams params(Rational r1, Rational r2, Direction dir) {
    ExpansionParams p;
    p.rho1 = r1;
    p.rho2 = r2;
    p.direction = dir;
    return p;
}

oracle::Expansion brute(const ChainComplex& x, Direction dir, Rational r1, Rational r2) {
    const auto op = dir == Direction::boundary ? x.d1() : x.delta1();
    const auto b_gens = dir == Direction::boundary ? fx::to_mat(x.d2().transpose()).data : fx::to_mat(x.d1()).data;
    return oracle::expansion(fx::to_mat(op), oracle::span(b_gens), x.x1(), r1.numerator(), r1.denominator(),
                             r2.numerator(), r2.denominator());
}

const std::vector<Rational> kRho1{{1, 10}, {1, 5}, {1, 3}, {1, 2}, {1}};
const std::vector<Rational> kRho2{{1, 5}, {1, 2}, {1}, {3, 2}, {3}};

}  // namespace

TEST(Expansion, ZeroRho2AlwaysHolds) {
    const auto x = triangle(false);
    const auto rep = check_ss_expansion(x, params(1, 0, Direction::coboundary));
    EXPECT_TRUE(rep.verified);
    EXPECT_TRUE(rep.definitional_verified);
}

TEST(Expansion, TriangleWithFaceMatchesBruteForce) {
    const auto x = triangle(true);
    for (const auto& r2 : kRho2) {
        const auto rep = check_ss_expansion(x, params(1, r2, Direction::boundary));
        const auto o = brute(x, Direction::boundary, 1, r2);
        EXPECT_EQ(rep.verified, o.isoperimetric);
        EXPECT_EQ(rep.definitional_verified, o.definitional);
        EXPECT_EQ(rep.chains_checked, 7u);
    }
}

TEST(Expansion, PlantedCocycleIsReported) {
    const auto x = triangle(false);
    const auto rep = check_ss_expansion(x, params(Rational(1, 2), 1, Direction::coboundary));
    EXPECT_FALSE(rep.verified);
    ASSERT_TRUE(rep.counterexample);
    // weight-1 chains are all minimal cocycles; 001 is lexicographically first
    EXPECT_EQ(rep.counterexample->to_string(), "001");
    EXPECT_TRUE(is_minimal(x, *rep.counterexample, Direction::coboundary));
    EXPECT_TRUE(x.delta1().apply(*rep.counterexample).is_zero());
}

TEST(Expansion, CheegerConstantOfK4) {
    Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    // min over proper nonempty S of |E(S, V \ S)| / min(|S|, |V \ S|), by enumeration
    Rational cheeger(100);
    for (unsigned s = 1; s < 15; ++s) {
        std::size_t cut = 0;
        for (auto [u, v] : k4.edges()) cut += (((s >> u) & 1u) != ((s >> v) & 1u)) ? 1 : 0;
        const auto size = static_cast<std::int64_t>(std::popcount(s));
        cheeger = std::min(cheeger, Rational(static_cast<std::int64_t>(cut), std::min(size, 4 - size)));
    }
    ASSERT_EQ(cheeger, Rational(2));
    const auto ratio = expansion_ratio(from_graph(k4), Direction::coboundary, 4);
    ASSERT_TRUE(ratio);
    EXPECT_EQ(*ratio, cheeger);
}

TEST(Expansion, ReportedCounterexamplesReVerify) {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = fx::random_complex(rng, 1 + rng.below(5), 3 + rng.below(8), 1 + rng.below(3));
        for (auto dir : {Direction::boundary, Direction::coboundary}) {
            const auto prm = params(Rational(1, 2), Rational(3, 2), dir);
            const auto rep = check_ss_expansion(x, prm);
            if (!rep.counterexample) continue;
            const auto& f = *rep.counterexample;
            const auto sp = direction_spaces(x, dir);
            EXPECT_TRUE(at_most_fraction(f.weight(), prm.rho1, x.x1()));
            EXPECT_TRUE(is_minimal(x, f, dir));
            EXPECT_LT(Rational(static_cast<std::int64_t>(sp.op.apply(f).weight())),
                      prm.rho2 * static_cast<std::int64_t>(f.weight()));
        }
    }
}

TEST(Expansion, ExhaustiveVerdictsMatchBruteForceOnGrid) {
    Rng rng(43);
    for (int trial = 0; trial < 25; ++trial) {
        const auto x = fx::random_complex(rng, 1 + rng.below(6), 3 + rng.below(9), 1 + rng.below(4));
        for (auto dir : {Direction::boundary, Direction::coboundary}) {
            for (const auto& r1 : kRho1) {
                for (const auto& r2 : kRho2) {
                    const auto rep = check_ss_expansion(x, params(r1, r2, dir));
                    const auto o = brute(x, dir, r1, r2);
                    ASSERT_EQ(rep.verified, o.isoperimetric);
                    ASSERT_EQ(rep.definitional_verified, o.definitional);
                    ASSERT_EQ(rep.verified, rep.definitional_verified);
                }
            }
        }
    }
}

TEST(Expansion, ThreadCountDoesNotChangeReports) {
    Rng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = fx::random_complex(rng, 3, 10, 2);
        auto p = params(Rational(1, 2), Rational(3, 2), Direction::coboundary);
        const auto a = check_ss_expansion(x, p);
        p.threads = 3;
        const auto b = check_ss_expansion(x, p);
        EXPECT_EQ(a.verified, b.verified);
        EXPECT_EQ(a.chains_checked, b.chains_checked);
        EXPECT_EQ(a.counterexample.has_value(), b.counterexample.has_value());
        if (a.counterexample) EXPECT_EQ(*a.counterexample, *b.counterexample);
        p.mode = ExpansionMode::sampled;
        p.samples = 300;
        p.threads = 1;
        const auto c = check_ss_expansion(x, p);
        p.threads = 4;
        const auto d = check_ss_expansion(x, p);
        EXPECT_EQ(c.counterexample.has_value(), d.counterexample.has_value());
        if (c.counterexample) EXPECT_EQ(*c.counterexample, *d.counterexample);
    }
}

TEST(Expansion, LargeDistanceFollowsFromExpansion) {
    Rng rng(53);
    std::size_t exercised = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto x = fx::random_complex(rng, 1 + rng.below(6), 3 + rng.below(9), 1 + rng.below(4));
        for (auto dir : {Direction::boundary, Direction::coboundary}) {
            const auto sp = direction_spaces(x, dir);
            if (sp.cycles.dim() == sp.boundaries.dim()) continue;
            const auto dist = min_nontrivial_weight(sp, kDefaultBudget).weight;
            for (const auto& r1 : kRho1) {
                for (const auto& r2 : kRho2) {
                    if (!check_ss_expansion(x, params(r1, r2, dir)).verified) continue;
                    ++exercised;
                    EXPECT_FALSE(at_most_fraction(dist, r1, x.x1()));
                }
            }
        }
    }
    EXPECT_GT(exercised, 0u);
}

TEST(Expansion, SampledModeNeverInventsCounterexamples) {
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = fx::random_complex(rng, 1 + rng.below(5), 4 + rng.below(8), 1 + rng.below(3));
        auto p = params(Rational(1, 2), Rational(1), Direction::coboundary);
        p.mode = ExpansionMode::sampled;
        p.samples = 200;
        const auto rep = check_ss_expansion(x, p);
        if (rep.counterexample) {
            EXPECT_TRUE(is_minimal(x, *rep.counterexample, p.direction));
            p.mode = ExpansionMode::exhaustive;
            EXPECT_FALSE(check_ss_expansion(x, p).verified);
        }
    }
}

TEST(Expansion, BudgetAndParameters) {
    const auto x = fx::build_chain(fx::z10_delta4());
    auto p = params(1, 1, Direction::coboundary);
    p.budget = 1000;
    EXPECT_THROW(check_ss_expansion(x, p), ResourceError);
    EXPECT_THROW(check_ss_expansion(x, params(-1, 1, Direction::coboundary)), ParameterError);
}

TEST(Expansion, TheoremConstants) {
    // δ / (6 Δ^{3/2+ε}) and 56 / Δ^{3-2ε} at δ = 1/4, Δ = 4, ε = 1/2
    const auto c = theorem_constants(Rational(1, 4), 4, Rational(1, 2));
    EXPECT_NEAR(c.rho1, 0.25 / (6.0 * 16.0), 1e-15);
    EXPECT_NEAR(c.rho2, 56.0 / 16.0, 1e-12);
}
