#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace sshdx;

namespace {

LinearCode code_of(const oracle::Words& space, std::size_t n) {
    const auto basis = oracle::basis_of(space);
    BitMatrix g(0, n);
    for (auto w : basis) g.append_row(BitVec::from_mask(n, w));
    return LinearCode::from_generator(g);
}

std::optional<std::size_t> finite(const Distance& d) {
    if (d.infinite()) return std::nullopt;
    return d.value();
}

LinearCode hamming_7_4() {
    return LinearCode::from_parity(BitMatrix::from_strings({"1010101", "0110011", "0001111"}));
}

}  // namespace

TEST(LinearCode, GeneratorAndParityAreOrthogonalAndFullRank) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const auto c = LinearCode::from_spanning(fx::random_matrix(rng, rng.below(n + 1), n));
        EXPECT_TRUE((c.generator() * c.parity().transpose()).is_zero());
        EXPECT_EQ(rank(c.generator()), c.dim());
        EXPECT_EQ(rank(c.parity()), n - c.dim());
        EXPECT_TRUE(same_code(dual(dual(c)), c));
    }
}

TEST(LinearCode, SmallExamples) {
    const auto rep3 = code_from_generator(BitMatrix::from_strings({"111"}));
    EXPECT_EQ(rep3.parity().rows(), 2u);
    EXPECT_EQ(distance(rep3).value(), 3u);
    EXPECT_EQ(LinearCode::full(3).parity().rows(), 0u);
    EXPECT_EQ(distance(LinearCode::full(3)).value(), 1u);
    EXPECT_TRUE(distance(LinearCode::zero(3)).infinite());
    EXPECT_THROW(code_from_generator(BitMatrix::from_strings({"110", "110"})), DegenerateError);

    // kernel of the generator image by enumeration: only 111 is orthogonal to 101 and 011
    const auto c = code_from_generator(BitMatrix::from_strings({"101", "011"}));
    const auto orth = oracle::dual(oracle::span({0b101, 0b110}), 3);
    ASSERT_EQ(orth, (oracle::Words{0, 0b111}));
    EXPECT_EQ(c.parity(), BitMatrix::from_strings({"111"}));

    EXPECT_EQ(distance(hamming_7_4()).value(), *oracle::min_weight(fx::words_of(hamming_7_4())));
    EXPECT_EQ(distance(hamming_7_4()).value(), 3u);
    EXPECT_EQ(hamming_7_4().dim(), 4u);
}

TEST(LinearCode, DualExamples) {
    EXPECT_TRUE(same_code(dual(LinearCode::repetition(3)), fx::even_weight(3)));
    EXPECT_EQ(dual(LinearCode::repetition(3)).dim(), 2u);
    EXPECT_EQ(dual(LinearCode::full(3)).dim(), 0u);
    const auto rep2 = LinearCode::repetition(2);
    ASSERT_EQ(oracle::dual(fx::words_of(rep2), 2), fx::words_of(rep2));
    EXPECT_TRUE(same_code(dual(rep2), rep2));
}

TEST(LinearCode, DistanceBudget) {
    EXPECT_THROW(distance(LinearCode::full(30), 1000), ResourceError);
}

TEST(TensorCodes, FrozenExamples) {
    const auto rep2 = LinearCode::repetition(2);
    // the only nonzero word of rep (x) rep is 1111
    ASSERT_EQ(oracle::tensor({0b11}, {0b11}, 2), (oracle::Words{0, 0b1111}));
    const auto t = tensor_code(rep2, rep2);
    EXPECT_EQ(t.dim(), 1u);
    EXPECT_EQ(distance(t).value(), 4u);

    const auto t2 = tensor_code(LinearCode::full(2), rep2);
    ASSERT_EQ(*oracle::min_weight(oracle::tensor({0b01, 0b10}, {0b11}, 2)), 2u);
    EXPECT_EQ(t2.dim(), 2u);
    EXPECT_EQ(distance(t2).value(), 2u);
    EXPECT_EQ(tensor_code(LinearCode::zero(2), rep2).dim(), 0u);

    const auto dt = dual_tensor_code(rep2, rep2);
    const auto odt = oracle::dual_tensor({0b11}, {0b11}, 2);
    ASSERT_EQ(odt.size(), 8u);
    ASSERT_EQ(*oracle::min_weight(odt), 2u);
    EXPECT_EQ(dt.dim(), 3u);
    EXPECT_EQ(distance(dt.code()).value(), 2u);
    EXPECT_EQ(dual_tensor_code(LinearCode::full(2), LinearCode::full(2)).dim(), 4u);
    EXPECT_THROW(dual_tensor_code(rep2, LinearCode::repetition(3)), ShapeError);
}

// Formulas for dimensions and distances, and the dual description, against
// enumeration for every pair of codes up to length 3; length 4 runs in acceptance.
TEST(TensorCodes, FormulasHoldForAllSmallPairs) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto spaces = oracle::all_subspaces(n);
        for (const auto& sa : spaces) {
            for (const auto& sb : spaces) {
                const auto ca = code_of(sa, n);
                const auto cb = code_of(sb, n);
                const auto ka = ca.dim(), kb = cb.dim();
                const auto da = oracle::min_weight(sa), db = oracle::min_weight(sb);

                const auto t = tensor_code(ca, cb);
                const auto ot = oracle::tensor(sa, sb, n);
                EXPECT_EQ(t.dim(), oracle::dim(ot));
                EXPECT_EQ(t.dim(), ka * kb);
                const auto dt_formula = (da && db) ? std::optional<std::size_t>(*da * *db) : std::nullopt;
                EXPECT_EQ(oracle::min_weight(ot), dt_formula);
                EXPECT_EQ(finite(distance(t)), dt_formula);

                const auto dt = dual_tensor_code(ca, cb);
                const auto odt = oracle::dual_tensor(sa, sb, n);
                EXPECT_EQ(dt.dim(), oracle::dim(odt));
                EXPECT_EQ(dt.dim(), n * ka + n * kb - ka * kb);
                std::optional<std::size_t> min_formula = da;
                if (db && (!min_formula || *db < *min_formula)) min_formula = db;
                EXPECT_EQ(oracle::min_weight(odt), min_formula);
                EXPECT_EQ(finite(distance(dt.code())), min_formula);

                const auto via_dual = dual(tensor_code(dual(ca), dual(cb)));
                EXPECT_TRUE(same_code(via_dual, dt.code()));
                for (oracle::Word w = 0; w < (oracle::Word{1} << (n * n)); ++w) {
                    const bool in = std::binary_search(odt.begin(), odt.end(), w);
                    EXPECT_EQ(dt.contains(BitVec::from_mask(n * n, w)), in);
                }
            }
        }
    }
}

TEST(Robustness, TrivialCases) {
    const auto rep2 = LinearCode::repetition(2);
    const auto dt = dual_tensor_code(rep2, rep2);
    EXPECT_TRUE(is_w_robust(dt, 1).holds);
    EXPECT_TRUE(is_w_robust(dt, 2).holds);
    EXPECT_EQ(is_puncture_resistant(dt, 3, 0).holds, is_w_robust(dt, 3).holds);
}

TEST(Robustness, MatchesIndependentSearchUpToLengthThree) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto spaces = oracle::all_subspaces(n);
        for (const auto& sa : spaces) {
            for (const auto& sb : spaces) {
                const auto dt = dual_tensor_code(code_of(sa, n), code_of(sb, n));
                const auto words = oracle::dual_tensor(sa, sb, n);
                for (std::size_t w = 1; w <= n * n + 1; ++w) {
                    const auto rep = is_w_robust(dt, w);
                    ASSERT_EQ(rep.holds, oracle::robust(words, sa, sb, n, w)) << "n=" << n << " w=" << w;
                    if (!rep.holds) {
                        ASSERT_TRUE(rep.witness);
                        const auto c = rep.witness->codeword.to_mask();
                        EXPECT_TRUE(dt.contains(rep.witness->codeword));
                        EXPECT_LT(oracle::weight(c), w);
                        EXPECT_FALSE(oracle::robust({c}, sa, sb, n, w));
                    }
                }
                for (std::size_t p = 0; p <= 1; ++p) {
                    for (std::size_t w : {2u, 3u, 4u}) {
                        EXPECT_EQ(is_puncture_resistant(dt, w, p).holds, oracle::puncture_resistant(sa, sb, n, w, p));
                    }
                }
            }
        }
    }
}

TEST(Robustness, RepetitionLengthThreeWithOnePuncture) {
    const auto rep3 = LinearCode::repetition(3);
    const auto dt = dual_tensor_code(rep3, rep3);
    const auto s = fx::words_of(rep3);
    EXPECT_EQ(is_puncture_resistant(dt, 2, 1).holds, oracle::puncture_resistant(s, s, 3, 2, 1));
}

// A pair that is robust as is but loses robustness after deleting one row and column.
// no length-3 pair loses robustness under one puncture; length 4 has such pairs
TEST(Robustness, SomePunctureBreaksRobustness) {
    bool found = false;
    const auto spaces = oracle::all_subspaces(4);
    for (std::size_t i = 0; i < spaces.size() && !found; ++i) {
        for (std::size_t j = 0; j < spaces.size() && !found; ++j) {
            const auto& sa = spaces[i];
            const auto& sb = spaces[j];
            const auto dt = dual_tensor_code(code_of(sa, 4), code_of(sb, 4));
            for (std::size_t w = 2; w <= 16 && !found; ++w) {
                if (!is_w_robust(dt, w).holds) continue;
                const auto rep = is_puncture_resistant(dt, w, 1);
                if (rep.holds) continue;
                ASSERT_TRUE(rep.witness);
                EXPECT_EQ(rep.witness->removed_rows.size(), 1u);
                EXPECT_EQ(rep.witness->removed_cols.size(), 1u);
                EXPECT_TRUE(oracle::robust(oracle::dual_tensor(sa, sb, 4), sa, sb, 4, w));
                EXPECT_FALSE(oracle::puncture_resistant(sa, sb, 4, w, 1));
                found = true;
            }
        }
    }
    EXPECT_TRUE(found);
}

TEST(Robustness, VerdictIsStableUnderCoordinatePermutations) {
    Rng rng(23);
    const std::size_t n = 4;
    auto permute = [&](const LinearCode& c, const std::vector<std::size_t>& perm) {
        BitMatrix g(0, n);
        for (const auto& r : c.generator().row_data()) {
            BitVec v(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (r.get(i)) v.set(perm[i]);
            }
            g.append_row(v);
        }
        return LinearCode::from_generator(g);
    };
    for (int trial = 0; trial < 40; ++trial) {
        const auto ca = LinearCode::from_spanning(fx::random_matrix(rng, rng.below(3), n));
        const auto cb = LinearCode::from_spanning(fx::random_matrix(rng, rng.below(3), n));
        const auto pa = rng.sample(n, n);
        const auto pb = rng.sample(n, n);
        for (std::size_t w : {2u, 3u, 5u}) {
            EXPECT_EQ(is_w_robust(dual_tensor_code(ca, cb), w).holds,
                      is_w_robust(dual_tensor_code(permute(ca, pa), permute(cb, pb)), w).holds);
        }
    }
}

TEST(BaseCodes, SearchPreconditions) {
    BaseCodeSearchParams prm;
    prm.delta_len = 4;
    prm.r = Rational(1, 8);
    EXPECT_THROW(search_base_codes(prm), ParameterError);
    prm.r = Rational(1, 2);
    EXPECT_THROW(search_base_codes(prm), ParameterError);
    prm.r = Rational(1, 4);
    prm.trials = 0;
    EXPECT_FALSE(search_base_codes(prm));
}

TEST(BaseCodes, ReturnedPairsRePassEveryCondition) {
    for (std::size_t big_delta : {4u, 6u}) {
        BaseCodeSearchParams prm;
        prm.delta_len = big_delta;
        prm.r = Rational(49, 100);
        prm.delta = Rational(1, 4);
        prm.w = 2;
        prm.p = 0;
        prm.trials = 40;
        prm.seed = 5;
        const auto found = search_base_codes(prm);
        if (!found) continue;
        const auto& ca = found->code_a;
        const auto& cb = found->code_b;
        const std::size_t ka = floor_fraction(prm.r, big_delta);
        EXPECT_EQ(ca.dim(), ka);
        EXPECT_EQ(cb.dim(), big_delta - ka);
        for (const auto& c : {ca, cb, dual(ca), dual(cb)}) {
            const auto d = oracle::min_weight(fx::words_of(c));
            ASSERT_TRUE(d);
            EXPECT_GE(Rational(static_cast<std::int64_t>(*d)), prm.delta * static_cast<std::int64_t>(big_delta));
        }
        const auto wa = fx::words_of(ca), wb = fx::words_of(cb);
        const auto wda = fx::words_of(dual(ca)), wdb = fx::words_of(dual(cb));
        EXPECT_TRUE(oracle::puncture_resistant(wa, wb, big_delta, prm.w, prm.p));
        EXPECT_TRUE(oracle::puncture_resistant(wda, wdb, big_delta, prm.w, prm.p));
    }
}

TEST(BaseCodes, SearchIsDeterministicPerSeed) {
    BaseCodeSearchParams prm;
    prm.delta_len = 6;
    prm.r = Rational(1, 3);
    prm.delta = Rational(1, 6);
    prm.trials = 30;
    prm.seed = 9;
    const auto a = search_base_codes(prm);
    const auto b = search_base_codes(prm);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
        EXPECT_EQ(a->trial, b->trial);
        EXPECT_EQ(a->code_a.generator(), b->code_a.generator());
        EXPECT_EQ(a->code_b.generator(), b->code_b.generator());
    }
}

TEST(BaseCodes, CodeFileRoundTrip) {
    const auto c = hamming_7_4();
    const auto text = to_code_text(c);
    EXPECT_EQ(to_code_text(parse_code(text)), text);
    EXPECT_THROW(parse_code("f2code 3 2\nf2mat 1 3\n111\n"), ParseError);
    EXPECT_THROW(parse_code("f2code 3 2\nf2mat 2 3\n110\n110\n"), ParseError);
}
