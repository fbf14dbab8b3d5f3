#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace sshdx;

TEST(BitVec, StringRoundTripAndWeight) {
    const auto v = BitVec::from_string("0110100");
    EXPECT_EQ(v.size(), 7u);
    EXPECT_EQ(v.weight(), 3u);
    EXPECT_EQ(v.to_string(), "0110100");
    EXPECT_EQ(v.support(), (std::vector<std::size_t>{1, 2, 4}));
    EXPECT_EQ(v.first_one(), 1u);
    EXPECT_THROW(BitVec::from_string("01a"), Error);
}

TEST(BitVec, LexOrderPutsCoordinateZeroFirst) {
    EXPECT_TRUE(lex_less(BitVec::from_string("0111"), BitVec::from_string("1000")));
    EXPECT_FALSE(lex_less(BitVec::from_string("1000"), BitVec::from_string("0111")));
    EXPECT_FALSE(lex_less(BitVec::from_string("0101"), BitVec::from_string("0101")));
    EXPECT_TRUE(lex_less(BitVec::from_string("0100"), BitVec::from_string("0101")));
}

TEST(BitVec, WideVectorsCrossWordBoundary) {
    BitVec v(130);
    v.set(0);
    v.set(64);
    v.set(129);
    EXPECT_EQ(v.weight(), 3u);
    EXPECT_EQ(v.support(), (std::vector<std::size_t>{0, 64, 129}));
    BitVec u(130);
    u.set(64);
    EXPECT_FALSE(v.dot(u) == false);
    v ^= u;
    EXPECT_EQ(v.weight(), 2u);
    EXPECT_EQ(BitVec::from_string(v.to_string()), v);
}

TEST(BitMatrix, ProductMatchesOracle) {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = fx::random_matrix(rng, 1 + rng.below(6), 1 + rng.below(6));
        const auto b = fx::random_matrix(rng, a.cols(), 1 + rng.below(6));
        const auto c = a * b;
        const auto oa = fx::to_mat(a);
        const auto ob = fx::to_mat(b);
        for (std::size_t col = 0; col < b.cols(); ++col) {
            const auto bcol = ob.columns()[col];
            const auto expect = oa.apply(bcol);
            EXPECT_EQ(fx::to_mat(c).columns()[col], expect);
        }
        EXPECT_EQ(a.transpose().transpose(), a);
    }
}

TEST(F2Mat, RoundTripAndStrictParsing) {
    const auto m = BitMatrix::from_strings({"101", "011"});
    const auto text = to_f2mat(m);
    EXPECT_EQ(parse_f2mat(text), m);
    EXPECT_EQ(to_f2mat(parse_f2mat(text)), text);
    EXPECT_THROW(parse_f2mat("f2mat 2 3\n101\n"), ParseError);
    EXPECT_THROW(parse_f2mat("f2mat 1 3\n101"), ParseError);
    EXPECT_THROW(parse_f2mat("f2mat 1 3\r\n101\r\n"), ParseError);
    EXPECT_THROW(parse_f2mat("f2mat 1 3\n1x1\n"), ParseError);
    try {
        parse_f2mat("f2mat 2 3\n101\n01\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Linalg, RankKernelImageAgainstEnumeration) {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = fx::random_matrix(rng, 1 + rng.below(8), 1 + rng.below(10));
        const auto om = fx::to_mat(m);
        const auto row_space = oracle::span(om.data);
        EXPECT_EQ(rank(m), oracle::dim(row_space));

        const auto ker = kernel_basis(m);
        const auto oker = oracle::kernel(om);
        EXPECT_EQ(ker.dim(), oracle::dim(oker));
        for (std::size_t r = 0; r < ker.dim(); ++r) EXPECT_TRUE(m.apply(ker.basis().row(r)).is_zero());

        const auto img = image_basis(m);
        const auto oimg = oracle::span(om.columns());
        EXPECT_EQ(img.dim(), oracle::dim(oimg));
        for (oracle::Word w = 0; w < (oracle::Word{1} << m.rows()); ++w) {
            const bool in = std::binary_search(oimg.begin(), oimg.end(), w);
            EXPECT_EQ(img.contains(BitVec::from_mask(m.rows(), w)), in);
        }
    }
}

TEST(Linalg, SolveFindsPreimagesExactlyForImageVectors) {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = fx::random_matrix(rng, 1 + rng.below(7), 1 + rng.below(7));
        const auto oimg = oracle::span(fx::to_mat(m).columns());
        const auto y = BitVec::from_mask(m.rows(), rng.below(oracle::Word{1} << m.rows()));
        const auto x = solve(m, y);
        const bool in = std::binary_search(oimg.begin(), oimg.end(), y.to_mask());
        ASSERT_EQ(x.has_value(), in);
        if (x) EXPECT_EQ(m.apply(*x), y);
    }
}

TEST(Linalg, CosetDistanceMatchesScan) {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        const auto gens = fx::random_matrix(rng, rng.below(5), n);
        const auto s = Subspace::span(gens);
        const auto os = oracle::span(fx::to_mat(gens).data);
        const auto v = BitVec::from_mask(n, rng.below(oracle::Word{1} << n));
        EXPECT_EQ(coset_min_weight(v, s), oracle::coset_distance(v.to_mask(), os));
        EXPECT_EQ(CosetOracle(s, kDefaultBudget).distance(v), oracle::coset_distance(v.to_mask(), os));
    }
}

TEST(Linalg, BudgetIsEnforced) {
    const auto s = Subspace::full(30);
    EXPECT_THROW(coset_min_weight(BitVec(30), s, 1000), ResourceError);
    EXPECT_THROW(s.elements(1000), ResourceError);
}

TEST(Linalg, EmptyShapes) {
    const BitMatrix z(0, 4);
    EXPECT_EQ(rank(z), 0u);
    EXPECT_EQ(kernel_basis(z).dim(), 4u);
    EXPECT_EQ(Subspace::span(z).dim(), 0u);
    EXPECT_TRUE(Subspace::span(z).contains(BitVec(4)));
}
