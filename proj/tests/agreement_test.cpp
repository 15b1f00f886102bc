#include "learnorder/agreement.hpp"
#include "learnorder/error.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace learnorder;

namespace {

std::vector<std::string> labels(char prefix, std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::string(1, prefix) + std::to_string(i));
    return out;
}

// Single-epoch cube from a K x N bit pattern packed into an integer.
CorrectnessCube cube_from_mask(std::size_t K, std::size_t N, std::uint64_t mask) {
    std::vector<std::uint8_t> bits(K * N);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (mask >> i) & 1u;
    return {labels('r', K), {0}, labels('n', N), bits};
}

// One epoch, rows given as strings of '0'/'1'.
CorrectnessCube cube_from_rows(const std::vector<std::string>& rows) {
    std::vector<std::uint8_t> bits;
    for (const auto& r : rows) {
        for (char c : r) bits.push_back(c == '1');
    }
    return {labels('r', rows.size()), {0}, labels('n', rows[0].size()), bits};
}

} // namespace

TEST(AgreementOracle, ExhaustiveSmallCubes) {
    for (std::size_t K : {2u, 3u}) {
        for (std::size_t N = 1; N <= (K == 2 ? 4u : 3u); ++N) {
            for (std::uint64_t mask = 0; mask < (1ull << (K * N)); ++mask) {
                const auto cube = cube_from_mask(K, N, mask);
                const auto bits = oracle::epoch_bits(cube, 0);
                EXPECT_EQ(true_positive_agreement(cube, 0), oracle::tpa(bits)) << mask;
                EXPECT_EQ(lower_bound(cube, 0), oracle::lower_bound(bits)) << mask;
                EXPECT_EQ(expected_random_agreement(cube, 0), oracle::expected_random(bits))
                    << mask;
                EXPECT_EQ(pabak(cube, 0), oracle::pabak(bits)) << mask;
            }
        }
    }
}

TEST(AgreementOracle, RandomCubesMatchAndRespectBounds) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t K = 2 + rng() % 5, T = 1 + rng() % 8, N = 1 + rng() % 60;
        const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto cube = oracle::random_cube(rng, K, T, N, density);
        for (std::size_t t = 0; t < T; ++t) {
            const auto bits = oracle::epoch_bits(cube, t);
            const auto tpa = true_positive_agreement(cube, t);
            const double lb = lower_bound(cube, t);
            EXPECT_EQ(tpa, oracle::tpa(bits));
            EXPECT_EQ(lb, oracle::lower_bound(bits));
            EXPECT_EQ(pabak(cube, t), oracle::pabak(bits));
            EXPECT_NEAR(expected_random_agreement(cube, t), oracle::expected_random(bits), 1e-15);
            if (tpa) {
                EXPECT_LE(lb, *tpa);
                EXPECT_LE(*tpa, 1.0);
            }
        }
    }
}

TEST(Agreement, UndefinedWhenNothingCorrect) {
    const auto cube = cube_from_rows({"000", "000"});
    EXPECT_FALSE(true_positive_agreement(cube, 0).has_value());
    EXPECT_EQ(lower_bound(cube, 0), 0.0);
    EXPECT_EQ(expected_random_agreement(cube, 0), 0.0);
    EXPECT_EQ(pabak(cube, 0), 1.0);
}

TEST(Agreement, PerfectAgreement) {
    const auto cube = cube_from_rows({"1111", "1111", "1111"});
    EXPECT_EQ(true_positive_agreement(cube, 0), 1.0);
    EXPECT_EQ(lower_bound(cube, 0), 1.0);
    EXPECT_EQ(expected_random_agreement(cube, 0), 1.0);
    EXPECT_EQ(pabak(cube, 0), 1.0);
}

TEST(Agreement, LowerBoundAnchorThreeRunsTwoThirds) {
    // each run misses a different third of the instances
    const auto cube = cube_from_rows({"011011", "101101", "110110"});
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(cube.accuracy(k, 0), 4.0 / 6.0);
    EXPECT_EQ(lower_bound(cube, 0), 0.0);
    EXPECT_EQ(true_positive_agreement(cube, 0), 0.0);
}

TEST(Agreement, PabakZeroAtHalfAgreement) {
    const auto cube = cube_from_rows({"1100", "1010"});
    EXPECT_EQ(pabak(cube, 0), 0.0);
    const auto disagree = cube_from_rows({"1100", "0011"});
    EXPECT_EQ(pabak(disagree, 0), -1.0);
}

TEST(Agreement, PabakAveragesUnorderedPairs) {
    // pairs (0,1): 4/4, (0,2): 2/4, (1,2): 2/4 -> mean(1, 0, 0)
    const auto cube = cube_from_rows({"1100", "1100", "1010"});
    EXPECT_DOUBLE_EQ(pabak(cube, 0), 1.0 / 3.0);
}

TEST(Agreement, ExpectedRandomIsProductOfAccuracies) {
    std::string r0(10, '0'), r1(10, '0'), r2(10, '0');
    for (int i = 0; i < 9; ++i) r0[i] = '1';
    for (int i = 0; i < 8; ++i) r1[i] = '1';
    for (int i = 0; i < 7; ++i) r2[i] = '1';
    const auto cube = cube_from_rows({r0, r1, r2});
    EXPECT_NEAR(expected_random_agreement(cube, 0), 0.504, 1e-15);
    EXPECT_DOUBLE_EQ(*true_positive_agreement(cube, 0), 0.7 / 0.9);
}

TEST(Agreement, AccuracyStatsPopulationStd) {
    const auto cube = cube_from_rows({"1111", "1100"});
    const auto s = accuracy_stats(cube, 0);
    EXPECT_DOUBLE_EQ(s.mean, 0.75);
    EXPECT_DOUBLE_EQ(s.std, 0.25);
}

TEST(Agreement, SeriesAndMask) {
    const CorrectnessCube cube({"a", "b"}, {0, 2}, {"x", "y", "z"}, {0, 0, 0, 1, 1, 0, //
                                                                  0, 0, 0, 1, 0, 1});
    const auto s = agreement_series(cube);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.epochs, cube.epochs());
    EXPECT_FALSE(s.tpa[0].has_value());
    EXPECT_EQ(s.tpa[1], 1.0 / 3.0);
    EXPECT_EQ(agreed_mask(cube, 1), (std::vector<bool>{true, false, false}));
    EXPECT_THROW(true_positive_agreement(cube, 2), Error);
}

TEST(Categorical, LearnedFractionPerValue) {
    const CorrectnessCube cube({"a", "b"}, {0, 1}, {"p", "q", "r", "s"},
                               {1, 0, 1, 0, 1, 1, 1, 1, //
                                1, 1, 0, 0, 1, 1, 1, 0});
    const std::map<std::string, std::string, std::less<>> size_of{
        {"p", "large"}, {"q", "large"}, {"r", "small"}, {"s", "small"}};
    const auto series = categorical_learned_fraction(cube, size_of, "object_size");
    EXPECT_EQ(series.totals.at("large"), 2u);
    EXPECT_EQ(series.fractions.at("large"), (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(series.fractions.at("small"), (std::vector<double>{0.0, 0.5}));
}

TEST(Categorical, MissingValueRejected) {
    const auto cube = cube_from_rows({"11", "11"});
    const std::map<std::string, std::string, std::less<>> partial{{"n0", "x"}};
    try {
        categorical_learned_fraction(cube, partial, "scene");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingCategory);
    }
    InstanceCatalog catalog;
    catalog.add({"n0", std::nullopt, {{"scene", "x"}}});
    catalog.add({"n1", std::nullopt, {}});
    EXPECT_THROW(categorical_learned_fraction(cube, catalog, "scene"), Error);
}

TEST(GroupStats, MeanAndStdAcrossGroups) {
    const auto t1 = cube_from_rows({"1111100000", "1100000000"}); // TPa 2/5
    const auto t2 = cube_from_rows({"1111100000", "1110000000"}); // TPa 3/5
    std::vector<CorrectnessCube> groups{t1, t2};
    const auto stats = agreement_std_over_groups(groups, 2);
    ASSERT_EQ(stats.epochs.size(), 1u);
    EXPECT_NEAR(*stats.tpa_mean[0], 0.5, 1e-15);
    EXPECT_NEAR(*stats.tpa_std[0], 0.1, 1e-15);
    EXPECT_EQ(stats.tpa_defined[0], 2u);
    EXPECT_NEAR(stats.era_mean[0], (0.5 * 0.2 + 0.5 * 0.3) / 2.0, 1e-15);
}

TEST(GroupStats, UndefinedGroupsSkipped) {
    std::vector<CorrectnessCube> groups{cube_from_rows({"00", "00"}), cube_from_rows({"11", "10"})};
    const auto stats = agreement_std_over_groups(groups, 2);
    EXPECT_EQ(stats.tpa_defined[0], 1u);
    EXPECT_EQ(stats.tpa_mean[0], 0.5);
    EXPECT_EQ(stats.tpa_std[0], 0.0);

    std::vector<CorrectnessCube> none{cube_from_rows({"00", "00"}), cube_from_rows({"00", "00"})};
    EXPECT_FALSE(agreement_std_over_groups(none, 2).tpa_mean[0].has_value());
}

TEST(GroupStats, Errors) {
    std::vector<CorrectnessCube> one{cube_from_rows({"11", "10"})};
    EXPECT_THROW(agreement_std_over_groups(one, 2), Error);
    std::vector<CorrectnessCube> ragged{cube_from_rows({"11", "10"}), cube_from_rows({"111", "101"})};
    try {
        agreement_std_over_groups(ragged, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RaggedLogs);
    }
}

TEST(GroupStats, SplitIntoGroups) {
    std::mt19937_64 rng(1);
    const auto cube = oracle::random_cube(rng, 6, 2, 5, 0.5);
    const auto groups = split_into_groups(cube, 3);
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[1].runs().front(), cube.runs()[3]);
    EXPECT_THROW(split_into_groups(cube, 4), Error);
}
