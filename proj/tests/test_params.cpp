#include <gtest/gtest.h>

#include <cmath>

#include "boostlb/adversary/hypothesis_sets.hpp"
#include "boostlb/adversary/params.hpp"

using namespace boostlb;

TEST(DeriveParams, DeskValuesAtGammaTenthDEight) {
    const auto p = derive_params(0.1, 8, 4096);
    EXPECT_DOUBLE_EQ(p.gamma_prime, 0.8);
    EXPECT_EQ(p.r, 13u);  // ceil(8 / 0.64)
    EXPECT_EQ(p.r1, 52u);
    // ceil(8 * 4 * 4096 / ln(4096 / 13))
    EXPECT_EQ(p.u, static_cast<std::size_t>(std::ceil(8.0 * 4 * 4096 / std::log(4096.0 / 13))));
    EXPECT_EQ(p.u, 22784u);
    EXPECT_EQ(p.k, static_cast<std::size_t>(std::ceil(std::log(22784.0) / 0.01)));
    EXPECT_EQ(p.first_part_end(), p.u - 52);
    EXPECT_DOUBLE_EQ(p.select_threshold, 0.2);
    EXPECT_DOUBLE_EQ(p.switch_threshold, 0.2);
    EXPECT_DOUBLE_EQ(p.h0_mass_threshold, 0.6);
    EXPECT_EQ(p.minus_quota, 8u);            // ceil(0.6 * 13)
    EXPECT_EQ(p.faithful_minus_quota, 17u);  // ceil(1.3 * 13)
    EXPECT_FALSE(p.lemma_applicable);
    EXPECT_EQ(p.family_size(), p.k * 4096 + 1);
}

TEST(DeriveParams, GridTable) {
    struct Row {
        std::size_t m, u, k;
    };
    for (const Row& row : {Row{4096, 22784, 1004}, Row{16384, 73439, 1121}, Row{65536, 245989, 1242}}) {
        const auto p = derive_params(0.1, 8, row.m);
        EXPECT_EQ(p.u, row.u) << row.m;
        EXPECT_EQ(p.k, row.k) << row.m;
    }
}

TEST(DeriveParams, AlphaOneGivesR1EqualR) {
    AdversaryConfig c;
    c.alpha = 1.0;
    for (double g : {0.05, 0.1, 0.2}) {
        const auto p = derive_params(g, 8, 100000, c);
        EXPECT_EQ(p.r1, p.r);
    }
}

TEST(DeriveParams, QuotaRules) {
    AdversaryConfig c;
    c.quota_rule = QuotaRule::faithful;
    EXPECT_EQ(derive_params(0.1, 8, 4096, c).minus_quota, 17u);
    c.minus_quota = 5;
    EXPECT_EQ(derive_params(0.1, 8, 4096, c).minus_quota, 5u);
}

TEST(DeriveParams, Preconditions) {
    auto msg = [](auto fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(msg([] { derive_params(0.4, 8, 4096); }).find("gamma"), std::string::npos);
    EXPECT_NE(msg([] { derive_params(0.0, 8, 4096); }).find("gamma"), std::string::npos);
    EXPECT_NE(msg([] { derive_params(0.1, 2, 4096); }).find("d must"), std::string::npos);
    EXPECT_NE(msg([] { derive_params(0.1, 8, 51); }).find("m must"), std::string::npos);
    EXPECT_NO_THROW(derive_params(0.1, 8, 52));
    AdversaryConfig c;
    c.alpha = 0.5;
    EXPECT_THROW(derive_params(0.1, 8, 4096, c), std::invalid_argument);
    c.alpha = 2;
    c.per_block_budget = 0;
    EXPECT_THROW(derive_params(0.1, 8, 4096, c), std::invalid_argument);
    c.per_block_budget = 1;
    c.select_threshold = 1.0;
    EXPECT_THROW(derive_params(0.1, 8, 4096, c), std::invalid_argument);
}

TEST(DeriveParams, R1NeverExceedsAnEighthOfU) {
    for (std::size_t m : {52u, 100u, 1000u, 4096u, 100000u}) {
        const auto p = derive_params(0.1, 8, m);
        EXPECT_LE(8 * p.r1, p.u) << m;
    }
}

TEST(CalibrationConstants, Validation) {
    CalibrationConstants c;
    EXPECT_NO_THROW(c.validate());
    c.mc2 = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.c3 = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.c0 = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(DeriveParams, Case1Threshold) {
    const auto p = derive_params(0.1, 8, 4096);
    EXPECT_NEAR(p.case1_threshold(), 1.4 / 2.4, 1e-15);
}

TEST(CeilCount, IgnoresRoundingDust) {
    EXPECT_EQ(detail::ceil_count(13.0), 13u);
    EXPECT_EQ(detail::ceil_count(8.0 / (0.8 * 0.8)), 13u);  // 12.5 in exact arithmetic
    EXPECT_EQ(detail::ceil_count(4.0 * (1.0 + 1e-13)), 4u);
    EXPECT_EQ(detail::ceil_count(4.001), 5u);
    EXPECT_THROW(detail::ceil_count(-1.0), std::domain_error);
    EXPECT_THROW(detail::ceil_count(NAN), std::domain_error);
}

TEST(FaithfulReport, AstronomicalButFinite) {
    const auto f = faithful_report(derive_params(0.1, 8, 4096));
    EXPECT_TRUE(std::isfinite(f.c3));
    EXPECT_GT(f.alpha, 100.0);
    EXPECT_GT(f.log_family_bound, f.log_block_size);
}

TEST(HypothesisSets, LayoutAndStreams) {
    AdversaryConfig c;
    c.per_block_budget = 16;
    const auto p = derive_params(0.1, 8, 4096, c);
    const HypothesisSets sets(p, 5);
    EXPECT_EQ(sets.blocks(1), p.k);
    EXPECT_EQ(sets.block_size(2, 3), 17u);
    EXPECT_EQ(sets.total_count(), 2 * p.k * 16 + 1);
    for (int fam : {1, 2})
        for (std::size_t b : {std::size_t{0}, p.k - 1}) {
            const auto h = sets.at(fam, b, 0);
            EXPECT_TRUE(h.is_h0());
            EXPECT_EQ(h.id(), (HypothesisId{static_cast<std::uint32_t>(fam), static_cast<std::uint32_t>(b), 0}));
        }
    // the two families are different streams and blocks do not repeat
    std::set<std::uint64_t> keys;
    for (int fam : {1, 2})
        for (std::size_t b = 0; b < 20; ++b)
            for (std::size_t j = 1; j <= 16; ++j) keys.insert(sets.at(fam, b, j).key());
    EXPECT_EQ(keys.size(), 2u * 20 * 16);
    EXPECT_TRUE(sets.at(1, 4, 3).same_function(HypothesisSets(p, 5).at(1, 4, 3)));
    EXPECT_FALSE(sets.at(1, 4, 3).same_function(HypothesisSets(p, 6).at(1, 4, 3)));
    EXPECT_THROW(sets.at(3, 0, 0), std::invalid_argument);
    EXPECT_THROW(sets.at(1, p.k, 0), std::out_of_range);
    EXPECT_THROW(sets.at(1, 0, 17), std::out_of_range);
}

TEST(HypothesisSets, FromBlocksAssignsIds) {
    const auto sets = HypothesisSets::from_blocks(
        10, {{Hypothesis::all_ones(10), Hypothesis::lazy(10, 1)}}, {{Hypothesis::h0(10, 2)}, {Hypothesis::lazy(10, 2)}});
    EXPECT_EQ(sets.blocks(1), 1u);
    EXPECT_EQ(sets.blocks(2), 2u);
    EXPECT_EQ(sets.at(1, 0, 1).id(), (HypothesisId{1, 0, 1}));
    EXPECT_EQ(sets.at(2, 1, 0).id(), (HypothesisId{2, 1, 0}));
    EXPECT_EQ(sets.total_count(), 4u);
    EXPECT_THROW(HypothesisSets::from_blocks(10, {{Hypothesis::all_ones(11)}}, {}), std::invalid_argument);
}
