#include <gtest/gtest.h>

#include "boostlb/core/distribution.hpp"
#include "boostlb/core/screen.hpp"
#include "support.hpp"

using namespace boostlb;
using namespace boostlb::testing;

TEST(CompensatedSum, RecoversCancelledTerms) {
    const std::vector<double> xs{1e16, 1.0, -1e16};
    EXPECT_EQ(compensated_sum(xs), 1.0);
    std::vector<double> tenth(10, 0.1);
    EXPECT_EQ(compensated_sum(tenth), 1.0);
}

TEST(SupportLayout, GroupsByWord) {
    auto s = std::make_shared<const std::vector<PointIndex>>(std::vector<PointIndex>{1, 5, 64, 200, 255});
    const SupportLayout l(300, s);
    ASSERT_EQ(l.groups().size(), 3u);
    EXPECT_EQ(l.groups()[0].word, 0u);
    EXPECT_EQ(l.groups()[0].end, 2u);
    EXPECT_EQ(l.groups()[2].word, 3u);
    EXPECT_EQ(l.groups()[2].begin, 3u);
    EXPECT_EQ(l.groups()[2].end, 5u);
}

TEST(SupportLayout, RejectsBadSupports) {
    auto mk = [](std::vector<PointIndex> v) { return std::make_shared<const std::vector<PointIndex>>(std::move(v)); };
    EXPECT_THROW(SupportLayout(10, mk({})), std::invalid_argument);
    EXPECT_THROW(SupportLayout(10, mk({3, 2})), std::invalid_argument);
    EXPECT_THROW(SupportLayout(10, mk({2, 2})), std::invalid_argument);
    EXPECT_THROW(SupportLayout(10, mk({10})), std::out_of_range);
}

TEST(SampleDistribution, Validation) {
    const SampleSet s(10, {1, 2, 3});
    auto layout = SupportLayout::of(s);
    EXPECT_NO_THROW(SampleDistribution(layout, {0.25, 0.25, 0.5}));
    EXPECT_THROW(SampleDistribution(layout, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(SampleDistribution(layout, {0.5, 0.5, 0.0}), std::domain_error);
    EXPECT_THROW(SampleDistribution(layout, {0.5, 0.5, 0.1}), std::domain_error);
    EXPECT_THROW(SampleDistribution::normalized(layout, {0.0, 0.0, 0.0}), std::domain_error);
}

TEST(SampleDistribution, MassQueries) {
    const auto d = SampleDistribution::from_map(100, {{5, 1.0}, {50, 1.0}, {90, 2.0}});
    EXPECT_DOUBLE_EQ(d.mass_at(90), 0.5);
    EXPECT_EQ(d.mass_at(6), 0.0);
    EXPECT_DOUBLE_EQ(d.mass_below(50), 0.25);
    EXPECT_DOUBLE_EQ(d.mass_below(51), 0.5);
    EXPECT_DOUBLE_EQ(d.mass_below(1000), 1.0);
}

TEST(Advantage, AllOnesIsOne) {
    const auto s = draw_sample(Universe(5000), 300, 1);
    const auto d = random_distribution(s, 2);
    EXPECT_NEAR(advantage(Hypothesis::all_ones(5000), d), 1.0, 1e-12);
}

TEST(Advantage, H0OnTheLastPointsIsMinusOne) {
    const std::size_t u = 1000, r1 = 52;
    const auto d = uniform_on(u, range_indices(u - r1, u));
    EXPECT_NEAR(advantage(Hypothesis::h0(u, r1), d), -1.0, 1e-12);
}

TEST(Advantage, MatchesNaiveSummation) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = draw_sample(Universe(3000), 50, seed);
        const auto d = random_distribution(s, seed + 100);
        const auto h = Hypothesis::lazy(3000, seed);
        EXPECT_NEAR(advantage(h, d), naive_advantage(h, d), 1e-15);
        EXPECT_NEAR(advantage(h.materialize(), d), naive_advantage(h, d), 1e-15);
    }
}

TEST(Advantage, InRangeAndLinearInTheDistribution) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = random_distribution(draw_sample(Universe(2000), 80, seed), seed + 1);
        const auto b = random_distribution(draw_sample(Universe(2000), 60, seed + 50), seed + 2, 5.0);
        const auto h = Hypothesis::lazy(2000, seed * 7);
        const double lambda = 0.3;
        const auto mix = SampleDistribution::mixture(a, b, lambda);
        const double ha = advantage(h, a), hb = advantage(h, b), hm = advantage(h, mix);
        for (double x : {ha, hb, hm}) {
            EXPECT_GE(x, -1.0);
            EXPECT_LE(x, 1.0);
        }
        EXPECT_NEAR(hm, (1 - lambda) * ha + lambda * hb, 1e-12);
    }
}

TEST(Advantage, UniverseMismatchThrows) {
    const auto d = uniform_on(10, {1, 2});
    EXPECT_THROW(advantage(Hypothesis::all_ones(11), d), std::invalid_argument);
}

TEST(SignedByBit, FlipsOnlyTheSign) {
    EXPECT_EQ(signed_by_bit(0.25, 1), 0.25);
    EXPECT_EQ(signed_by_bit(0.25, 0), -0.25);
    EXPECT_EQ(signed_by_bit(0.25, 2), -0.25);  // only bit 0 counts
}

TEST(PackedSigns, PackingMatchesSigns) {
    const auto s = draw_sample(Universe(4000), 700, 9);
    const auto layout = SupportLayout::of(s);
    const auto h = Hypothesis::lazy(4000, 5);
    const auto bits = pack_on_support(h, *layout);
    for (std::size_t p = 0; p < layout->size(); ++p)
        ASSERT_EQ((bits[p / 64] >> (p % 64)) & 1u, h.sign(layout->support()[p]) > 0 ? 1u : 0u);
}

TEST(PackedSigns, AdvantageIsBitIdentical) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = draw_sample(Universe(20000), 3000, seed);
        const auto d = random_distribution(s, seed, seed % 2 ? 20.0 : 0.0);
        for (std::uint64_t k = 0; k < 5; ++k) {
            const auto h = Hypothesis::lazy(20000, seed * 31 + k);
            EXPECT_EQ(advantage_packed(pack_on_support(h, *d.layout()), d), advantage(h, d));
        }
        const auto h0 = Hypothesis::h0(20000, 500);
        EXPECT_EQ(advantage_packed(pack_on_support(h0, *d.layout()), d), advantage(h0, d));
    }
}

// The screen may only reject a hypothesis whose exact advantage is below the threshold.
TEST(AdvantageScreen, NeverRejectsAQualifyingHypothesis) {
    std::size_t rejected = 0, qualifying = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t m = seed % 3 == 0 ? 40 : 4000;  // small supports skip the planes
        const auto s = draw_sample(Universe(30000), m, seed);
        const auto d = random_distribution(s, seed, static_cast<double>(seed % 4) * 8.0);
        const AdvantageScreen screen(d);
        for (std::uint64_t k = 0; k < 400; ++k) {
            const auto h = Hypothesis::lazy(30000, seed * 1000 + k);
            const auto bits = pack_on_support(h, *d.layout());
            const double adv = advantage_packed(bits, d);
            for (double theta : {-0.2, 0.0, 0.02, 0.05, 0.2}) {
                const bool pass = screen.may_reach(bits, theta);
                if (adv >= theta) {
                    ++qualifying;
                    ASSERT_TRUE(pass) << "seed " << seed << " key " << k << " theta " << theta;
                } else {
                    rejected += !pass;
                }
            }
            // the threshold equal to the exact value must pass
            ASSERT_TRUE(screen.may_reach(bits, adv));
        }
    }
    EXPECT_GT(qualifying, 0u);
    EXPECT_GT(rejected, 0u);
}

TEST(AdvantageScreen, HandlesTiedMasses) {
    const auto s = draw_sample(Universe(50000), 5000, 3);
    const auto d = SampleDistribution::uniform(s);
    const AdvantageScreen screen(d);
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto bits = pack_on_support(Hypothesis::lazy(50000, k), *d.layout());
        const double adv = advantage_packed(bits, d);
        ASSERT_TRUE(screen.may_reach(bits, adv));
        ASSERT_TRUE(screen.may_reach(bits, adv - 1e-6));
    }
}

TEST(SupportSignCache, ReturnsPackedSignsAndResetsOnNewSupport) {
    const auto a = SupportLayout::of(draw_sample(Universe(5000), 300, 1));
    const auto b = SupportLayout::of(draw_sample(Universe(5000), 300, 2));
    SupportSignCache cache;
    const auto h = Hypothesis::lazy(5000, 11);
    const auto h0 = Hypothesis::h0(5000, 100);
    const auto ones = Hypothesis::all_ones(5000);
    for (int rep = 0; rep < 2; ++rep) {
        const auto got = cache.get(h, a);
        EXPECT_EQ(PackedSigns(got.begin(), got.end()), pack_on_support(h, *a));
        const auto got0 = cache.get(h0, a);
        EXPECT_EQ(PackedSigns(got0.begin(), got0.end()), pack_on_support(h0, *a));
    }
    EXPECT_EQ(cache.entries(), 2u);
    const auto g1 = cache.get(ones, a);
    EXPECT_EQ(PackedSigns(g1.begin(), g1.end()), pack_on_support(ones, *a));
    EXPECT_EQ(cache.entries(), 2u);  // structural all-ones is never stored
    const auto gb = cache.get(h, b);
    EXPECT_EQ(PackedSigns(gb.begin(), gb.end()), pack_on_support(h, *b));
    EXPECT_EQ(cache.entries(), 1u);
}

TEST(SupportSignCache, ZeroBudgetStillAnswers) {
    const auto a = SupportLayout::of(draw_sample(Universe(5000), 300, 1));
    SupportSignCache cache(0);
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto h = Hypothesis::lazy(5000, k);
        const auto got = cache.get(h, a);
        EXPECT_EQ(PackedSigns(got.begin(), got.end()), pack_on_support(h, *a));
    }
    EXPECT_EQ(cache.entries(), 0u);
}
