#include <gtest/gtest.h>

#include <cmath>

#include "boostlb/lemma_lab/checks.hpp"
#include "boostlb/lemma_lab/report.hpp"

using namespace boostlb;

namespace {

/// |p - exact| within 4 standard errors of the exact value.
void expect_close_to(const MonteCarloReport& r, double exact) {
    const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(r.trials));
    EXPECT_NEAR(r.empirical_probability, exact, 4 * se + 1e-12);
}

double binomial_tail(int n, int k_min) {
    double total = 0.0;
    for (int k = k_min; k <= n; ++k) total += std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) - n * std::log(2.0));
    return total;
}

}  // namespace

TEST(MonteCarloReport, PassRuleUsesThreeStandardErrors) {
    const auto lo = make_report(400, 1000, 0.43, BoundDirection::lower);
    EXPECT_DOUBLE_EQ(lo.empirical_probability, 0.4);
    EXPECT_DOUBLE_EQ(lo.std_error, std::sqrt(0.4 * 0.6 / 1000));
    EXPECT_TRUE(lo.pass);  // 0.4 >= 0.43 - 0.0465
    EXPECT_FALSE(make_report(400, 1000, 0.45, BoundDirection::lower).pass);
    EXPECT_TRUE(make_report(400, 1000, 0.37, BoundDirection::upper).pass);
    EXPECT_FALSE(make_report(400, 1000, 0.35, BoundDirection::upper).pass);
    // zero hits has zero spread
    EXPECT_TRUE(make_report(0, 10, 0.0, BoundDirection::upper).pass);
    EXPECT_FALSE(make_report(0, 10, 0.01, BoundDirection::lower).pass);
    EXPECT_THROW(make_report(0, 0, 0.5, BoundDirection::lower), std::invalid_argument);
    EXPECT_THROW(make_report(11, 10, 0.5, BoundDirection::lower), std::invalid_argument);
}

TEST(MonteCarloReport, JsonHasExactlyTheRecordFields) {
    const auto r = make_report(3, 10, 0.25, BoundDirection::upper);
    const nlohmann::json j = r;
    EXPECT_EQ(j.size(), 6u);
    for (const char* k : {"trials", "empirical_probability", "claimed_bound", "direction", "pass", "std_error"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["direction"], "upper");
    EXPECT_EQ(j.get<MonteCarloReport>(), r);
    EXPECT_THROW(parse_direction("sideways"), std::invalid_argument);
}

TEST(CountHits, IndependentOfThreadCount) {
    auto fn = [](SplitMix64& eng, std::size_t n) {
        std::size_t h = 0;
        for (std::size_t t = 0; t < n; ++t) h += eng() & 1u;
        return h;
    };
    const auto a = count_hits(10000, 5, 1, fn, 300);
    EXPECT_EQ(a, count_hits(10000, 5, 4, fn, 300));
    EXPECT_EQ(a, count_hits(10000, 5, 7, fn, 300));
    EXPECT_THROW(count_hits(10, 5, 1, fn, 0), std::invalid_argument);
}

TEST(ParallelFor, RethrowsWorkerErrors) {
    EXPECT_THROW(parallel_for(100, 4, [](std::size_t i) {
                     if (i == 37) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
    std::vector<int> hit(50, 0);
    parallel_for(50, 3, [&](std::size_t i) { hit[i] = 1; });
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
}

TEST(BiasLemma, SingleCoordinate) {
    BiasLemmaConfig c{{1.0}, 2.0, 1.5, 0.1, 20000, 3, 1};
    const auto r = check_bias_lemma(c);
    expect_close_to(r, 0.5 + 2.0 * 0.1);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.direction, BoundDirection::lower);
}

TEST(BiasLemma, TwoCoordinatesAgainstEnumeration) {
    const double at = 4, ap = 1, beta = 0.05;
    const double p_minus = 0.5 + at * beta;
    double exact = 0.0;
    for (int a : {-1, 1})
        for (int b : {-1, 1}) {
            const double prob = (a < 0 ? p_minus : 1 - p_minus) * (b < 0 ? p_minus : 1 - p_minus);
            if (0.5 * a + 0.5 * b <= -ap * beta) exact += prob;
        }
    EXPECT_NEAR(exact, 0.49, 1e-15);
    const auto r = check_bias_lemma({{0.5, 0.5}, at, ap, beta, 50000, 4, 2});
    expect_close_to(r, exact);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.claimed_bound, std::min(0.25, 0.5 - 4.0 * 4 * 1 / 49.0), 1e-15);
}

TEST(BiasLemma, BoundNearTheLimit) {
    EXPECT_LE(bias_lemma_bound(1.0, 1.999), 0.25);
    EXPECT_LT(bias_lemma_bound(1.0, 1.999), 0.0);
    EXPECT_EQ(bias_lemma_bound(1.0, 0.0), 0.25);
}

TEST(BiasLemma, UnbiasedSumsAreSymmetric) {
    const auto r = check_bias_lemma({{0.25, -0.25, 0.25, 0.25}, 1.0, 0.5, 0.0, 20000, 5, 1});
    EXPECT_GE(r.empirical_probability, 0.5 - 3 * r.std_error);
    expect_close_to(r, 11.0 / 16.0);  // sum <= 0 unless at least 3 of 4 signs favour +
}

// Signed weights cancel the bias: w = (1/2, -1/2) hits only on h = (-1, +1),
// probability 0.9 * 0.1, below the 0.1735 bound.  The bound needs w >= 0.
TEST(BiasLemma, SignedWeightsFallBelowTheBound) {
    const auto r = check_bias_lemma({{0.5, -0.5}, 2.0, 0.5, 0.2, 20000, 6, 1});
    expect_close_to(r, 0.09);
    EXPECT_NEAR(r.claimed_bound, 0.5 - 4.0 / 12.25, 1e-15);
    EXPECT_FALSE(r.pass);
}

TEST(BiasLemma, Preconditions) {
    EXPECT_THROW(check_bias_lemma({{0.5}, 1, 0, 0, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_bias_lemma({{1.0}, 0.5, 0, 0, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_bias_lemma({{1.0}, 1, 1, 0, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_bias_lemma({{1.0}, 1, 0, 0.5, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_bias_lemma({{}, 1, 0, 0, 10, 1, 1}), std::invalid_argument);
}

TEST(Coupon, TinyCaseIsImpossible) {
    EXPECT_EQ(coupon_count(4, 1, 8), static_cast<std::size_t>(std::ceil(32 / std::log(4.0))));
    const auto r = check_coupon_collector({4, 1, 8, 1000, 1, 1});
    EXPECT_EQ(r.empirical_probability, 0.0);
    EXPECT_TRUE(r.pass);
}

TEST(Coupon, DeskCaseStaysBelowOneHalf) {
    const auto r = check_coupon_collector({1024, 4, 8, 10000, 2, 2});
    EXPECT_LE(r.empirical_probability, 0.5 + 3 * r.std_error);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.direction, BoundDirection::upper);
}

TEST(Coupon, DoublingZetaDoesNotRaiseTheProbability) {
    const auto a = check_coupon_collector({1024, 4, 8, 2000, 3, 1});
    const auto b = check_coupon_collector({1024, 4, 16, 2000, 3, 1});
    EXPECT_LE(b.empirical_probability, a.empirical_probability);
}

TEST(Coupon, Preconditions) {
    EXPECT_THROW(check_coupon_collector({15, 4, 8, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_coupon_collector({100, 0, 8, 10, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_coupon_collector({100, 4, 7, 10, 1, 1}), std::invalid_argument);
}

TEST(LinearComb, SmallEntryCountMatchesColumns) {
    SplitMix64 eng(1);
    const std::size_t r = 2000, n = 8;
    const double tau = small_entry_threshold(r, n);
    ASSERT_LT(tau, 1.0);
    std::size_t violations = 0;
    for (int t = 0; t < 20; ++t) {
        const auto A = draw_sign_matrix(r, n, eng);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            std::size_t minus = 0;
            for (std::size_t i = 0; i < r; ++i) minus += A.at(i, j) < 0;
            const auto small = small_entry_count(A, e, tau);
            EXPECT_EQ(small, minus);
            violations += violates_linear_comb(small, r);
        }
    }
    // Hoeffding: a column with >= 90% positive entries has probability <= exp(-0.32 r)
    EXPECT_EQ(violations, 0u);
}

TEST(LinearComb, SingleColumnHasNoViolation) {
    const auto r = check_linear_comb({40, 1, 50, 30, 2, 2});
    EXPECT_EQ(r.violations, 0u);
    EXPECT_EQ(r.verdict, "no counterexample found");
}

TEST(LinearComb, SearchFindsAPlantedCounterexample) {
    // every entry +1: w = (1/2, 1/2) makes every entry 1 > threshold
    const std::size_t r = 400, n = 2;
    SignMatrix A{r, n, std::vector<std::int8_t>(r * n, 1)};
    const double tau = small_entry_threshold(r, n);
    ASSERT_LT(tau, 1.0);
    SplitMix64 eng(3);
    detail::LinearCombSearch s(A, tau, 100);
    s.random_vectors(100, eng);
    EXPECT_EQ(s.fewest(), 0u);
    detail::LinearCombSearch g(A, tau, 100);
    g.greedy(100, 0.5, eng);
    EXPECT_EQ(g.fewest(), 0u);
    detail::LinearCombSearch net(A, tau, 100);
    net.net(4, 100);
    EXPECT_EQ(net.fewest(), 0u);
}

TEST(LinearComb, DeskSizeFindsNothing) {
    const auto r = check_linear_comb({400, 8, 10, 300, 4, 2});
    EXPECT_EQ(r.violations, 0u);
    EXPECT_EQ(r.verdict, "no counterexample found");
    EXPECT_NEAR(r.report.claimed_bound, 1.0 / 16.0, 1e-15);
    EXPECT_TRUE(r.report.pass);
}

TEST(LinearComb, Preconditions) {
    EXPECT_THROW(check_linear_comb({100, 8, 1, 30, 1, 1}), std::invalid_argument);  // 100 < 40 lg 8
    EXPECT_THROW(check_linear_comb({400, 8, 0, 30, 1, 1}), std::invalid_argument);
    EXPECT_THROW(check_linear_comb({400, 8, 1, 2, 1, 1}), std::invalid_argument);
}

TEST(Anticoncentration, SingleCoordinateIsAHalf) {
    AnticoncentrationConfig c;
    c.x = {0.5};
    c.beta = 0.1;
    c.trials = 20000;
    const auto r = check_anticoncentration(c);
    expect_close_to(r.report, 0.5);
    EXPECT_TRUE(r.report.pass);
}

TEST(Anticoncentration, UniformAgainstBinomialTail) {
    // sum = (2k - 20) / 40 >= 0.05  <=>  k >= 11 plus signs
    AnticoncentrationConfig c;
    c.x.assign(20, 1.0 / 40.0);
    c.beta = 0.05;
    c.trials = 50000;
    c.seed = 9;
    const auto r = check_anticoncentration(c);
    expect_close_to(r.report, binomial_tail(20, 11));
    EXPECT_TRUE(r.report.pass);
    EXPECT_EQ(r.seed, 9u);
    EXPECT_NEAR(r.report.claimed_bound, 0.5 * std::exp(-16 * 0.0025 * 20), 1e-15);
}

TEST(Anticoncentration, ZeroBetaCountsTies) {
    AnticoncentrationConfig c;
    c.x.assign(10, 0.1);
    c.beta = 0.0;
    c.trials = 20000;
    const auto r = check_anticoncentration(c);
    expect_close_to(r.report, binomial_tail(10, 5));
    EXPECT_GE(r.report.empirical_probability, 0.5);
    EXPECT_EQ(r.min_c3, 1.0);
}

TEST(Anticoncentration, CalibrationOutputs) {
    AnticoncentrationConfig c;
    c.x.assign(20, 1.0 / 40.0);
    c.beta = 0.05;
    c.trials = 5000;
    const auto r = check_anticoncentration(c);
    const double p = r.report.empirical_probability, e = 16 * 0.0025 * 20;
    EXPECT_NEAR(r.max_c2, std::min(1.0, p * std::exp(e)), 1e-15);
    EXPECT_GE(r.min_c3, 1.0);
}

TEST(Anticoncentration, Preconditions) {
    AnticoncentrationConfig c;
    c.x = {0.1};
    c.beta = 0.1;
    EXPECT_THROW(check_anticoncentration(c), std::invalid_argument);  // sum below (1 - beta)/2
    c.x = {0.5};
    c.beta = 0.2;
    EXPECT_THROW(check_anticoncentration(c), std::invalid_argument);  // beta above mc1/6
    c.beta = 0.1;
    c.x = {-0.5, 1.0};
    EXPECT_THROW(check_anticoncentration(c), std::invalid_argument);
}

TEST(LemmaLab, SameSeedSameReportForAnyJobs) {
    BiasLemmaConfig b{{0.5, 0.5}, 4, 1, 0.05, 5000, 11, 1};
    const auto b1 = check_bias_lemma(b);
    b.jobs = 4;
    EXPECT_EQ(check_bias_lemma(b), b1);
    b.seed = 12;
    EXPECT_NE(check_bias_lemma(b).empirical_probability, b1.empirical_probability);

    AnticoncentrationConfig a;
    a.x.assign(20, 1.0 / 40.0);
    a.beta = 0.05;
    a.trials = 5000;
    const auto a1 = check_anticoncentration(a);
    a.jobs = 3;
    EXPECT_EQ(check_anticoncentration(a).report, a1.report);

    LinearCombConfig l{400, 8, 6, 60, 2, 1};
    const auto l1 = check_linear_comb(l);
    l.jobs = 3;
    const auto l2 = check_linear_comb(l);
    EXPECT_EQ(l1.report, l2.report);
    EXPECT_EQ(l1.fewest_small_entries, l2.fewest_small_entries);

    const auto c1 = check_coupon_collector({1024, 4, 8, 3000, 2, 1});
    EXPECT_EQ(check_coupon_collector({1024, 4, 8, 3000, 2, 4}), c1);
}
