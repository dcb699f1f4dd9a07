// Shared fixtures and naive reference implementations for the unit tests.
// Everything here is written independently of the optimized library paths.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "boostlb/adversary/hypothesis_sets.hpp"
#include "boostlb/adversary/params.hpp"
#include "boostlb/core/distribution.hpp"
#include "boostlb/core/hypothesis.hpp"
#include "boostlb/core/rng.hpp"
#include "boostlb/core/sample.hpp"
#include "boostlb/core/voting.hpp"

namespace boostlb::testing {

/// Per-index sign through Hypothesis::sign, no word tricks.
inline std::vector<int> signs_of(const Hypothesis& h) {
    std::vector<int> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = h.sign(i);
    return out;
}

/// sum_i D(i) h(i) in long double, one index at a time.
inline double naive_advantage(const Hypothesis& h, const SampleDistribution& d) {
    long double s = 0;
    for (std::size_t p = 0; p < d.size(); ++p) s += static_cast<long double>(d.mass()[p]) * h.sign(d.support()[p]);
    return static_cast<double>(s);
}

/// Distribution over the distinct points of a sample with random positive weights.
/// skew > 0 spreads the weights over exp(skew) orders of magnitude.
inline SampleDistribution random_distribution(const SampleSet& s, std::uint64_t seed, double skew = 0.0) {
    SplitMix64 eng(seed);
    std::vector<double> w;
    for (std::size_t p = 0; p < s.distinct().size(); ++p) {
        const double x = uniform01(eng);
        w.push_back(skew > 0 ? std::exp(skew * x) : 0.05 + x);
    }
    return SampleDistribution::normalized(SupportLayout::of(s), std::move(w));
}

/// Uniform distribution on the given sorted indices.
inline SampleDistribution uniform_on(std::size_t u, const std::vector<PointIndex>& idx) {
    std::map<PointIndex, double> m;
    for (auto i : idx) m[i] = 1.0;
    return SampleDistribution::from_map(u, m);
}

inline std::vector<PointIndex> range_indices(std::size_t from, std::size_t to) {
    std::vector<PointIndex> v;
    for (std::size_t i = from; i < to; ++i) v.push_back(static_cast<PointIndex>(i));
    return v;
}

inline Hypothesis random_explicit(std::size_t u, std::uint64_t seed) {
    SplitMix64 eng(seed);
    SignVector v(u, 1);
    for (std::size_t i = 0; i < u; ++i)
        if (eng() & 1u) v.set(i, -1);
    return Hypothesis::from_signs(std::move(v));
}

/// Random classifier with 1..12 terms mixing lazy, explicit, h0 and all-ones.
inline VotingClassifier random_classifier(std::size_t u, std::uint64_t seed) {
    SplitMix64 eng(seed);
    const std::size_t n = 1 + uniform_below(eng, 12);
    std::vector<VotingTerm> terms;
    for (std::size_t t = 0; t < n; ++t) {
        const double w = uniform01(eng) + 0.01;
        switch (uniform_below(eng, 4)) {
            case 0: terms.push_back({w, Hypothesis::h0(u, 1 + uniform_below(eng, u / 8))}); break;
            case 1: terms.push_back({w, Hypothesis::all_ones(u)}); break;
            case 2: terms.push_back({w, random_explicit(u, eng())}); break;
            default: terms.push_back({w, Hypothesis::lazy(u, eng())}); break;
        }
    }
    return VotingClassifier::normalized(std::move(terms));
}

/// Vote total at i summed term by term through Hypothesis::sign.
inline double naive_margin(const VotingClassifier& f, std::size_t i) {
    double s = 0.0;
    for (const auto& t : f.terms()) s += t.weight * t.hypothesis.sign(i);
    return s;
}

inline double naive_error(const VotingClassifier& f) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < f.universe(); ++i) wrong += naive_margin(f, i) < 0.0;
    return static_cast<double>(wrong) / static_cast<double>(f.universe());
}

inline std::vector<PointIndex> naive_frs(std::size_t first_part_end, std::size_t r, std::span<const PointIndex> sample) {
    const std::set<PointIndex> s(sample.begin(), sample.end());
    std::vector<PointIndex> out;
    for (std::size_t i = 0; i < first_part_end && out.size() < r; ++i)
        if (!s.count(static_cast<PointIndex>(i))) out.push_back(static_cast<PointIndex>(i));
    return out;
}

/// First (block, index) of `family` whose materialized signs meet the
/// threshold (and the quota on `frs` when given), by direct summation.
inline std::optional<HypothesisId> exhaustive_scan(const HypothesisSets& sets, int family, const SampleDistribution& d,
                                            double threshold, const std::vector<PointIndex>* frs, std::size_t quota) {
    for (std::size_t b = 0; b < sets.blocks(family); ++b)
        for (std::size_t j = 0; j < sets.block_size(family, b); ++j) {
            const Hypothesis h = sets.at(family, b, j);
            const SignVector v = h.materialize();
            if (frs) {
                std::size_t minus = 0;
                for (auto i : *frs) minus += v[i] < 0;
                if (minus < quota) continue;
            }
            long double adv = 0;
            for (std::size_t p = 0; p < d.size(); ++p) adv += static_cast<long double>(d.mass()[p]) * v[d.support()[p]];
            if (adv >= threshold) return h.id();
        }
    return std::nullopt;
}

/// Scan fixture: params at m = 256 with 64 hypotheses per block, threshold
/// 0.51, and a 40-point sample split evenly between the two parts so that the
/// h0 mass branch cannot fire.
struct ScanFixture {
    AdversaryParams p;
    std::shared_ptr<HypothesisSets> sets;
    SampleSet sample;
    SampleDistribution dist;
};

inline ScanFixture scan_fixture(std::uint64_t seed) {
    AdversaryConfig c;
    c.per_block_budget = 64;
    c.select_threshold = 0.51;
    c.switch_threshold = 0.51;
    const auto p = derive_params(0.1, 8, 256, c);
    SplitMix64 eng(seed);
    std::set<PointIndex> pts;
    while (pts.size() < 20) pts.insert(static_cast<PointIndex>(uniform_below(eng, p.first_part_end())));
    while (pts.size() < 40) pts.insert(static_cast<PointIndex>(p.first_part_end() + uniform_below(eng, p.r1)));
    SampleSet s(p.u, std::vector<PointIndex>(pts.begin(), pts.end()));
    auto d = seed % 2 ? SampleDistribution::uniform(s) : random_distribution(s, seed);
    return {p, std::make_shared<HypothesisSets>(p, seed), std::move(s), std::move(d)};
}

}  // namespace boostlb::testing
