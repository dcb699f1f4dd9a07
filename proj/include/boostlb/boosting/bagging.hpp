// bagging.hpp
//
// Majority of majorities: AdaBoost on bootstrap resamples of the training
// draws, all against the same weak learner, combined by an unweighted vote
// over the inner signs.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "boostlb/adversary/selectors.hpp"
#include "boostlb/boosting/adaboost.hpp"
#include "boostlb/core/rng.hpp"
#include "boostlb/core/voting.hpp"

namespace boostlb {

/// ceil(log2(m / delta)) bags.
inline std::size_t default_bags(std::size_t m, double delta = 0.25) {
    return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(m) / delta)));
}

struct BaggedResult {
    MajorityVote vote;
    std::vector<BoostResult> inner;
    std::size_t failed_bags = 0;
};

/// Bag b resamples sample.draws() with replacement from derive_seed(seed, {b}).
inline SampleSet bootstrap_bag(const SampleSet& sample, std::size_t bag_size, std::uint64_t seed, std::size_t b) {
    SplitMix64 eng(derive_seed(seed, {b}));
    const auto draws = sample.draws();
    std::vector<PointIndex> out(bag_size);
    for (auto& x : out) x = draws[uniform_below(eng, draws.size())];
    return SampleSet(sample.universe(), std::move(out));
}

/// A bag whose weak learner runs dry is dropped and counted; if every bag
/// fails the last AdversaryExhausted propagates.  A single bag of size m is
/// the sample itself, so that case reduces to plain AdaBoost.
template <WeakLearner W>
BaggedResult bagged_majority(const SampleSet& sample, W& learner, const BoostConfig& cfg, std::size_t bags,
                             std::size_t bag_size, std::uint64_t seed) {
    if (bags < 1) throw std::invalid_argument("bagging needs at least one bag");
    if (bag_size < 1 || bag_size > sample.m()) throw std::invalid_argument("bag_size must lie in [1, m]");
    std::vector<BoostResult> inner;
    std::size_t failed = 0;
    for (std::size_t b = 0; b < bags; ++b) {
        try {
            if (bags == 1 && bag_size == sample.m())
                inner.push_back(adaboost(sample, learner, cfg));
            else
                inner.push_back(adaboost(bootstrap_bag(sample, bag_size, seed, b), learner, cfg));
        } catch (const AdversaryExhausted&) {
            ++failed;
            if (failed == bags) throw;
        }
    }
    std::vector<VotingClassifier> members;
    for (const auto& r : inner) members.push_back(r.classifier);
    return BaggedResult{MajorityVote(std::move(members)), std::move(inner), failed};
}

}  // namespace boostlb
