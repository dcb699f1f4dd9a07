// adaboost.hpp
//
// AdaBoost over an abstract weak learner, with the concept fixed to all-ones.
// The sample distribution is kept as exp(-score) where score is the running
// unnormalized vote on each distinct sample point, so it never underflows to
// zero before the scores spread by ~700 nats.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boostlb/core/distribution.hpp"
#include "boostlb/core/sample.hpp"
#include "boostlb/core/voting.hpp"

namespace boostlb {

/// A weak learner returned a hypothesis below its advertised advantage.
class WeakLearnerBroken : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

template <class W>
concept WeakLearner = requires(W& w, const SampleDistribution& d) {
    { w(d) } -> std::convertible_to<Hypothesis>;
};

enum class BoostVariant { plain, margin_nu };

struct BoostConfig {
    std::size_t rounds = 1;
    double edge_floor = 1e-9;
    BoostVariant variant = BoostVariant::plain;
    double nu = 0.0;
    /// When set, every hypothesis must have advantage >= this under its query
    /// (WeakLearnerBroken otherwise) and the training-error bound
    /// n exp(-t theta^2 / 2) is checked after each round.
    std::optional<double> contract_advantage;

    void validate() const {
        if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
        if (!(edge_floor > 0.0 && edge_floor <= 1e-3))
            throw std::invalid_argument("edge_floor must lie in (0, 1e-3]");
        if (variant == BoostVariant::margin_nu && !(nu >= 0.0 && nu < 1.0))
            throw std::invalid_argument("nu must lie in [0, 1)");
    }
};

/// Rounds needed for zero training error at advantage 2 gamma: ceil(ln m / (2 gamma^2)) + 1.
inline std::size_t default_rounds(std::size_t m, double gamma) {
    return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(m)) / (2.0 * gamma * gamma))) + 1;
}

struct BoostResult {
    VotingClassifier classifier;     // normalized, repeated hypotheses merged
    std::vector<double> weights;     // raw per-round weights
    std::vector<double> errors;      // weighted error per round
    std::size_t rounds = 0;
    double training_error = 0.0;     // over distinct sample points
    double min_margin = 0.0;         // over distinct sample points, normalized vote
};

/// Weight of a round with weighted error eps (clamped away from 0 and 1/2).
inline double adaboost_weight(double eps, double edge_floor) {
    const double e = std::clamp(eps, edge_floor, 0.5 - edge_floor);
    return 0.5 * std::log((1.0 - e) / e);
}

/// AdaBoost*_nu weight: the plain weight shifted down by the weight of an edge
/// of rho - nu, rho being the smallest edge seen so far.  Negative results clamp to 0.
inline double margin_nu_weight(double eps, double rho, double nu, double edge_floor) {
    const double shift = std::clamp(rho - nu, -1.0 + edge_floor, 1.0 - edge_floor);
    const double w = adaboost_weight(eps, edge_floor) - 0.5 * std::log((1.0 + shift) / (1.0 - shift));
    return std::max(0.0, w);
}

struct RoundUpdate {
    double error;
    double weight;
    std::vector<double> mass;
};

/// One plain update D(i) exp(-w h(i)) / Z applied to an explicit mass vector.
inline RoundUpdate adaboost_step(std::span<const double> mass, std::span<const int> signs, double edge_floor) {
    if (mass.size() != signs.size()) throw std::invalid_argument("adaboost_step: size mismatch");
    std::vector<double> minus;
    for (std::size_t q = 0; q < mass.size(); ++q)
        if (signs[q] < 0) minus.push_back(mass[q]);
    RoundUpdate r{compensated_sum(minus), 0.0, {}};
    r.weight = adaboost_weight(r.error, edge_floor);
    for (std::size_t q = 0; q < mass.size(); ++q) r.mass.push_back(mass[q] * std::exp(-r.weight * signs[q]));
    const double z = compensated_sum(r.mass);
    for (auto& x : r.mass) x /= z;
    return r;
}

template <WeakLearner W>
BoostResult adaboost(const SampleSet& sample, W& learner, const BoostConfig& cfg) {
    cfg.validate();
    auto layout = SupportLayout::of(sample);
    const auto support = layout->support();
    const std::size_t n = support.size();

    std::vector<double> score(n, 0.0), mass(n, 1.0 / static_cast<double>(n)), minus_mass(n);
    std::vector<std::uint64_t> bit(n);
    std::vector<double> weights, errors;
    std::vector<Hypothesis> chosen;
    double rho = 1.0;

    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        const SampleDistribution dist(layout, mass);
        Hypothesis h = learner(dist);
        if (h.size() != sample.universe()) throw std::invalid_argument("weak learner returned wrong universe");

        // bit[q] = 1 where h predicts +1; eps = mass where it predicts -1
        for (const auto& g : layout->groups()) {
            const std::uint64_t bits = h.word(g.word);
            for (std::size_t q = g.begin; q < g.end; ++q) bit[q] = (bits >> (support[q] % kWordBits)) & 1u;
        }
        for (std::size_t q = 0; q < n; ++q) minus_mass[q] = bit[q] ? 0.0 : mass[q];
        const double eps = compensated_sum(minus_mass);
        if (cfg.contract_advantage && 1.0 - 2.0 * eps < *cfg.contract_advantage - kMassTolerance)
            throw WeakLearnerBroken("round " + std::to_string(t + 1) + ": advantage " +
                                    std::to_string(1.0 - 2.0 * eps) + " below the contract");

        double w;
        if (cfg.variant == BoostVariant::plain) {
            w = adaboost_weight(eps, cfg.edge_floor);
        } else {
            rho = std::min(rho, 1.0 - 2.0 * eps);
            w = margin_nu_weight(eps, rho, cfg.nu, cfg.edge_floor);
        }
        weights.push_back(w);
        errors.push_back(eps);
        chosen.push_back(std::move(h));

        double lo = INFINITY;
        for (std::size_t q = 0; q < n; ++q) {
            score[q] += signed_by_bit(w, bit[q]);
            lo = std::min(lo, score[q]);
        }
        for (std::size_t q = 0; q < n; ++q) mass[q] = std::exp(-(score[q] - lo));
        const double z = compensated_sum(mass);
        for (auto& x : mass) x /= z;

        if (cfg.contract_advantage) {
            const double theta = *cfg.contract_advantage;
            const auto wrong = static_cast<double>(std::count_if(score.begin(), score.end(), [](double s) { return s < 0.0; }));
            const double bound = static_cast<double>(n) * std::exp(-0.5 * static_cast<double>(t + 1) * theta * theta);
            if (wrong > bound * (1.0 + 1e-9))
                throw std::logic_error("training error above the exponential-loss bound at round " +
                                       std::to_string(t + 1));
        }
    }

    std::vector<VotingTerm> terms;
    for (std::size_t t = 0; t < chosen.size(); ++t) terms.push_back({weights[t], chosen[t]});
    BoostResult r{VotingClassifier::normalized(std::move(terms)).merged(), std::move(weights), std::move(errors),
                  cfg.rounds, 0.0, 0.0};
    double total = compensated_sum(r.weights);
    std::size_t wrong = 0;
    double lo = INFINITY;
    for (double s : score) {
        wrong += s < 0.0;
        lo = std::min(lo, s);
    }
    r.training_error = static_cast<double>(wrong) / static_cast<double>(n);
    r.min_margin = total > 0.0 ? lo / total : 0.0;
    return r;
}

/// AdaBoost with the AdaBoost*_nu weight rule.
template <WeakLearner W>
BoostResult adaboost_margin_nu(const SampleSet& sample, W& learner, BoostConfig cfg) {
    cfg.variant = BoostVariant::margin_nu;
    return adaboost(sample, learner, cfg);
}

}  // namespace boostlb
