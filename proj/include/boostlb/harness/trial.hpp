// trial.hpp
//
// One seeded experiment: build the hypothesis sets, draw the sample, boost
// against the adversarial (or control) weak learner and measure the output
// exactly over the whole universe.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "boostlb/adversary/frs.hpp"
#include "boostlb/adversary/hypothesis_sets.hpp"
#include "boostlb/adversary/params.hpp"
#include "boostlb/adversary/selectors.hpp"
#include "boostlb/boosting/adaboost.hpp"
#include "boostlb/boosting/bagging.hpp"
#include "boostlb/core/rng.hpp"
#include "boostlb/core/sample.hpp"
#include "boostlb/core/voting.hpp"

namespace boostlb {

enum class Algorithm { adaboost, adastar, bagged };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::adaboost: return "adaboost";
        case Algorithm::adastar: return "adastar";
        case Algorithm::bagged: return "bagged";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "adaboost") return Algorithm::adaboost;
    if (s == "adastar") return Algorithm::adastar;
    if (s == "bagged") return Algorithm::bagged;
    throw std::invalid_argument("unknown algorithm '" + s + "' (adaboost, adastar, bagged)");
}

/// Child-seed tags of a trial seed.
namespace seed_tag {
inline constexpr std::uint64_t hypotheses = 7;
inline constexpr std::uint64_t sample = 8;
inline constexpr std::uint64_t bags = 9;
}  // namespace seed_tag

struct TrialSpec {
    double gamma = 0.1;
    double d = 8;
    std::size_t m = 4096;
    AdversaryConfig adversary{};
    Algorithm algo = Algorithm::adaboost;
    bool adversary_on = true;
    std::uint64_t seed = 0;
    std::optional<std::size_t> rounds;  // default: zero-training-error horizon
    double nu = 0.1;                    // adastar only
    std::optional<std::size_t> bags;    // bagged only; default ceil(log2(4m))
    std::optional<std::size_t> bag_size;  // bagged only; default m
};

namespace failure_tag {
inline constexpr const char* exhausted = "adversary_exhausted";
inline constexpr const char* broken = "weak_learner_broken";
inline constexpr const char* contract = "contract_violations";
inline constexpr const char* bags_dropped = "bags_dropped";
}  // namespace failure_tag

struct TrialResult {
    std::uint64_t seed = 0;
    std::size_t m = 0;
    std::size_t u = 0;
    std::size_t r = 0;
    std::size_t r1 = 0;
    double gamma = 0;
    double d = 0;
    double alpha = 0;
    Algorithm algo = Algorithm::adaboost;
    bool adversary_on = true;
    double exact_error = 0;
    double h0_weight = 0;
    bool in_spart1 = false;
    /// NaN when the sample is outside S_part1 (no F set).
    double frs_minus_fraction = std::numeric_limits<double>::quiet_NaN();
    std::size_t rounds_used = 0;
    std::optional<std::string> failure;

    bool failed() const noexcept { return failure.has_value(); }
};

/// Field-wise equality, NaN equal to NaN.
inline bool same_result(const TrialResult& a, const TrialResult& b) {
    auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.seed == b.seed && a.m == b.m && a.u == b.u && a.r == b.r && a.r1 == b.r1 && eq(a.gamma, b.gamma) &&
           eq(a.d, b.d) && eq(a.alpha, b.alpha) && a.algo == b.algo && a.adversary_on == b.adversary_on &&
           eq(a.exact_error, b.exact_error) && eq(a.h0_weight, b.h0_weight) && a.in_spart1 == b.in_spart1 &&
           eq(a.frs_minus_fraction, b.frs_minus_fraction) && a.rounds_used == b.rounds_used &&
           a.failure == b.failure;
}

/// Per-trial learner record that does not go into the CSV.
struct TrialDiagnostics {
    LearnerLog log;
    /// Distinct-point training error of the final voter; NaN for bagged runs and failures.
    double training_error = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double minus_fraction(const SignVector& predictions, const std::optional<FrS>& frs) {
    if (!frs) return std::numeric_limits<double>::quiet_NaN();
    std::size_t minus = 0;
    for (PointIndex i : frs->indices) minus += predictions[i] < 0;
    return static_cast<double>(minus) / static_cast<double>(frs->indices.size());
}

}  // namespace detail

/// Runs one trial.  Weak-learner failures become failure tags, never
/// exceptions; invalid parameters still throw.  A trial that produced no
/// classifier keeps exact_error = h0_weight = 0.  `sets` replaces the seeded
/// hypothesis sets (fixtures).
inline TrialResult run_trial(const TrialSpec& spec, std::shared_ptr<const HypothesisSets> sets = nullptr,
                             TrialDiagnostics* diag = nullptr) {
    const AdversaryParams p = derive_params(spec.gamma, spec.d, spec.m, spec.adversary);
    TrialResult out;
    out.seed = spec.seed;
    out.m = spec.m;
    out.u = p.u;
    out.r = p.r;
    out.r1 = p.r1;
    out.gamma = spec.gamma;
    out.d = spec.d;
    out.alpha = p.alpha;
    out.algo = spec.algo;
    out.adversary_on = spec.adversary_on;

    if (!sets) sets = std::make_shared<const HypothesisSets>(p, derive_seed(spec.seed, {seed_tag::hypotheses}));
    if (sets->universe() != p.u) throw std::invalid_argument("hypothesis sets do not match the universe");
    const Universe universe(p.u);
    const SampleSet sample = draw_sample(universe, spec.m, derive_seed(spec.seed, {seed_tag::sample}));
    const auto frs = compute_frs(sample, p);
    out.in_spart1 = frs.has_value();

    AdversarialWeakLearner learner(sets, p, spec.adversary_on);
    BoostConfig cfg;
    cfg.rounds = spec.rounds.value_or(default_rounds(spec.m, spec.gamma));
    cfg.contract_advantage = p.select_threshold;
    out.rounds_used = cfg.rounds;

    try {
        switch (spec.algo) {
            case Algorithm::adaboost:
            case Algorithm::adastar: {
                if (spec.algo == Algorithm::adastar) {
                    cfg.variant = BoostVariant::margin_nu;
                    cfg.nu = spec.nu;
                }
                const BoostResult r = adaboost(sample, learner, cfg);
                out.exact_error = exact_error(r.classifier, universe);
                out.h0_weight = r.classifier.h0_weight();
                out.frs_minus_fraction = detail::minus_fraction(r.classifier.predictions(), frs);
                if (diag) diag->training_error = r.training_error;
                break;
            }
            case Algorithm::bagged: {
                const BaggedResult r =
                    bagged_majority(sample, learner, cfg, spec.bags.value_or(default_bags(spec.m)),
                                    spec.bag_size.value_or(spec.m), derive_seed(spec.seed, {seed_tag::bags}));
                const SignVector pred = r.vote.predictions();
                out.exact_error = static_cast<double>(pred.count_minus()) / static_cast<double>(p.u);
                out.h0_weight = r.vote.h0_weight();
                out.frs_minus_fraction = detail::minus_fraction(pred, frs);
                if (r.failed_bags > 0) out.failure = std::string(failure_tag::bags_dropped) + ":" + std::to_string(r.failed_bags);
                break;
            }
        }
    } catch (const AdversaryExhausted&) {
        out.failure = failure_tag::exhausted;
    } catch (const WeakLearnerBroken&) {
        out.failure = failure_tag::broken;
    }
    if (!out.failure && learner.log().contract_violations > 0)
        out.failure = std::string(failure_tag::contract) + ":" + std::to_string(learner.log().contract_violations);
    if (diag) diag->log = learner.log();
    return out;
}

}  // namespace boostlb
