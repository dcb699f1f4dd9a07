// selectors.hpp
//
// The adversarial selector g over H1, the fallback selector t over H2, and the
// switch rule that combines them into a weak learner.
#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "boostlb/adversary/frs.hpp"
#include "boostlb/adversary/hypothesis_sets.hpp"
#include "boostlb/adversary/params.hpp"
#include "boostlb/core/distribution.hpp"
#include "boostlb/core/screen.hpp"

namespace boostlb {

/// Neither selector found a hypothesis meeting the advantage threshold.
class AdversaryExhausted : public std::runtime_error {
  public:
    AdversaryExhausted() : std::runtime_error("no hypothesis in H1 or H2 meets the advantage threshold") {}
};

enum class SelectionSource { g_mass_branch, g_scan, t_scan };

struct Selection {
    Hypothesis hypothesis;
    double advantage;
    SelectionSource source;
};

namespace detail {

/// First hypothesis of `family` in (block, index) order with advantage >= threshold
/// that also passes `admit` (checked first, it is cheap).  `cache` may be null.
template <class Admit>
std::optional<Selection> scan_family(const HypothesisSets& sets, int family, const SampleDistribution& dist,
                                     double threshold, SelectionSource source, SupportSignCache* cache,
                                     Admit&& admit) {
    SupportSignCache local(0);
    SupportSignCache& signs = cache ? *cache : local;
    const AdvantageScreen screen(dist);
    for (std::size_t b = 0; b < sets.blocks(family); ++b) {
        const std::size_t n = sets.block_size(family, b);
        for (std::size_t j = 0; j < n; ++j) {
            Hypothesis h = sets.at(family, b, j);
            if (!admit(h)) continue;
            const auto bits = signs.get(h, dist.layout());
            if (!screen.may_reach(bits, threshold)) continue;
            const double adv = advantage_packed(bits, dist);
            if (adv >= threshold) return Selection{std::move(h), adv, source};
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// g over H1.  `frs` must be computed from the support of `dist`.
inline std::optional<Selection> g_select(const SampleDistribution& dist, const HypothesisSets& sets,
                                         const std::optional<FrS>& frs, const AdversaryParams& p,
                                         SupportSignCache* cache = nullptr) {
    if (dist.mass_below(p.first_part_end()) > p.h0_mass_threshold) {
        Hypothesis h0 = Hypothesis::h0(p.u, p.r1).with_id({1, 0, 0});
        const double adv = advantage(h0, dist);
        if (adv >= p.select_threshold) return Selection{std::move(h0), adv, SelectionSource::g_mass_branch};
    }
    if (!frs)
        return detail::scan_family(sets, 1, dist, p.select_threshold, SelectionSource::g_scan, cache,
                                   [](const Hypothesis&) { return true; });
    if (p.minus_quota > frs->indices.size()) return std::nullopt;
    return detail::scan_family(sets, 1, dist, p.select_threshold, SelectionSource::g_scan, cache,
                               [&](const Hypothesis& h) { return minus_count(h, frs->indices) >= p.minus_quota; });
}

/// t over H2: no constraint beyond the advantage.
inline std::optional<Selection> t_select(const SampleDistribution& dist, const HypothesisSets& sets,
                                         const AdversaryParams& p, SupportSignCache* cache = nullptr) {
    return detail::scan_family(sets, 2, dist, p.select_threshold, SelectionSource::t_scan, cache,
                               [](const Hypothesis&) { return true; });
}

/// Switch rule: g when it reaches the switch threshold, otherwise t.
/// The support of `dist` plays the role of the training set S.  The cache only
/// affects speed.
inline Selection weak_learn(const SampleDistribution& dist, const HypothesisSets& sets,
                            const AdversaryParams& p, SupportSignCache* cache = nullptr) {
    const auto frs = compute_frs(dist.support(), p.first_part_end(), p.r);
    if (auto g = g_select(dist, sets, frs, p, cache); g && g->advantage >= p.switch_threshold) return *g;
    if (auto t = t_select(dist, sets, p, cache)) return *t;
    throw AdversaryExhausted();
}

struct LearnerLog {
    std::size_t calls = 0;
    std::size_t g_mass_branch = 0;
    std::size_t g_scan = 0;
    std::size_t t_scan = 0;
    std::size_t contract_violations = 0;
    double min_advantage = 1.0;
};

/// Stateful wrapper used by boosting: serves weak_learn (or t alone when the
/// adversary is off) and logs every answer against the switch threshold.
class AdversarialWeakLearner {
  public:
    AdversarialWeakLearner(std::shared_ptr<const HypothesisSets> sets, AdversaryParams params,
                           bool adversary_on)
        : sets_(std::move(sets)), params_(std::move(params)), adversary_on_(adversary_on) {
        if (!sets_) throw std::invalid_argument("null hypothesis sets");
    }

    Selection select(const SampleDistribution& dist) {
        if (adversary_on_) return weak_learn(dist, *sets_, params_, &cache_);
        if (auto t = t_select(dist, *sets_, params_, &cache_)) return *t;
        throw AdversaryExhausted();
    }

    Hypothesis operator()(const SampleDistribution& dist) {
        Selection s = select(dist);
        ++log_.calls;
        switch (s.source) {
            case SelectionSource::g_mass_branch: ++log_.g_mass_branch; break;
            case SelectionSource::g_scan: ++log_.g_scan; break;
            case SelectionSource::t_scan: ++log_.t_scan; break;
        }
        if (s.advantage < params_.switch_threshold - kMassTolerance) ++log_.contract_violations;
        log_.min_advantage = std::min(log_.min_advantage, s.advantage);
        return std::move(s.hypothesis);
    }

    const LearnerLog& log() const noexcept { return log_; }
    const AdversaryParams& params() const noexcept { return params_; }
    const HypothesisSets& sets() const noexcept { return *sets_; }
    bool adversary_on() const noexcept { return adversary_on_; }

  private:
    std::shared_ptr<const HypothesisSets> sets_;
    AdversaryParams params_;
    bool adversary_on_;
    LearnerLog log_;
    SupportSignCache cache_;
};

}  // namespace boostlb
