// params.hpp
//
// Derived quantities of the adversarial construction against boosting over a
// finite universe.  The universe is split into a first part [0, u - r1), where
// h0 predicts +1, and the last r1 points, where h0 predicts -1.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace boostlb {

/// Universal constants left unspecified by the analysis.  c0..c3 belong to the
/// weak-learner lemma, mc1..mc3 to the Montgomery-Smith anti-concentration
/// bound.  mc2 defaults to 1/2: with a single coordinate the event has
/// probability exactly 1/2, so no larger constant can hold.
struct CalibrationConstants {
    double c0 = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double mc1 = 1.0;
    double mc2 = 0.5;
    double mc3 = 1.0;

    void validate() const {
        auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
        if (!(pos(c0) && pos(c1) && pos(c2) && pos(c3) && pos(mc1) && pos(mc2) && pos(mc3)))
            throw std::invalid_argument("calibration constants must be positive and finite");
        if (c0 > 1.0 || c1 > 1.0 || mc1 > 1.0 || mc2 > 1.0)
            throw std::invalid_argument("calibration constants c0, c1, mc1, mc2 must be <= 1");
        if (c2 < 1.0 || c3 < 1.0 || mc3 < 1.0)
            throw std::invalid_argument("calibration constants c2, c3, mc3 must be >= 1");
    }
};

/// How the number of -1 entries demanded on F_{r,S} is chosen.
enum class QuotaRule {
    /// ceil((1/2 + alpha * gamma' / 2) * r); exceeds r outside the lemma's regime.
    faithful,
    /// ceil((1/2 + alpha * gamma / 2) * r): the same bias at the advantage that the
    /// boosting interface actually sees (gamma' / 8 = gamma).
    calibrated,
};

/// User-facing knobs.  Everything else is derived.
struct AdversaryConfig {
    double alpha = 2.0;
    std::size_t per_block_budget = 4096;
    std::optional<double> select_threshold;  // default 2 * gamma
    std::optional<double> switch_threshold;  // default 2 * gamma
    QuotaRule quota_rule = QuotaRule::calibrated;
    std::optional<std::size_t> minus_quota;  // overrides the rule when set
    CalibrationConstants constants{};
};

struct AdversaryParams {
    double gamma = 0;
    double gamma_prime = 0;
    double d = 0;
    std::size_t m = 0;
    double alpha = 0;
    std::size_t r = 0;
    std::size_t r1 = 0;
    std::size_t u = 0;
    std::size_t k = 0;
    std::size_t per_block_budget = 0;
    double delta = 0.25;
    double select_threshold = 0;
    double switch_threshold = 0;
    /// First-part mass above which h0 is served directly (1/2 + gamma'/8).
    double h0_mass_threshold = 0;
    std::size_t minus_quota = 0;
    std::size_t faithful_minus_quota = 0;
    QuotaRule quota_rule = QuotaRule::calibrated;
    CalibrationConstants constants{};
    /// gamma' * alpha <= c0, the regime the lemma is stated for.
    bool lemma_applicable = false;

    /// Boundary between the first part and the last r1 points.
    std::size_t first_part_end() const noexcept { return u - r1; }

    /// h0 weight above which the last r1 points are forced negative.
    double case1_threshold() const noexcept {
        const double s = 14.0 * std::sqrt(constants.c3 * gamma * gamma);
        return s / (1.0 + s);
    }

    /// Hypotheses in one family: k blocks of per_block_budget random ones, plus h0.
    std::size_t family_size() const noexcept { return k * per_block_budget + 1; }
};

namespace detail {

/// Ceiling that ignores floating-point dust just above an integer.
inline std::size_t ceil_count(double x) {
    if (!(x >= 0.0) || !std::isfinite(x) || x > 1e15)
        throw std::domain_error("derived parameter out of range: " + std::to_string(x));
    return static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

}  // namespace detail

inline AdversaryParams derive_params(double gamma, double d, std::size_t m,
                                     const AdversaryConfig& cfg = {}) {
    using detail::ceil_count;
    if (!(gamma > 0.0 && gamma <= 0.25))
        throw std::invalid_argument("gamma must satisfy 0 < gamma <= 1/4");
    if (!(d >= std::log(1.0 / gamma)))
        throw std::invalid_argument("d must satisfy d >= ln(1/gamma)");
    if (!(cfg.alpha >= 1.0)) throw std::invalid_argument("alpha must satisfy alpha >= 1");
    if (cfg.per_block_budget < 1) throw std::invalid_argument("per_block_budget must be >= 1");
    cfg.constants.validate();

    AdversaryParams p;
    p.gamma = gamma;
    p.gamma_prime = 8.0 * gamma;
    p.d = d;
    p.m = m;
    p.alpha = cfg.alpha;
    p.r = ceil_count(d / (p.gamma_prime * p.gamma_prime));
    if (m < 4 * p.r)
        throw std::invalid_argument("m must satisfy m >= 4 * ceil(d * (8 gamma)^-2) = " +
                                    std::to_string(4 * p.r));
    p.r1 = ceil_count(cfg.alpha * cfg.alpha * static_cast<double>(p.r));
    const double md = static_cast<double>(m);
    p.u = ceil_count(8.0 * cfg.alpha * cfg.alpha * md / std::log(md / static_cast<double>(p.r)));
    if (p.u > std::size_t{UINT32_MAX}) throw std::invalid_argument("universe too large");
    if (8 * p.r1 > p.u) throw std::invalid_argument("derived parameters violate r1 <= u/8");
    p.k = ceil_count(std::log(static_cast<double>(p.u)) / (gamma * gamma));
    p.per_block_budget = cfg.per_block_budget;
    p.select_threshold = cfg.select_threshold.value_or(2.0 * gamma);
    p.switch_threshold = cfg.switch_threshold.value_or(2.0 * gamma);
    if (!(p.select_threshold > 0.0 && p.select_threshold < 1.0) ||
        !(p.switch_threshold > 0.0 && p.switch_threshold < 1.0))
        throw std::invalid_argument("advantage thresholds must lie in (0, 1)");
    p.h0_mass_threshold = 0.5 + p.gamma_prime / 8.0;
    const double rr = static_cast<double>(p.r);
    p.faithful_minus_quota = ceil_count((0.5 + cfg.alpha * p.gamma_prime / 2.0) * rr);
    p.quota_rule = cfg.quota_rule;
    if (cfg.minus_quota)
        p.minus_quota = *cfg.minus_quota;
    else if (cfg.quota_rule == QuotaRule::faithful)
        p.minus_quota = p.faithful_minus_quota;
    else
        p.minus_quota = ceil_count((0.5 + cfg.alpha * gamma / 2.0) * rr);
    p.constants = cfg.constants;
    p.lemma_applicable = p.gamma_prime * cfg.alpha <= cfg.constants.c0;
    return p;
}

/// Quantities of the unscaled construction, reported but never used to size
/// anything (they are astronomically large at any desk-scale setting).
struct FaithfulReport {
    double c3 = 0;                  // (ln(5 c0^-2) + 5 ln ln 8 + 8 c2 + 3) * 64
    double alpha = 0;               // 5 * 28 * sqrt(c3)
    double log_family_bound = 0;    // ln(4 c1^-2 k ln(k/delta) exp(8 c2 gamma'^2 r1) + 1)
    double log_block_size = 0;      // ln(N / k)
    bool r1_covers_family = false;  // r1 >= 40 lg |H1| at the current r1
};

inline FaithfulReport faithful_report(const AdversaryParams& p) {
    const auto& c = p.constants;
    FaithfulReport f;
    f.c3 = (std::log(5.0 / (c.c0 * c.c0)) + 5.0 * std::log(std::log(8.0)) + 8.0 * c.c2 + 3.0) * 64.0;
    f.alpha = 5.0 * 28.0 * std::sqrt(f.c3);
    const double k = std::log(static_cast<double>(p.u)) / (p.gamma_prime * p.gamma_prime);
    const double log_n = std::log(2.0 / (c.c1 * c.c1)) + std::log(k) + std::log(std::log(k / p.delta)) +
                         8.0 * c.c2 * p.gamma_prime * p.gamma_prime * static_cast<double>(p.r1);
    f.log_family_bound = std::log(2.0) + log_n;  // the +1 for h0 is negligible here
    f.log_block_size = log_n - std::log(k);
    const double lg_h1 = (log_n) / std::log(2.0);
    f.r1_covers_family = static_cast<double>(p.r1) >= 40.0 * lg_h1;
    return f;
}

}  // namespace boostlb
