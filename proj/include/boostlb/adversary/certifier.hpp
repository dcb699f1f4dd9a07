// certifier.hpp
//
// Majority Voter: multiplicative weights over the sample with a fixed learning
// rate, drawing the j-th hypothesis from the j-th block.  Success shows the
// block structure can serve every distribution the booster could produce.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "boostlb/adversary/frs.hpp"
#include "boostlb/adversary/hypothesis_sets.hpp"
#include "boostlb/adversary/params.hpp"
#include "boostlb/core/distribution.hpp"
#include "boostlb/core/screen.hpp"
#include "boostlb/core/voting.hpp"

namespace boostlb {

/// Learning rate for advantage 2 * gamma: ln((1 + 2 gamma) / (1 - 2 gamma)) / 2.
inline double certifier_rate(double gamma) {
    if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("certifier gamma must lie in [0, 1/2)");
    return 0.5 * std::log((1.0 + 2.0 * gamma) / (1.0 - 2.0 * gamma));
}

struct Certificate {
    VotingClassifier f;
    double gamma;                     // the certifier's gamma, half the advantage threshold
    double eta;
    std::vector<double> normalizers;  // Z_1 .. Z_k
    double min_margin;                // min over S of f(i)
    double max_normalizer;
    /// max_i ln exp(-eta f_k(i)) and ln(|S| prod Z_l).
    double log_potential_lhs;
    double log_potential_rhs;
};

struct CertifierFail {
    std::size_t round;  // 0-based block with no qualifying hypothesis
};

class CertifierInvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

inline constexpr double kCertifierTolerance = 1e-9;

/// Runs the certifier over the blocks of `family`.  `threshold` is the
/// advantage demanded per round (default params.select_threshold); with
/// restrict_minus the minus quota on F_{r,S} is enforced as in g.
inline std::variant<Certificate, CertifierFail> majority_voter_certify(
    const HypothesisSets& sets, int family, const SampleSet& sample, const AdversaryParams& p,
    bool restrict_minus, std::optional<double> threshold = std::nullopt) {
    const double theta = threshold.value_or(p.select_threshold);
    const double gamma = theta / 2.0;
    const double eta = certifier_rate(gamma);
    const std::size_t k = sets.blocks(family);
    if (k == 0) throw std::invalid_argument("certifier needs at least one block");

    auto layout = SupportLayout::of(sample);
    const auto support = layout->support();
    const std::size_t n = support.size();
    const auto frs = restrict_minus ? compute_frs(sample, p) : std::nullopt;
    const bool quota_feasible = !frs || p.minus_quota <= frs->indices.size();

    std::vector<double> mass(n, 1.0 / static_cast<double>(n));
    std::vector<long> fk(n, 0);  // unnormalized vote sum_j h_j(i)
    std::vector<VotingTerm> terms;
    std::vector<double> normalizers;
    terms.reserve(k);
    normalizers.reserve(k);
    const double plus = std::exp(-eta), minus = std::exp(eta);
    SupportSignCache signs;

    for (std::size_t j = 0; j < k; ++j) {
        SampleDistribution dist(layout, mass);
        std::optional<Hypothesis> chosen;
        double adv = 0.0;
        if (dist.mass_below(p.first_part_end()) > 0.5 + gamma) {
            chosen = Hypothesis::h0(p.u, p.r1).with_id({static_cast<std::uint32_t>(family),
                                                        static_cast<std::uint32_t>(j), 0});
            adv = advantage(*chosen, dist);
        } else if (quota_feasible) {
            const AdvantageScreen screen(dist);
            for (std::size_t i = 0; i < sets.block_size(family, j) && !chosen; ++i) {
                Hypothesis h = sets.at(family, j, i);
                if (frs && minus_count(h, frs->indices) < p.minus_quota) continue;
                const auto bits = signs.get(h, layout);
                if (!screen.may_reach(bits, theta)) continue;
                const double a = advantage_packed(bits, dist);
                if (a >= theta) {
                    chosen = std::move(h);
                    adv = a;
                }
            }
        }
        if (!chosen) return CertifierFail{j};
        if (adv < theta - kCertifierTolerance)
            throw CertifierInvariantError("certifier chose a hypothesis below the threshold");

        std::vector<double> next(n);
        for (std::size_t q = 0; q < n; ++q) {
            const int s = chosen->sign(support[q]);
            fk[q] += s;
            next[q] = mass[q] * (s > 0 ? plus : minus);
        }
        const double z = compensated_sum(next);
        for (auto& x : next) x /= z;
        mass = std::move(next);
        normalizers.push_back(z);
        terms.push_back({1.0 / static_cast<double>(k), std::move(*chosen)});
    }

    Certificate c{VotingClassifier(std::move(terms)), gamma, eta, std::move(normalizers), 0.0, 0.0, 0.0, 0.0};
    const long worst = *std::min_element(fk.begin(), fk.end());
    c.min_margin = static_cast<double>(worst) / static_cast<double>(k);
    c.max_normalizer = *std::max_element(c.normalizers.begin(), c.normalizers.end());
    c.log_potential_lhs = -eta * static_cast<double>(worst);
    c.log_potential_rhs = std::log(static_cast<double>(n));
    for (double z : c.normalizers) c.log_potential_rhs += std::log(z);

    if (c.max_normalizer > 1.0 - 2.0 * gamma * gamma + kCertifierTolerance)
        throw CertifierInvariantError("normalizer above 1 - 2 gamma^2: " + std::to_string(c.max_normalizer));
    // relative tolerance on the bound itself, i.e. absolute in log space
    if (c.log_potential_lhs > c.log_potential_rhs + kCertifierTolerance)
        throw CertifierInvariantError("potential bound violated");
    if (c.min_margin < gamma / 4.0 - kCertifierTolerance)
        throw CertifierInvariantError("certified margin below gamma/4: " + std::to_string(c.min_margin));
    return c;
}

}  // namespace boostlb
