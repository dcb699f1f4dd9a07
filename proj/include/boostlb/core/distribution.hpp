// distribution.hpp
//
// Sparse probability distributions supported on a sample, and the advantage
// functional sum_i D(i) h(i) under the all-ones concept.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boostlb/core/hypothesis.hpp"
#include "boostlb/core/sample.hpp"

namespace boostlb {

inline constexpr double kMassTolerance = 1e-12;

/// Neumaier-compensated sum.
inline double compensated_sum(std::span<const double> xs) noexcept {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

/// Sorted support indices grouped by the 64-bit word they fall in.  Shared by
/// every distribution over the same support.
class SupportLayout {
  public:
    struct Group {
        std::size_t word;
        std::size_t begin;
        std::size_t end;
    };

    SupportLayout(std::size_t universe, std::shared_ptr<const std::vector<PointIndex>> support)
        : universe_(universe), support_(std::move(support)) {
        const auto& s = *support_;
        if (s.empty()) throw std::invalid_argument("empty support");
        if (!std::is_sorted(s.begin(), s.end()) ||
            std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("support must be sorted and duplicate free");
        if (s.back() >= universe_) throw std::out_of_range("support index outside universe");
        for (std::size_t p = 0; p < s.size(); ++p) {
            const std::size_t w = s[p] / kWordBits;
            if (groups_.empty() || groups_.back().word != w)
                groups_.push_back({w, p, p + 1});
            else
                groups_.back().end = p + 1;
        }
    }

    static std::shared_ptr<const SupportLayout> of(const SampleSet& s) {
        return std::make_shared<const SupportLayout>(s.universe(), s.distinct_handle());
    }

    std::size_t universe() const noexcept { return universe_; }
    std::span<const PointIndex> support() const noexcept { return *support_; }
    std::span<const Group> groups() const noexcept { return groups_; }
    std::size_t size() const noexcept { return support_->size(); }

  private:
    std::size_t universe_;
    std::shared_ptr<const std::vector<PointIndex>> support_;
    std::vector<Group> groups_;
};

/// Probability vector with strictly positive mass on exactly its support.
class SampleDistribution {
  public:
    SampleDistribution(std::shared_ptr<const SupportLayout> layout, std::vector<double> mass)
        : layout_(std::move(layout)), mass_(std::move(mass)) {
        validate();
    }

    static SampleDistribution uniform(const SampleSet& s) {
        auto layout = SupportLayout::of(s);
        std::vector<double> mass(layout->size(), 1.0 / static_cast<double>(layout->size()));
        return {std::move(layout), std::move(mass)};
    }

    /// Normalizes nonnegative weights; throws if any weight is not strictly positive.
    static SampleDistribution normalized(std::shared_ptr<const SupportLayout> layout,
                                         std::vector<double> weights) {
        const double total = compensated_sum(weights);
        if (!(total > 0.0) || !std::isfinite(total))
            throw std::domain_error("cannot normalize weights with total " + std::to_string(total));
        for (auto& w : weights) w /= total;
        return {std::move(layout), std::move(weights)};
    }

    /// Build from an index -> weight map (weights are normalized).
    static SampleDistribution from_map(std::size_t universe, const std::map<PointIndex, double>& m) {
        std::vector<PointIndex> idx;
        std::vector<double> w;
        for (auto [i, x] : m) {
            idx.push_back(i);
            w.push_back(x);
        }
        auto layout = std::make_shared<const SupportLayout>(
            universe, std::make_shared<const std::vector<PointIndex>>(std::move(idx)));
        return normalized(std::move(layout), std::move(w));
    }

    /// (1 - lambda) * a + lambda * b over the union of supports, 0 < lambda < 1.
    static SampleDistribution mixture(const SampleDistribution& a, const SampleDistribution& b,
                                      double lambda) {
        if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
        if (a.universe() != b.universe()) throw std::invalid_argument("universe mismatch");
        std::map<PointIndex, double> m;
        for (std::size_t p = 0; p < a.size(); ++p) m[a.support()[p]] += (1 - lambda) * a.mass()[p];
        for (std::size_t p = 0; p < b.size(); ++p) m[b.support()[p]] += lambda * b.mass()[p];
        return from_map(a.universe(), m);
    }

    std::size_t universe() const noexcept { return layout_->universe(); }
    std::size_t size() const noexcept { return mass_.size(); }
    std::span<const PointIndex> support() const noexcept { return layout_->support(); }
    std::span<const double> mass() const noexcept { return mass_; }
    const std::shared_ptr<const SupportLayout>& layout() const noexcept { return layout_; }

    double mass_at(PointIndex i) const {
        const auto s = support();
        auto it = std::lower_bound(s.begin(), s.end(), i);
        if (it == s.end() || *it != i) return 0.0;
        return mass_[static_cast<std::size_t>(it - s.begin())];
    }

    /// Total mass on indices < bound.
    double mass_below(std::size_t bound) const {
        const auto s = support();
        const auto cut = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), bound) - s.begin());
        return compensated_sum(std::span<const double>(mass_).first(cut));
    }

    void validate() const {
        if (mass_.size() != layout_->size())
            throw std::invalid_argument("mass vector does not match support");
        for (double x : mass_)
            if (!(x > 0.0)) throw std::domain_error("distribution mass must be strictly positive on its support");
        const double total = compensated_sum(mass_);
        if (std::abs(total - 1.0) > kMassTolerance)
            throw std::domain_error("distribution sums to " + std::to_string(total));
    }

  private:
    std::shared_ptr<const SupportLayout> layout_;
    std::vector<double> mass_;
};

/// x when bit is 1, -x when bit is 0, without a data-dependent branch.
inline double signed_by_bit(double x, std::uint64_t bit) noexcept {
    return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) ^ ((~bit & 1u) << 63));
}

namespace detail {

/// sum_p mass[p] * sign_p in support order, split over four lanes by position.
/// `word_of(w)` returns the sign bits of universe word w.
template <class WordFn>
double signed_mass_sum(const SupportLayout& layout, std::span<const double> mass, WordFn&& word_of) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const auto support = layout.support();
    for (const auto& g : layout.groups()) {
        const std::uint64_t bits = word_of(g.word);
        for (std::size_t p = g.begin; p < g.end; ++p) {
            const double x = mass[p];
            lane[p & 3] += signed_by_bit(x, bits >> (support[p] % kWordBits));
        }
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace detail

/// Advantage sum_i dist(i) * h(i) of h under the all-ones concept.
inline double advantage(const Hypothesis& h, const SampleDistribution& dist) {
    if (h.size() != dist.universe()) throw std::invalid_argument("advantage: universe mismatch");
    return detail::signed_mass_sum(*dist.layout(), dist.mass(),
                                   [&](std::size_t w) { return h.word(w); });
}

/// Same functional evaluated on an explicit sign vector.
inline double advantage(const SignVector& h, const SampleDistribution& dist) {
    if (h.size() != dist.universe()) throw std::invalid_argument("advantage: universe mismatch");
    return detail::signed_mass_sum(*dist.layout(), dist.mass(),
                                   [&](std::size_t w) { return h.word(w); });
}

}  // namespace boostlb
