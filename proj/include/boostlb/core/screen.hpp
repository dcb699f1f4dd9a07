// screen.hpp
//
// Fast threshold scans over many hypotheses against one distribution.
// Hypotheses are reduced to their signs on the support, packed by support
// position; a screen rejects most candidates from a cheap upper bound and the
// survivors are settled by an exact advantage that reproduces advantage()
// bit for bit.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "boostlb/core/distribution.hpp"
#include "boostlb/core/hypothesis.hpp"

namespace boostlb {

/// Bit p is 1 iff the hypothesis predicts +1 at the p-th support point.
using PackedSigns = std::vector<std::uint64_t>;

inline void pack_on_support(const Hypothesis& h, const SupportLayout& layout, PackedSigns& out) {
    const auto support = layout.support();
    out.assign(words_for(support.size()), 0);
    for (const auto& g : layout.groups()) {
        const std::uint64_t bits = h.word(g.word);
        for (std::size_t p = g.begin; p < g.end; ++p)
            out[p / kWordBits] |= ((bits >> (support[p] % kWordBits)) & 1u) << (p % kWordBits);
    }
}

inline PackedSigns pack_on_support(const Hypothesis& h, const SupportLayout& layout) {
    PackedSigns out;
    pack_on_support(h, layout, out);
    return out;
}

/// advantage() from packed signs; same lanes and order, hence the same double.
inline double advantage_packed(std::span<const std::uint64_t> bits, const SampleDistribution& dist) {
    const auto mass = dist.mass();
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t p = 0; p < mass.size(); ++p)
        lane[p & 3] += signed_by_bit(mass[p], bits[p / kWordBits] >> (p % kWordBits));
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

/// Upper bound test on the advantage.  The heaviest support points are summed
/// one by one in three stages, each closed by the mass not yet visited; the
/// remaining points are quantized to 8-bit levels stored as bit planes, which
/// pins their contribution down to the quantization error after eight
/// popcounts per 64 positions.  Never rejects a hypothesis whose exact
/// advantage reaches the threshold.
class AdvantageScreen {
  public:
    explicit AdvantageScreen(const SampleDistribution& dist) : mass_(dist.mass()) {
        const std::size_t n = mass_.size();
        const std::size_t top = std::min(n, kStages.back());
        select_heaviest(top);

        PackedSigns heavy(words_for(n), 0);
        for (auto p : order_) heavy[p / kWordBits] |= 1ull << (p % kWordBits);
        // Plain sums are fine here: rounding stays far below kSlack.
        double light_total = 0.0, hi = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double x = ((heavy[p / kWordBits] >> (p % kWordBits)) & 1u) ? 0.0 : mass_[p];
            light_total += x;
            hi = std::max(hi, x);
        }
        // tail_[s] = mass outside the first kStages[s] heaviest points
        double tail = light_total;
        for (std::size_t s = kStages.size(); s-- > 0;) {
            const std::size_t from = std::min(top, kStages[s]);
            const std::size_t to = s + 1 < kStages.size() ? std::min(top, kStages[s + 1]) : top;
            for (std::size_t q = to; q-- > from;) tail += mass_[order_[q]];
            tail_[s] = tail;
        }
        if (top == n || hi == 0.0) return;

        delta_ = hi / kLevels;
        const double inv = 1.0 / delta_;
        planes_.assign(words_for(n), {});
        std::array<std::uint8_t, kWordBits> level{};
        for (std::size_t c = 0; c < planes_.size(); ++c) {
            const std::size_t base = c * kWordBits;
            const std::size_t len = std::min(kWordBits, n - base);
            level.fill(0);
            for (std::size_t i = 0; i < len; ++i) {
                const std::size_t p = base + i;
                const double x = ((heavy[c] >> i) & 1u) ? 0.0 : mass_[p];
                const auto q = static_cast<std::uint8_t>(std::min(kLevels, x * inv + 0.5));
                level[i] = q;
                quant_error_ += std::abs(x - static_cast<double>(q) * delta_);
                level_total_ += q;
            }
            // transpose 64 bytes into 8 bit planes, eight bytes at a time
            for (std::size_t g = 0; g < kWordBits / 8; ++g) {
                std::uint64_t bytes;
                std::memcpy(&bytes, level.data() + 8 * g, 8);
                for (std::size_t j = 0; j < kPlanes; ++j) {
                    const std::uint64_t lsb = (bytes >> j) & 0x0101010101010101ull;
                    planes_[c][j] |= ((lsb * 0x0102040810204080ull) >> 56) << (8 * g);
                }
            }
        }
    }

    bool may_reach(std::span<const std::uint64_t> bits, double threshold) const {
        double partial = 0.0;
        std::size_t q = 0;
        for (std::size_t s = 0; s < kStages.size(); ++s) {
            const std::size_t k = std::min(order_.size(), kStages[s]);
            for (; q < k; ++q) {
                const std::uint32_t p = order_[q];
                partial += signed_by_bit(mass_[p], bits[p / kWordBits] >> (p % kWordBits));
            }
            if (partial + tail_[s] < threshold - kSlack) return false;
        }
        if (planes_.empty()) return true;
        std::int64_t plus = 0;
        for (std::size_t c = 0; c < planes_.size(); ++c) {
            const std::uint64_t b = bits[c];
            const auto& pl = planes_[c];
            std::int64_t acc = 0;
            for (std::size_t j = 0; j < kPlanes; ++j) acc += static_cast<std::int64_t>(std::popcount(b & pl[j])) << j;
            plus += acc;
        }
        const double estimate = delta_ * static_cast<double>(2 * plus - level_total_);
        return partial + estimate + quant_error_ >= threshold - kSlack;
    }

  private:
    /// order_ = the `top` heaviest positions, heaviest first, ties by position.
    void select_heaviest(std::size_t top) {
        const std::size_t n = mass_.size();
        order_.clear();
        if (top == 0) return;
        double cut = 0.0;
        if (top < n) {
            std::vector<double> copy(mass_.begin(), mass_.end());
            std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(top - 1), copy.end(),
                             std::greater<>());
            cut = copy[top - 1];
        }
        order_.reserve(top);
        for (std::size_t p = 0; p < n; ++p)
            if (mass_[p] > cut) order_.push_back(static_cast<std::uint32_t>(p));
        for (std::size_t p = 0; p < n && order_.size() < top; ++p)
            if (mass_[p] == cut) order_.push_back(static_cast<std::uint32_t>(p));
        std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return mass_[a] > mass_[b] || (mass_[a] == mass_[b] && a < b);
        });
    }

    static constexpr std::array<std::size_t, 3> kStages{16, 128, 1024};
    static constexpr std::size_t kPlanes = 8;
    static constexpr double kLevels = 255.0;
    // far above the rounding error of any sum here, far below any gap that matters
    static constexpr double kSlack = 1e-9;

    std::span<const double> mass_;
    std::vector<std::uint32_t> order_;
    std::array<double, 3> tail_{};
    std::vector<std::array<std::uint64_t, kPlanes>> planes_;
    double delta_ = 0.0;
    double quant_error_ = 0.0;
    std::int64_t level_total_ = 0;
};

/// Packed signs of lazy hypotheses and h0 on one support, kept across rounds
/// of a boosting run.  Switching to another support clears it.  Entries stop
/// being stored once the byte budget is spent; lookups still work.
class SupportSignCache {
  public:
    explicit SupportSignCache(std::size_t byte_budget = std::size_t{128} << 20) : budget_(byte_budget) {}

    /// Valid until the next call.
    std::span<const std::uint64_t> get(const Hypothesis& h, const std::shared_ptr<const SupportLayout>& layout) {
        if (layout != layout_) {
            map_.clear();
            used_ = 0;
            layout_ = layout;
        }
        std::uint64_t key;
        switch (h.kind()) {
            case HypothesisKind::lazy: key = h.key(); break;
            case HypothesisKind::h0: key = mix64(0x68302d6b6579ull ^ h.r1()); break;
            default:
                pack_on_support(h, *layout, scratch_);
                return scratch_;
        }
        if (auto it = map_.find(key); it != map_.end()) return it->second;
        const std::size_t bytes = words_for(layout->size()) * sizeof(std::uint64_t);
        if (used_ + bytes > budget_) {
            pack_on_support(h, *layout, scratch_);
            return scratch_;
        }
        used_ += bytes;
        return map_.emplace(key, pack_on_support(h, *layout)).first->second;
    }

    std::size_t entries() const noexcept { return map_.size(); }

  private:
    std::size_t budget_;
    std::size_t used_ = 0;
    std::shared_ptr<const SupportLayout> layout_;
    std::unordered_map<std::uint64_t, PackedSigns> map_;
    PackedSigns scratch_;
};

}  // namespace boostlb
