// hypothesis.hpp
//
// Sign vectors over the finite universe {0, ..., u-1}.  Bit value 1 encodes
// the label +1 and bit value 0 encodes -1.  Indices are 0-based throughout the
// library; the structural hypothesis h0 is -1 exactly on the last r1 indices.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "boostlb/core/rng.hpp"

namespace boostlb {

using PointIndex = std::uint32_t;

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t n) noexcept { return (n + kWordBits - 1) / kWordBits; }

/// Mask of the valid bits in word `w` of an n-bit vector.
constexpr std::uint64_t valid_mask(std::size_t n, std::size_t w) noexcept {
    const std::size_t lo = w * kWordBits;
    if (lo + kWordBits <= n) return ~0ull;
    if (lo >= n) return 0;
    return (1ull << (n - lo)) - 1;
}

/// Explicit bit-packed sign vector.
class SignVector {
  public:
    SignVector() = default;
    explicit SignVector(std::size_t n, int fill = 1)
        : words_(words_for(n), fill > 0 ? ~0ull : 0ull), size_(n) {
        if (!words_.empty()) words_.back() &= valid_mask(n, words_.size() - 1);
    }

    std::size_t size() const noexcept { return size_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    int operator[](std::size_t i) const noexcept {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1u ? 1 : -1;
    }

    void set(std::size_t i, int sign) {
        if (i >= size_) throw std::out_of_range("SignVector::set index out of range");
        const std::uint64_t bit = 1ull << (i % kWordBits);
        if (sign > 0)
            words_[i / kWordBits] |= bit;
        else
            words_[i / kWordBits] &= ~bit;
    }

    std::uint64_t word(std::size_t w) const noexcept { return words_[w]; }

    std::size_t count_minus() const noexcept {
        std::size_t plus = 0;
        for (auto w : words_) plus += static_cast<std::size_t>(std::popcount(w));
        return size_ - plus;
    }

    friend bool operator==(const SignVector&, const SignVector&) = default;

  private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/// Where a hypothesis came from.  Family 1 and 2 are the adversary's H1 and H2;
/// index 0 inside a block is always h0.
struct HypothesisId {
    std::uint32_t family = 0;
    std::uint32_t block = 0;
    std::uint32_t index = 0;

    friend bool operator==(const HypothesisId&, const HypothesisId&) = default;
};

enum class HypothesisKind { explicit_signs, h0, all_ones, lazy };

/// A hypothesis u -> {-1,+1}.  Cheap to copy: lazy and structural hypotheses
/// hold a few integers, explicit ones share their storage.
class Hypothesis {
  public:
    static Hypothesis all_ones(std::size_t u) {
        Hypothesis h(HypothesisKind::all_ones, u);
        return h;
    }

    /// +1 on [0, u - r1), -1 on [u - r1, u).
    static Hypothesis h0(std::size_t u, std::size_t r1) {
        if (r1 > u) throw std::invalid_argument("h0 requires r1 <= u");
        Hypothesis h(HypothesisKind::h0, u);
        h.r1_ = r1;
        return h;
    }

    /// Uniform random signs regenerated from `key` on demand.
    static Hypothesis lazy(std::size_t u, std::uint64_t key, HypothesisId id = {}) {
        Hypothesis h(HypothesisKind::lazy, u);
        h.key_ = key;
        h.base_ = stream_base(key);
        h.id_ = id;
        return h;
    }

    static Hypothesis from_signs(SignVector signs, HypothesisId id = {}) {
        Hypothesis h(HypothesisKind::explicit_signs, signs.size());
        h.signs_ = std::make_shared<const SignVector>(std::move(signs));
        h.id_ = id;
        return h;
    }

    Hypothesis with_id(HypothesisId id) const {
        Hypothesis h = *this;
        h.id_ = id;
        return h;
    }

    HypothesisKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return u_; }
    std::size_t r1() const noexcept { return r1_; }
    std::uint64_t key() const noexcept { return key_; }
    const HypothesisId& id() const noexcept { return id_; }
    bool is_h0() const noexcept { return kind_ == HypothesisKind::h0; }

    /// 64 signs starting at index 64*w; bits past the universe are zero.
    std::uint64_t word(std::size_t w) const noexcept {
        switch (kind_) {
            case HypothesisKind::all_ones:
                return valid_mask(u_, w);
            case HypothesisKind::h0:
                return valid_mask(u_ - r1_, w);
            case HypothesisKind::lazy:
                return counter_bits_from_base(base_, w) & valid_mask(u_, w);
            case HypothesisKind::explicit_signs:
                return signs_->word(w);
        }
        return 0;
    }

    int sign(std::size_t i) const {
        if (i >= u_) throw std::out_of_range("Hypothesis::sign index out of range");
        return (word(i / kWordBits) >> (i % kWordBits)) & 1u ? 1 : -1;
    }

    SignVector materialize() const {
        SignVector out(u_, -1);
        for (std::size_t w = 0; w < words_for(u_); ++w) {
            const std::uint64_t bits = word(w);
            for (std::size_t b = 0; b < kWordBits && w * kWordBits + b < u_; ++b)
                if ((bits >> b) & 1u) out.set(w * kWordBits + b, 1);
        }
        return out;
    }

    /// Same function on the universe (ignores the id).
    bool same_function(const Hypothesis& o) const {
        if (u_ != o.u_) return false;
        if (kind_ == o.kind_) {
            switch (kind_) {
                case HypothesisKind::all_ones: return true;
                case HypothesisKind::h0: return r1_ == o.r1_;
                case HypothesisKind::lazy: return key_ == o.key_;
                case HypothesisKind::explicit_signs: break;
            }
        }
        for (std::size_t w = 0; w < words_for(u_); ++w)
            if (word(w) != o.word(w)) return false;
        return true;
    }

    std::string describe() const {
        switch (kind_) {
            case HypothesisKind::all_ones: return "h0*";
            case HypothesisKind::h0: return "h0";
            case HypothesisKind::lazy:
            case HypothesisKind::explicit_signs:
                return "H" + std::to_string(id_.family) + "[" + std::to_string(id_.block) +
                       "][" + std::to_string(id_.index) + "]";
        }
        return "?";
    }

  private:
    Hypothesis(HypothesisKind kind, std::size_t u) : kind_(kind), u_(u) {
        if (u == 0) throw std::invalid_argument("hypothesis over an empty universe");
    }

    HypothesisKind kind_;
    std::size_t u_;
    std::size_t r1_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t base_ = 0;
    HypothesisId id_{};
    std::shared_ptr<const SignVector> signs_;
};

}  // namespace boostlb
