// sample.hpp
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "boostlb/core/hypothesis.hpp"
#include "boostlb/core/rng.hpp"

namespace boostlb {

/// The finite domain {0, ..., size-1}.
struct Universe {
    std::size_t size;

    explicit Universe(std::size_t u) : size(u) {
        if (u < 1) throw std::invalid_argument("universe size must be >= 1");
        if (u > std::size_t{UINT32_MAX}) throw std::invalid_argument("universe too large");
    }
};

/// Forward range over the indices of [0, u) that are not in a sorted set.
class ComplementRange {
  public:
    class iterator {
      public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = PointIndex;
        using difference_type = std::ptrdiff_t;
        using pointer = const PointIndex*;
        using reference = PointIndex;

        iterator() = default;
        iterator(std::span<const PointIndex> taken, std::size_t u, std::size_t pos)
            : taken_(taken), u_(u), cur_(pos) {
            skip();
        }
        PointIndex operator*() const { return static_cast<PointIndex>(cur_); }
        iterator& operator++() {
            ++cur_;
            skip();
            return *this;
        }
        iterator operator++(int) {
            auto t = *this;
            ++*this;
            return t;
        }
        bool operator==(const iterator& o) const { return cur_ == o.cur_; }

      private:
        void skip() {
            while (cur_ < u_ && next_ < taken_.size() && taken_[next_] <= cur_) {
                if (taken_[next_] == cur_) ++cur_;
                ++next_;
            }
        }
        std::span<const PointIndex> taken_;
        std::size_t u_ = 0;
        std::size_t cur_ = 0;
        std::size_t next_ = 0;
    };

    ComplementRange(std::span<const PointIndex> taken, std::size_t u) : taken_(taken), u_(u) {}
    iterator begin() const { return iterator(taken_, u_, 0); }
    iterator end() const { return iterator(taken_, u_, u_); }

  private:
    std::span<const PointIndex> taken_;
    std::size_t u_;
};

/// A multiset of m draws from the universe together with its sorted distinct set.
class SampleSet {
  public:
    SampleSet(std::size_t universe, std::vector<PointIndex> draws)
        : universe_(universe), draws_(std::move(draws)) {
        if (draws_.empty()) throw std::invalid_argument("a sample needs at least one draw");
        auto distinct = draws_;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.back() >= universe_)
            throw std::out_of_range("sample index outside the universe");
        distinct_ = std::make_shared<const std::vector<PointIndex>>(std::move(distinct));
    }

    std::size_t universe() const noexcept { return universe_; }
    std::size_t m() const noexcept { return draws_.size(); }
    std::span<const PointIndex> draws() const noexcept { return draws_; }
    std::span<const PointIndex> distinct() const noexcept { return *distinct_; }
    /// Shared handle to the distinct set; distributions over this sample alias it.
    const std::shared_ptr<const std::vector<PointIndex>>& distinct_handle() const noexcept {
        return distinct_;
    }

    bool contains(PointIndex i) const {
        return std::binary_search(distinct_->begin(), distinct_->end(), i);
    }

    ComplementRange complement() const { return {*distinct_, universe_}; }

  private:
    std::size_t universe_;
    std::vector<PointIndex> draws_;
    std::shared_ptr<const std::vector<PointIndex>> distinct_;
};

/// m i.i.d. uniform draws with replacement from the universe.
inline SampleSet draw_sample(Universe universe, std::size_t m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("draw_sample requires m >= 1");
    SplitMix64 eng(seed);
    std::vector<PointIndex> draws(m);
    for (auto& d : draws) d = static_cast<PointIndex>(uniform_below(eng, universe.size));
    return SampleSet(universe.size, std::move(draws));
}

}  // namespace boostlb
