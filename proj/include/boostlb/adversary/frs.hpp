// frs.hpp
//
// F_{r,S}: the first r unsampled indices of the first part [0, u - r1).
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "boostlb/adversary/params.hpp"
#include "boostlb/core/hypothesis.hpp"
#include "boostlb/core/sample.hpp"

namespace boostlb {

struct FrS {
    std::vector<PointIndex> indices;
};

/// nullopt when fewer than r first-part indices are unsampled (S is not in S_part1).
inline std::optional<FrS> compute_frs(std::span<const PointIndex> sorted_support,
                                      std::size_t first_part_end, std::size_t r) {
    FrS f;
    f.indices.reserve(r);
    for (PointIndex i : ComplementRange(sorted_support, first_part_end)) {
        if (f.indices.size() == r) break;
        f.indices.push_back(i);
    }
    if (f.indices.size() < r) return std::nullopt;
    return f;
}

inline std::optional<FrS> compute_frs(const SampleSet& sample, const AdversaryParams& p) {
    return compute_frs(sample.distinct(), p.first_part_end(), p.r);
}

/// Number of -1 entries of h on the given sorted indices.
inline std::size_t minus_count(const Hypothesis& h, std::span<const PointIndex> indices) {
    std::size_t n = 0, cached = static_cast<std::size_t>(-1);
    std::uint64_t bits = 0;
    for (PointIndex i : indices) {
        const std::size_t w = i / kWordBits;
        if (w != cached) {
            bits = h.word(w);
            cached = w;
        }
        n += ((bits >> (i % kWordBits)) & 1u) == 0;
    }
    return n;
}

}  // namespace boostlb
