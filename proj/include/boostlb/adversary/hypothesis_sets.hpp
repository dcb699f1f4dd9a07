// hypothesis_sets.hpp
//
// The two hypothesis families H1 (adversarial) and H2 (fallback).  Each is a
// sequence of blocks; index 0 of every block is h0, the remaining entries are
// uniform random sign vectors regenerated on demand from the master seed.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "boostlb/adversary/params.hpp"
#include "boostlb/core/hypothesis.hpp"
#include "boostlb/core/rng.hpp"

namespace boostlb {

class HypothesisSets {
  public:
    /// Lazy families: params.k blocks of params.per_block_budget random vectors.
    HypothesisSets(const AdversaryParams& params, std::uint64_t master_seed)
        : u_(params.u), r1_(params.r1), blocks_(params.k), budget_(params.per_block_budget),
          master_seed_(master_seed) {
        family_key_[0] = derive_seed(master_seed, {1});
        family_key_[1] = derive_seed(master_seed, {2});
    }

    /// Explicit families, used by fixtures and exhaustive oracles.  Blocks are
    /// taken verbatim (no implicit h0).
    static HypothesisSets from_blocks(std::size_t u, std::vector<std::vector<Hypothesis>> h1,
                                      std::vector<std::vector<Hypothesis>> h2) {
        HypothesisSets s;
        s.u_ = u;
        s.fixed_[0] = std::move(h1);
        s.fixed_[1] = std::move(h2);
        s.explicit_ = true;
        for (std::uint32_t f = 0; f < 2; ++f)
            for (std::uint32_t b = 0; b < s.fixed_[f].size(); ++b) {
                auto& block = s.fixed_[f][b];
                for (std::uint32_t j = 0; j < block.size(); ++j) {
                    if (block[j].size() != u) throw std::invalid_argument("fixture universe mismatch");
                    block[j] = block[j].with_id({f + 1, b, j});
                }
            }
        return s;
    }

    std::size_t universe() const noexcept { return u_; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }

    std::size_t blocks(int family) const {
        check_family(family);
        return explicit_ ? fixed_[family - 1].size() : blocks_;
    }

    std::size_t block_size(int family, std::size_t block) const {
        check_family(family);
        if (explicit_) return fixed_[family - 1].at(block).size();
        if (block >= blocks_) throw std::out_of_range("block index out of range");
        return budget_ + 1;
    }

    Hypothesis at(int family, std::size_t block, std::size_t index) const {
        check_family(family);
        if (explicit_) return fixed_[family - 1].at(block).at(index);
        if (block >= blocks_ || index > budget_) throw std::out_of_range("hypothesis index out of range");
        const HypothesisId id{static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(block),
                              static_cast<std::uint32_t>(index)};
        if (index == 0) return Hypothesis::h0(u_, r1_).with_id(id);
        const std::uint64_t slot = block * budget_ + (index - 1);
        return Hypothesis::lazy(u_, counter_bits(family_key_[family - 1], slot), id);
    }

    /// Distinct functions across both families (h0 counted once).
    std::size_t total_count() const {
        if (!explicit_) return 2 * blocks_ * budget_ + 1;
        std::size_t n = 0;
        for (const auto& fam : fixed_)
            for (const auto& b : fam) n += b.size();
        return n;
    }

  private:
    HypothesisSets() = default;

    static void check_family(int family) {
        if (family != 1 && family != 2) throw std::invalid_argument("family must be 1 or 2");
    }

    std::size_t u_ = 0;
    std::size_t r1_ = 0;
    std::size_t blocks_ = 0;
    std::size_t budget_ = 0;
    std::uint64_t master_seed_ = 0;
    std::uint64_t family_key_[2] = {0, 0};
    bool explicit_ = false;
    std::vector<std::vector<Hypothesis>> fixed_[2];
};

}  // namespace boostlb
