// voting.hpp
//
// Convex combinations of hypotheses and their exact error under the uniform
// distribution on the universe.  A zero vote total predicts +1.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boostlb/core/distribution.hpp"
#include "boostlb/core/hypothesis.hpp"

namespace boostlb {

struct VotingTerm {
    double weight;
    Hypothesis hypothesis;
};

class VotingClassifier {
  public:
    explicit VotingClassifier(std::vector<VotingTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw std::invalid_argument("voting classifier without terms");
        const std::size_t u = terms_.front().hypothesis.size();
        std::vector<double> w;
        w.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
                throw std::domain_error("voting weights must be finite and nonnegative");
            if (t.hypothesis.size() != u) throw std::invalid_argument("mixed universe sizes");
            w.push_back(t.weight);
        }
        const double total = compensated_sum(w);
        if (std::abs(total - 1.0) > kMassTolerance)
            throw std::domain_error("voting weights sum to " + std::to_string(total));
    }

    /// Scales nonnegative weights to sum to one.  All-zero weights become uniform.
    static VotingClassifier normalized(std::vector<VotingTerm> terms) {
        std::vector<double> w;
        for (const auto& t : terms) w.push_back(t.weight);
        const double total = compensated_sum(w);
        for (auto& t : terms)
            t.weight = total > 0.0 ? t.weight / total : 1.0 / static_cast<double>(terms.size());
        return VotingClassifier(std::move(terms));
    }

    /// Same classifier with repeated hypotheses folded into one term, in order of
    /// first appearance.
    VotingClassifier merged() const {
        std::vector<VotingTerm> out;
        for (const auto& t : terms_) {
            auto it = std::find_if(out.begin(), out.end(), [&](const VotingTerm& o) {
                return o.hypothesis.same_function(t.hypothesis);
            });
            if (it == out.end())
                out.push_back(t);
            else
                it->weight += t.weight;
        }
        return normalized(std::move(out));
    }

    std::span<const VotingTerm> terms() const noexcept { return terms_; }
    std::size_t universe() const noexcept { return terms_.front().hypothesis.size(); }

    double h0_weight() const noexcept {
        double w = 0.0;
        for (const auto& t : terms_)
            if (t.hypothesis.is_h0()) w += t.weight;
        return std::min(w, 1.0);
    }

    /// sum_t w_t h_t(i), accumulated in term order.
    double margin(std::size_t i) const {
        if (i >= universe()) throw std::out_of_range("margin index out of range");
        double s = 0.0;
        for (const auto& t : terms_) s += t.hypothesis.sign(i) > 0 ? t.weight : -t.weight;
        return s;
    }

    /// Visits the vote totals of the whole universe in blocks of consecutive
    /// indices: fn(first_index, span_of_totals).  Totals are accumulated per
    /// point in term order, so each equals margin(i) exactly.
    template <class Fn>
    void for_each_score_block(Fn&& fn) const {
        constexpr std::size_t kBlockWords = 64;
        const std::size_t u = universe();
        const std::size_t nwords = words_for(u);
        std::vector<double> acc(kBlockWords * kWordBits);
        for (std::size_t w0 = 0; w0 < nwords; w0 += kBlockWords) {
            const std::size_t wend = std::min(nwords, w0 + kBlockWords);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (const auto& t : terms_) {
                const std::array<double, 2> tbl{-t.weight, t.weight};
                for (std::size_t w = w0; w < wend; ++w) {
                    const std::uint64_t bits = t.hypothesis.word(w);
                    double* a = acc.data() + (w - w0) * kWordBits;
                    for (std::size_t b = 0; b < kWordBits; ++b) a[b] += tbl[(bits >> b) & 1u];
                }
            }
            const std::size_t first = w0 * kWordBits;
            const std::size_t count = std::min(u, wend * kWordBits) - first;
            fn(first, std::span<const double>(acc.data(), count));
        }
    }

    /// Signs of the vote (+1 when the total is >= 0).
    SignVector predictions() const {
        SignVector out(universe(), 1);
        for_each_score_block([&](std::size_t first, std::span<const double> s) {
            for (std::size_t j = 0; j < s.size(); ++j)
                if (s[j] < 0.0) out.set(first + j, -1);
        });
        return out;
    }

  private:
    std::vector<VotingTerm> terms_;
};

/// Fraction of the universe where the vote total is strictly negative.
inline double exact_error(const VotingClassifier& f, Universe universe) {
    if (f.universe() != universe.size) throw std::invalid_argument("exact_error: universe mismatch");
    std::size_t wrong = 0;
    f.for_each_score_block([&](std::size_t, std::span<const double> s) {
        for (double x : s) wrong += x < 0.0;
    });
    return static_cast<double>(wrong) / static_cast<double>(universe.size);
}

inline double margin(const VotingClassifier& f, std::size_t i) { return f.margin(i); }

/// Unweighted majority over the signs of several voting classifiers
/// (a majority of majorities).  Ties predict +1.
class MajorityVote {
  public:
    explicit MajorityVote(std::vector<VotingClassifier> members) : members_(std::move(members)) {
        if (members_.empty()) throw std::invalid_argument("majority vote without members");
        for (const auto& f : members_)
            if (f.universe() != members_.front().universe())
                throw std::invalid_argument("mixed universe sizes");
    }

    std::span<const VotingClassifier> members() const noexcept { return members_; }
    std::size_t universe() const noexcept { return members_.front().universe(); }

    double h0_weight() const noexcept {
        double w = 0.0;
        for (const auto& f : members_) w += f.h0_weight();
        return w / static_cast<double>(members_.size());
    }

    SignVector predictions() const {
        const std::size_t u = universe();
        std::vector<int> neg(u, 0);
        for (const auto& f : members_)
            f.for_each_score_block([&](std::size_t first, std::span<const double> s) {
                for (std::size_t j = 0; j < s.size(); ++j) neg[first + j] += s[j] < 0.0;
            });
        SignVector out(u, 1);
        const int half = static_cast<int>(members_.size());
        for (std::size_t i = 0; i < u; ++i)
            if (2 * neg[i] > half) out.set(i, -1);
        return out;
    }

  private:
    std::vector<VotingClassifier> members_;
};

inline double exact_error(const MajorityVote& f, Universe universe) {
    if (f.universe() != universe.size) throw std::invalid_argument("exact_error: universe mismatch");
    return static_cast<double>(f.predictions().count_minus()) / static_cast<double>(universe.size);
}

}  // namespace boostlb
