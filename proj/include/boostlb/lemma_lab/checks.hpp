// checks.hpp
//
// Monte-Carlo checks of the probabilistic lemmas behind the lower bound:
// a biased-sign tail bound, a coupon-collector bound, a falsification search
// for the random sign matrix lemma, and an anticoncentration bound whose
// constants are calibrated from the data.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boostlb/adversary/params.hpp"
#include "boostlb/core/rng.hpp"
#include "boostlb/lemma_lab/report.hpp"

namespace boostlb {

// ---------------------------------------------------------------- bias lemma

struct BiasLemmaConfig {
    std::vector<double> w;
    double alpha_tilde = 1.0;
    double alpha_prime = 0.0;
    double beta = 0.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

/// min(1/4, 1/2 - 4 a~ a' / (2 a~ - a')^2).
inline double bias_lemma_bound(double alpha_tilde, double alpha_prime) {
    const double gap = 2.0 * alpha_tilde - alpha_prime;
    return std::min(0.25, 0.5 - 4.0 * alpha_tilde * alpha_prime / (gap * gap));
}

inline void validate(const BiasLemmaConfig& c) {
    if (c.w.empty()) throw std::invalid_argument("w must be nonempty");
    double l1 = 0.0;
    for (double x : c.w) {
        if (!std::isfinite(x)) throw std::invalid_argument("w must be finite");
        l1 += std::abs(x);
    }
    if (std::abs(l1 - 1.0) > 1e-9) throw std::invalid_argument("w must have l1 norm 1");
    if (!(c.alpha_tilde >= 1.0)) throw std::invalid_argument("alpha_tilde must be >= 1");
    if (!(c.alpha_prime < c.alpha_tilde)) throw std::invalid_argument("alpha_prime must be < alpha_tilde");
    if (!(c.beta >= 0.0 && c.beta < 1.0 / (2.0 * c.alpha_tilde)))
        throw std::invalid_argument("beta must satisfy 0 <= beta < 1/(2 alpha_tilde)");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
}

/// Estimates P[sum_i w_i h(i) <= -a' beta] for i.i.d. h(i) = -1 w.p. 1/2 + a~ beta.
inline MonteCarloReport check_bias_lemma(const BiasLemmaConfig& c) {
    validate(c);
    const double p_minus = 0.5 + c.alpha_tilde * c.beta;
    const double cut = -c.alpha_prime * c.beta;
    const std::size_t hits = count_hits(c.trials, c.seed, c.jobs, [&](SplitMix64& eng, std::size_t n) {
        std::size_t h = 0;
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (double x : c.w) s += uniform01(eng) < p_minus ? -x : x;
            h += s <= cut;
        }
        return h;
    });
    return make_report(hits, c.trials, bias_lemma_bound(c.alpha_tilde, c.alpha_prime), BoundDirection::lower);
}

// ----------------------------------------------------------- coupon collector

struct CouponConfig {
    std::size_t m = 0;
    std::size_t r = 1;
    double zeta = 8.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

/// ceil(zeta m / ln(m / r)) coupons.
inline std::size_t coupon_count(std::size_t m, std::size_t r, double zeta) {
    return detail::ceil_count(zeta * static_cast<double>(m) / std::log(static_cast<double>(m) / static_cast<double>(r)));
}

inline void validate(const CouponConfig& c) {
    if (c.r < 1) throw std::invalid_argument("r must be >= 1");
    if (c.m < 4 * c.r) throw std::invalid_argument("m must satisfy m >= 4 r");
    if (!(c.zeta >= 8.0)) throw std::invalid_argument("zeta must be >= 8");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
}

/// Estimates P[X <= m], X the number of draws with replacement needed to see
/// coupons - 2r distinct coupons.
inline MonteCarloReport check_coupon_collector(const CouponConfig& c) {
    validate(c);
    const std::size_t coupons = coupon_count(c.m, c.r, c.zeta);
    const std::size_t target = coupons > 2 * c.r ? coupons - 2 * c.r : 0;
    const std::size_t hits = count_hits(c.trials, c.seed, c.jobs, [&](SplitMix64& eng, std::size_t n) {
        std::vector<std::uint64_t> seen((coupons + 63) / 64);
        std::size_t h = 0;
        for (std::size_t t = 0; t < n; ++t) {
            std::fill(seen.begin(), seen.end(), 0);
            std::size_t distinct = 0;
            // X > m is settled once m draws are spent
            for (std::size_t draw = 0; draw < c.m && distinct < target; ++draw) {
                const std::uint64_t x = uniform_below(eng, coupons);
                const std::uint64_t bit = 1ull << (x % 64);
                distinct += (seen[x / 64] & bit) == 0;
                seen[x / 64] |= bit;
            }
            h += distinct >= target;
        }
        return h;
    });
    return make_report(hits, c.trials, 0.5, BoundDirection::upper);
}

// --------------------------------------------------------- sign matrix lemma

/// r x n matrix of uniform signs, row major.
struct SignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int8_t> a;

    int at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

template <class Engine>
SignMatrix draw_sign_matrix(std::size_t rows, std::size_t cols, Engine& eng) {
    SignMatrix m{rows, cols, std::vector<std::int8_t>(rows * cols)};
    for (std::size_t q = 0; q < m.a.size(); q += 64) {
        const std::uint64_t bits = eng();
        for (std::size_t b = 0; b < 64 && q + b < m.a.size(); ++b) m.a[q + b] = ((bits >> b) & 1u) ? 1 : -1;
    }
    return m;
}

/// 14 sqrt(lg n / r).
inline double small_entry_threshold(std::size_t r, std::size_t n) {
    return 14.0 * std::sqrt(std::log2(static_cast<double>(n)) / static_cast<double>(r));
}

/// Number of rows i with (A w)_i < threshold.
inline std::size_t small_entry_count(const SignMatrix& A, std::span<const double> w, double threshold) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += A.at(i, j) * w[j];
        count += s < threshold;
    }
    return count;
}

/// The lemma fails for (A, w) when fewer than r/10 entries are small.
inline bool violates_linear_comb(std::size_t small_entries, std::size_t r) {
    return static_cast<double>(small_entries) < static_cast<double>(r) / 10.0;
}

struct LinearCombConfig {
    std::size_t r = 400;
    std::size_t n = 8;
    std::size_t trials = 200;
    /// Candidate vectors evaluated per matrix, split over the three strategies.
    std::size_t search_budget = 3000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct LinearCombReport {
    MonteCarloReport report;
    std::size_t violations = 0;
    /// Fewest small entries seen over all matrices and candidates.
    std::size_t fewest_small_entries = 0;
    std::string verdict;
};

inline void validate(const LinearCombConfig& c) {
    if (c.n < 1 || c.r < 1) throw std::invalid_argument("r and n must be positive");
    if (static_cast<double>(c.r) < 40.0 * std::log2(static_cast<double>(c.n)))
        throw std::invalid_argument("r must satisfy r >= 40 lg n");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
    if (c.search_budget < 3) throw std::invalid_argument("search_budget must be >= 3");
}

namespace detail {

/// Budgeted search over unit l1 vectors for the fewest small entries of A w.
class LinearCombSearch {
  public:
    LinearCombSearch(const SignMatrix& A, double threshold, std::size_t budget)
        : A_(A), threshold_(threshold), budget_(budget) {}

    std::size_t fewest() const noexcept { return fewest_; }
    bool exhausted() const noexcept { return spent_ >= budget_; }

    /// Returns false once the budget is spent.
    bool evaluate(std::span<const double> w) {
        if (exhausted()) return false;
        ++spent_;
        fewest_ = std::min(fewest_, small_entry_count(A_, w, threshold_));
        return true;
    }

    template <class Engine>
    void random_vectors(std::size_t count, Engine& eng) {
        std::vector<double> w(A_.cols);
        for (std::size_t t = 0; t < count && !exhausted(); ++t) {
            double total = 0.0;
            for (auto& x : w) {
                x = -std::log1p(-uniform01(eng));
                total += x;
            }
            for (auto& x : w) x = (eng() & 1u ? x : -x) / total;
            evaluate(w);
        }
    }

    /// Signed grid vectors with `units` steps of equal size, normalized to l1 norm 1.
    void net(std::size_t units, std::size_t count) {
        std::vector<long> j(A_.cols, 0);
        std::size_t left = count;
        enumerate_net(j, 0, static_cast<long>(units), left);
    }

    /// Hill climbing on the number of large entries, moving mass between the
    /// signed coordinates; the step halves when no move improves.
    template <class Engine>
    void greedy(std::size_t count, double step, Engine& eng) {
        const std::size_t n = A_.cols;
        std::vector<double> part(2 * n, 0.0);  // part[2j] positive, part[2j+1] negative mass
        part[2 * uniform_below(eng, n) + (eng() & 1u)] = 1.0;
        std::vector<double> w(n);
        // opposite parts on one coordinate cancel, so rescale back to l1 norm 1
        auto to_w = [&](const std::vector<double>& pm) {
            double norm = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                w[c] = pm[2 * c] - pm[2 * c + 1];
                norm += std::abs(w[c]);
            }
            if (norm == 0.0) return false;
            for (auto& x : w) x /= norm;
            return true;
        };
        auto score = [&](const std::vector<double>& pm) {
            if (!to_w(pm)) return std::pair{A_.rows, std::numeric_limits<double>::infinity()};
            double surrogate = 0.0;
            std::size_t small = 0;
            for (std::size_t i = 0; i < A_.rows; ++i) {
                double s = 0.0;
                for (std::size_t c = 0; c < n; ++c) s += A_.at(i, c) * w[c];
                small += s < threshold_;
                surrogate += std::min(s, threshold_);
            }
            return std::pair{small, -surrogate};
        };
        if (!take(count)) return;
        auto best = score(part);
        fewest_ = std::min(fewest_, best.first);
        while (count > 0 && step > 1e-6) {
            std::vector<double> best_part;
            for (std::size_t a = 0; a < 2 * n && count > 0; ++a) {
                if (part[a] <= 0.0) continue;
                for (std::size_t b = 0; b < 2 * n && count > 0; ++b) {
                    if (a == b) continue;
                    auto cand = part;
                    const double moved = std::min(step, cand[a]);
                    cand[a] -= moved;
                    cand[b] += moved;
                    if (!take(count)) break;
                    const auto s = score(cand);
                    fewest_ = std::min(fewest_, s.first);
                    if (s < best) {
                        best = s;
                        best_part = std::move(cand);
                    }
                }
            }
            if (best_part.empty())
                step /= 2.0;
            else
                part = std::move(best_part);
        }
    }

  private:
    bool take(std::size_t& count) {
        if (exhausted() || count == 0) return false;
        ++spent_;
        --count;
        return true;
    }

    void enumerate_net(std::vector<long>& j, std::size_t col, long units, std::size_t& left) {
        if (left == 0 || exhausted()) return;
        if (col + 1 == j.size()) {
            j[col] = units;
            emit_signed(j, 0, left);
            return;
        }
        for (long x = 0; x <= units && left > 0; ++x) {
            j[col] = x;
            enumerate_net(j, col + 1, units - x, left);
        }
    }

    void emit_signed(std::vector<long>& j, std::size_t col, std::size_t& left) {
        if (left == 0 || exhausted()) return;
        if (col == j.size()) {
            double total = 0.0;
            for (long x : j) total += static_cast<double>(std::abs(x));
            if (total == 0.0) return;
            std::vector<double> w(j.size());
            for (std::size_t c = 0; c < j.size(); ++c) w[c] = static_cast<double>(j[c]) / total;
            evaluate(w);
            --left;
            return;
        }
        emit_signed(j, col + 1, left);
        if (j[col] != 0) {
            j[col] = -j[col];
            emit_signed(j, col + 1, left);
            j[col] = -j[col];
        }
    }

    const SignMatrix& A_;
    double threshold_;
    std::size_t budget_;
    std::size_t spent_ = 0;
    std::size_t fewest_ = std::numeric_limits<std::size_t>::max();
};

}  // namespace detail

/// Heuristic falsification: reports the fraction of matrices for which some
/// searched w leaves fewer than r/10 small entries.  Finding none is not a proof.
inline LinearCombReport check_linear_comb(const LinearCombConfig& c) {
    validate(c);
    const double threshold = small_entry_threshold(c.r, c.n);
    const double lg = std::log2(static_cast<double>(c.n));
    // grid of the discretized net: mass in units of 40 lg(n) / r
    const std::size_t units =
        c.n == 1 ? 1 : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(c.r) / (40.0 * lg))));
    const double step = c.n == 1 ? 0.5 : 40.0 * lg / static_cast<double>(c.r);
    const std::size_t third = c.search_budget / 3;

    // matrix t owns the engine derive_seed(seed, {t})
    std::vector<std::size_t> fewest(c.trials);
    parallel_for(c.trials, c.jobs, [&](std::size_t t) {
        SplitMix64 eng(derive_seed(c.seed, {t}));
        const SignMatrix A = draw_sign_matrix(c.r, c.n, eng);
        detail::LinearCombSearch search(A, threshold, c.search_budget);
        search.random_vectors(third, eng);
        search.net(units, third);
        search.greedy(c.search_budget, step, eng);
        fewest[t] = search.fewest();
    });
    const auto violations = static_cast<std::size_t>(
        std::count_if(fewest.begin(), fewest.end(), [&](std::size_t f) { return violates_linear_comb(f, c.r); }));
    const std::size_t overall = *std::min_element(fewest.begin(), fewest.end());
    LinearCombReport out;
    out.report = make_report(violations, c.trials, std::exp2(-0.01 * static_cast<double>(c.r)), BoundDirection::upper);
    out.violations = violations;
    out.fewest_small_entries = overall;
    out.verdict = violations == 0 ? "no counterexample found" : "counterexample found";
    return out;
}

// --------------------------------------------------------- anticoncentration

struct AnticoncentrationConfig {
    std::vector<double> x;
    double beta = 0.0;
    std::size_t trials = 10000;
    CalibrationConstants constants{};
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct AnticoncentrationReport {
    MonteCarloReport report;
    /// Largest multiplier the estimate supports at the configured exponent constant (capped at 1).
    double max_c2 = 0.0;
    /// Smallest exponent constant the estimate supports at the configured multiplier (at least 1).
    double min_c3 = 1.0;
    std::uint64_t seed = 0;
};

/// mc2 exp(-mc3 16 beta^2 n / mc1^2).
inline double anticoncentration_bound(double beta, std::size_t n, const CalibrationConstants& k) {
    return k.mc2 * std::exp(-k.mc3 * 16.0 * beta * beta * static_cast<double>(n) / (k.mc1 * k.mc1));
}

// sums of +-x_i that tie with beta in exact arithmetic must count as hits
inline constexpr double kTieTolerance = 1e-12;

inline void validate(const AnticoncentrationConfig& c) {
    c.constants.validate();
    if (c.x.empty()) throw std::invalid_argument("x must be nonempty");
    double total = 0.0;
    for (double v : c.x) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("x must be nonnegative and finite");
        total += v;
    }
    if (!(c.beta >= 0.0 && c.beta <= c.constants.mc1 / 6.0))
        throw std::invalid_argument("beta must satisfy 0 <= beta <= mc1/6");
    if (total < (1.0 - c.beta) / 2.0 - kTieTolerance) throw std::invalid_argument("x must sum to at least (1 - beta)/2");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
}

/// Estimates P[sum_i h(i) x_i >= beta] for uniform signs h.
inline AnticoncentrationReport check_anticoncentration(const AnticoncentrationConfig& c) {
    validate(c);
    const std::size_t n = c.x.size();
    const std::size_t hits = count_hits(c.trials, c.seed, c.jobs, [&](SplitMix64& eng, std::size_t count) {
        std::size_t h = 0;
        for (std::size_t t = 0; t < count; ++t) {
            double s = 0.0;
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i % 64 == 0) bits = eng();
                s += ((bits >> (i % 64)) & 1u) ? c.x[i] : -c.x[i];
            }
            h += s >= c.beta - kTieTolerance;
        }
        return h;
    });
    AnticoncentrationReport out;
    out.report = make_report(hits, c.trials, anticoncentration_bound(c.beta, n, c.constants), BoundDirection::lower);
    out.seed = c.seed;
    const auto& k = c.constants;
    const double p = out.report.empirical_probability;
    const double exponent = 16.0 * c.beta * c.beta * static_cast<double>(n) / (k.mc1 * k.mc1);
    out.max_c2 = std::min(1.0, p * std::exp(k.mc3 * exponent));
    if (p <= 0.0)
        out.min_c3 = std::numeric_limits<double>::infinity();
    else if (exponent > 0.0 && p < k.mc2)
        out.min_c3 = std::max(1.0, std::log(k.mc2 / p) / exponent);
    else
        out.min_c3 = 1.0;
    return out;
}

}  // namespace boostlb
