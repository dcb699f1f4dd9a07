// report.hpp
//
// Monte-Carlo report record and a chunked, thread-parallel hit counter whose
// result does not depend on the number of threads.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "boostlb/core/rng.hpp"
#include "json.hpp"

namespace boostlb {

enum class BoundDirection { lower, upper };

inline std::string to_string(BoundDirection d) { return d == BoundDirection::lower ? "lower" : "upper"; }

inline BoundDirection parse_direction(const std::string& s) {
    if (s == "lower") return BoundDirection::lower;
    if (s == "upper") return BoundDirection::upper;
    throw std::invalid_argument("direction must be lower or upper, got " + s);
}

struct MonteCarloReport {
    std::size_t trials = 0;
    double empirical_probability = 0.0;
    double claimed_bound = 0.0;
    BoundDirection direction = BoundDirection::lower;
    bool pass = false;
    double std_error = 0.0;

    bool operator==(const MonteCarloReport&) const = default;
};

inline constexpr double kSigmaSlack = 3.0;

/// Report for `hits` successes in `trials`, judged with 3 standard errors of slack.
inline MonteCarloReport make_report(std::size_t hits, std::size_t trials, double bound, BoundDirection dir) {
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    if (hits > trials) throw std::invalid_argument("more hits than trials");
    MonteCarloReport r;
    r.trials = trials;
    r.empirical_probability = static_cast<double>(hits) / static_cast<double>(trials);
    r.claimed_bound = bound;
    r.direction = dir;
    const double p = r.empirical_probability;
    r.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    r.pass = dir == BoundDirection::lower ? p >= bound - kSigmaSlack * r.std_error
                                          : p <= bound + kSigmaSlack * r.std_error;
    return r;
}

inline void to_json(nlohmann::json& j, const MonteCarloReport& r) {
    j = nlohmann::json{{"trials", r.trials},
                       {"empirical_probability", r.empirical_probability},
                       {"claimed_bound", r.claimed_bound},
                       {"direction", to_string(r.direction)},
                       {"pass", r.pass},
                       {"std_error", r.std_error}};
}

inline void from_json(const nlohmann::json& j, MonteCarloReport& r) {
    j.at("trials").get_to(r.trials);
    j.at("empirical_probability").get_to(r.empirical_probability);
    j.at("claimed_bound").get_to(r.claimed_bound);
    r.direction = parse_direction(j.at("direction").get<std::string>());
    j.at("pass").get_to(r.pass);
    j.at("std_error").get_to(r.std_error);
}

/// Calls fn(i) for i in [0, count) on up to `jobs` threads; the first
/// exception stops the remaining work and is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                next = count;
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline constexpr std::size_t kTrialChunk = 1024;

/// Sum over chunks of `chunk_hits(engine, count)`.  Chunk c holds trials
/// [c * chunk, ...) and owns the engine derive_seed(seed, {c}), so the total
/// is the same for any `jobs`.
template <class ChunkFn>
std::size_t count_hits(std::size_t trials, std::uint64_t seed, unsigned jobs, ChunkFn&& chunk_hits,
                       std::size_t chunk = kTrialChunk) {
    if (chunk == 0) throw std::invalid_argument("chunk must be positive");
    const std::size_t chunks = (trials + chunk - 1) / chunk;
    std::vector<std::size_t> hits(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        SplitMix64 eng(derive_seed(seed, {c}));
        hits[c] = chunk_hits(eng, std::min(chunk, trials - c * chunk));
    });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    return total;
}

}  // namespace boostlb
