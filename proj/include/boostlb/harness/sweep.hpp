// sweep.hpp
//
// Parameter sweeps: a JSON sweep description, concurrent trial execution with
// sorted output, and a JSON summary holding per-group means and model fits.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "boostlb/adversary/params.hpp"
#include "boostlb/harness/csv.hpp"
#include "boostlb/harness/fit.hpp"
#include "boostlb/harness/trial.hpp"
#include "json.hpp"

namespace boostlb {

struct AlgorithmRun {
    Algorithm algo = Algorithm::adaboost;
    bool adversary_on = true;

    auto operator<=>(const AlgorithmRun&) const = default;
};

inline std::string to_string(const AlgorithmRun& a) {
    return to_string(a.algo) + (a.adversary_on ? "/on" : "/off");
}

struct SweepSpec {
    double gamma = 0.1;
    double d = 8;
    double alpha = 2;
    std::vector<std::size_t> m_grid;
    std::size_t trials = 1;
    std::vector<AlgorithmRun> algorithms;
    std::uint64_t seed = 0;
    std::size_t per_block_budget = 4096;
    QuotaRule quota_rule = QuotaRule::calibrated;
    std::optional<std::size_t> minus_quota;
    std::optional<std::size_t> rounds;
    double nu = 0.1;
    unsigned jobs = 1;
    double max_fail_rate = 0.05;

    AdversaryConfig adversary_config() const {
        AdversaryConfig c;
        c.alpha = alpha;
        c.per_block_budget = per_block_budget;
        c.quota_rule = quota_rule;
        c.minus_quota = minus_quota;
        return c;
    }

    /// Throws std::invalid_argument describing the first problem.
    void validate() const {
        if (m_grid.empty()) throw std::invalid_argument("m_grid must be nonempty");
        for (std::size_t i = 1; i < m_grid.size(); ++i)
            if (m_grid[i] <= m_grid[i - 1]) throw std::invalid_argument("m_grid must be strictly ascending");
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");
        if (std::set<AlgorithmRun>(algorithms.begin(), algorithms.end()).size() != algorithms.size())
            throw std::invalid_argument("algorithms contains duplicates");
        if (!(max_fail_rate >= 0.0 && max_fail_rate <= 1.0))
            throw std::invalid_argument("max_fail_rate must lie in [0, 1]");
        if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
        for (std::size_t m : m_grid) {
            try {
                derive_params(gamma, d, m, adversary_config());
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument("m = " + std::to_string(m) + ": " + e.what());
            }
        }
    }
};

/// Trial seed of trial t at grid point m; shared by all algorithms so that
/// they see the same sample and hypothesis sets.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t m, std::size_t t) {
    return derive_seed(master, {m, t});
}

inline AlgorithmRun parse_algorithm_run(const nlohmann::json& j) {
    AlgorithmRun a;
    if (j.is_string()) {
        a.algo = parse_algorithm(j.get<std::string>());
        return a;
    }
    if (!j.is_object()) throw std::invalid_argument("algorithms entries must be strings or objects");
    for (const auto& [key, value] : j.items())
        if (key != "algo" && key != "adversary") throw std::invalid_argument("unknown algorithms key '" + key + "'");
    a.algo = parse_algorithm(j.at("algo").get<std::string>());
    if (j.contains("adversary")) {
        const auto s = j.at("adversary").get<std::string>();
        if (s != "on" && s != "off") throw std::invalid_argument("adversary must be on or off");
        a.adversary_on = s == "on";
    }
    return a;
}

/// Parses and validates a sweep description.  Unknown keys are errors.
inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
    static const std::set<std::string> known{"gamma",      "d",      "alpha",       "m_grid", "trials",
                                             "algorithms", "seed",   "per_block_budget", "quota_rule",
                                             "minus_quota", "rounds", "nu",          "jobs",   "max_fail_rate"};
    if (!j.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::invalid_argument("unknown sweep config key '" + key + "'");
    SweepSpec s;
    try {
        j.at("gamma").get_to(s.gamma);
        j.at("d").get_to(s.d);
        j.at("alpha").get_to(s.alpha);
        j.at("m_grid").get_to(s.m_grid);
        j.at("trials").get_to(s.trials);
        j.at("seed").get_to(s.seed);
        for (const auto& a : j.at("algorithms")) s.algorithms.push_back(parse_algorithm_run(a));
        if (j.contains("per_block_budget")) j.at("per_block_budget").get_to(s.per_block_budget);
        if (j.contains("quota_rule")) {
            const auto q = j.at("quota_rule").get<std::string>();
            if (q == "calibrated")
                s.quota_rule = QuotaRule::calibrated;
            else if (q == "faithful")
                s.quota_rule = QuotaRule::faithful;
            else
                throw std::invalid_argument("quota_rule must be calibrated or faithful");
        }
        if (j.contains("minus_quota") && !j.at("minus_quota").is_null()) s.minus_quota = j.at("minus_quota").get<std::size_t>();
        if (j.contains("rounds") && !j.at("rounds").is_null()) s.rounds = j.at("rounds").get<std::size_t>();
        if (j.contains("nu")) j.at("nu").get_to(s.nu);
        if (j.contains("jobs")) j.at("jobs").get_to(s.jobs);
        if (j.contains("max_fail_rate")) j.at("max_fail_rate").get_to(s.max_fail_rate);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }
    s.validate();
    return s;
}

inline nlohmann::json to_json(const SweepSpec& s) {
    nlohmann::json algos = nlohmann::json::array();
    for (const auto& a : s.algorithms)
        algos.push_back({{"algo", to_string(a.algo)}, {"adversary", a.adversary_on ? "on" : "off"}});
    nlohmann::json j{{"gamma", s.gamma},
                     {"d", s.d},
                     {"alpha", s.alpha},
                     {"m_grid", s.m_grid},
                     {"trials", s.trials},
                     {"algorithms", algos},
                     {"seed", s.seed},
                     {"per_block_budget", s.per_block_budget},
                     {"quota_rule", s.quota_rule == QuotaRule::calibrated ? "calibrated" : "faithful"},
                     {"minus_quota", nullptr},
                     {"rounds", nullptr},
                     {"nu", s.nu},
                     {"jobs", s.jobs},
                     {"max_fail_rate", s.max_fail_rate}};
    if (s.minus_quota) j["minus_quota"] = *s.minus_quota;
    if (s.rounds) j["rounds"] = *s.rounds;
    return j;
}

inline TrialSpec trial_spec(const SweepSpec& s, std::size_t m, const AlgorithmRun& a, std::size_t t) {
    TrialSpec ts;
    ts.gamma = s.gamma;
    ts.d = s.d;
    ts.m = m;
    ts.adversary = s.adversary_config();
    ts.algo = a.algo;
    ts.adversary_on = a.adversary_on;
    ts.seed = trial_seed(s.seed, m, t);
    ts.rounds = s.rounds;
    ts.nu = s.nu;
    return ts;
}

struct SweepOutcome {
    std::vector<TrialResult> trials;  // sorted by (m, algorithm, adversary, seed)
    std::vector<TrialDiagnostics> diagnostics;  // parallel to trials
    bool interrupted = false;
};

/// Runs every (m, algorithm, trial) on `jobs` threads, largest m first.
/// Setting *stop ends the sweep after the trials in flight; the outcome then
/// holds what finished.  `on_trial` is called under a lock after each trial.
inline SweepOutcome run_sweep(const SweepSpec& spec, const std::atomic<bool>* stop = nullptr,
                              const std::function<void(const TrialResult&, std::size_t, std::size_t)>& on_trial = {}) {
    spec.validate();
    std::vector<std::tuple<std::size_t, AlgorithmRun, std::size_t>> work;
    for (auto it = spec.m_grid.rbegin(); it != spec.m_grid.rend(); ++it)
        for (const auto& a : spec.algorithms)
            for (std::size_t t = 0; t < spec.trials; ++t) work.emplace_back(*it, a, t);

    SweepOutcome out;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
            if (stop && stop->load()) return;
            const auto& [m, a, t] = work[i];
            try {
                TrialDiagnostics diag;
                TrialResult r = run_trial(trial_spec(spec, m, a, t), nullptr, &diag);
                std::lock_guard lock(mu);
                out.trials.push_back(std::move(r));
                out.diagnostics.push_back(diag);
                if (on_trial) on_trial(out.trials.back(), out.trials.size(), work.size());
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                next = work.size();
            }
        }
    };
    const unsigned jobs = static_cast<unsigned>(std::min<std::size_t>(spec.jobs, work.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    out.interrupted = out.trials.size() < work.size();
    std::vector<std::size_t> order(out.trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = out.trials[a];
        const auto& y = out.trials[b];
        return std::tuple(group_key(x), x.seed) < std::tuple(group_key(y), y.seed);
    });
    SweepOutcome sorted;
    sorted.interrupted = out.interrupted;
    for (std::size_t i : order) {
        sorted.trials.push_back(std::move(out.trials[i]));
        sorted.diagnostics.push_back(out.diagnostics[i]);
    }
    return sorted;
}

struct GroupPoint {
    std::size_t m = 0;
    double mean_error = 0;
    double median_error = 0;
    double mean_h0_weight = 0;
    double in_spart1 = 0;
    std::size_t trials = 0;
    std::size_t failures = 0;
};

struct GroupSummary {
    AlgorithmRun run;
    std::vector<GroupPoint> points;  // ascending m
    std::optional<FitReport> fit;
    std::string fit_error;
};

struct GapSummary {
    std::size_t m = 0;
    double adaboost_mean = 0;
    double bagged_mean = 0;
    double ratio = 0;
};

struct SweepSummary {
    std::vector<GroupSummary> groups;
    std::optional<GapSummary> gap;  // adversary-on adaboost over adversary-on bagged at the largest m
    std::size_t trials = 0;
    std::size_t failures = 0;

    double fail_rate() const { return trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0; }

    const GroupSummary* find(Algorithm algo, bool adversary_on) const {
        for (const auto& g : groups)
            if (g.run.algo == algo && g.run.adversary_on == adversary_on) return &g;
        return nullptr;
    }
};

inline SweepSummary summarize(const std::vector<TrialResult>& trials, double gamma, double d) {
    SweepSummary s;
    std::map<AlgorithmRun, std::map<std::size_t, std::vector<TrialResult>>> by;
    for (const auto& t : trials) by[{t.algo, t.adversary_on}][t.m].push_back(t);
    for (const auto& [run, per_m] : by) {
        GroupSummary g;
        g.run = run;
        std::vector<ErrorPoint> pts;
        for (const auto& [m, group] : per_m) {
            const auto rows = aggregate_group(group);
            GroupPoint p{m, rows.front().exact_error, rows.back().exact_error, rows.front().h0_weight,
                         rows.front().in_spart1, rows.front().trials, rows.front().failures};
            g.points.push_back(p);
            pts.push_back({m, p.mean_error});
            s.trials += p.trials;
            s.failures += p.failures;
        }
        try {
            g.fit = fit_error_models(pts, gamma, d);
        } catch (const std::exception& e) {
            g.fit_error = e.what();
        }
        s.groups.push_back(std::move(g));
    }
    const auto* ada = s.find(Algorithm::adaboost, true);
    const auto* bag = s.find(Algorithm::bagged, true);
    if (ada && bag && ada->points.back().m == bag->points.back().m) {
        const auto& a = ada->points.back();
        const auto& b = bag->points.back();
        s.gap = GapSummary{a.m, a.mean_error, b.mean_error, a.mean_error / b.mean_error};
    }
    return s;
}

inline nlohmann::json to_json(const SweepSummary& s) {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : s.groups) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : g.points)
            pts.push_back({{"m", p.m},
                           {"mean_error", num(p.mean_error)},
                           {"median_error", num(p.median_error)},
                           {"mean_h0_weight", num(p.mean_h0_weight)},
                           {"in_spart1", p.in_spart1},
                           {"trials", p.trials},
                           {"failures", p.failures}});
        nlohmann::json gj{{"algo", to_string(g.run.algo)},
                          {"adversary", g.run.adversary_on ? "on" : "off"},
                          {"points", pts},
                          {"fit", nullptr}};
        if (g.fit)
            gj["fit"] = *g.fit;
        else
            gj["fit_error"] = g.fit_error;
        groups.push_back(std::move(gj));
    }
    nlohmann::json j{{"groups", groups},
                     {"trials", s.trials},
                     {"failures", s.failures},
                     {"fail_rate", s.fail_rate()},
                     {"gap", nullptr}};
    if (s.gap)
        j["gap"] = {{"m", s.gap->m},
                    {"adaboost_mean_error", num(s.gap->adaboost_mean)},
                    {"bagged_mean_error", num(s.gap->bagged_mean)},
                    {"ratio", num(s.gap->ratio)}};
    return j;
}

}  // namespace boostlb
