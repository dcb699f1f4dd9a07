// boostlb: experiment driver.
//
//   boostlb run --gamma 0.1 --d 8 --m 4096 --trials 10 --algo adaboost --adversary on --out trials.csv
//   boostlb sweep --config sweep.json --out sweep.csv --summary summary.json
//   boostlb lemmas coupon --m 1024 --r 4 --zeta 8 --trials 100000
//   boostlb certify --gamma 0.1 --d 8 --m 4096 --runs 10
//
// Exit codes: 0 success, 2 configuration error, 3 failure rate above --max-fail-rate.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "boostlb/adversary/certifier.hpp"
#include "boostlb/harness/csv.hpp"
#include "boostlb/harness/sweep.hpp"
#include "boostlb/lemma_lab/checks.hpp"
#include "json.hpp"

namespace {

using namespace boostlb;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop = true; }

unsigned resolve_jobs(unsigned jobs) {
    return jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

int finish_sweep(const SweepSpec& spec, const std::string& out, const std::string& summary_path) {
    std::signal(SIGINT, on_sigint);
    const auto t0 = std::chrono::steady_clock::now();
    const SweepOutcome res = run_sweep(spec, &g_stop, [](const TrialResult& t, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\r[%zu/%zu] m=%zu %s/%s%s", done, total, t.m, to_string(t.algo).c_str(),
                     t.adversary_on ? "on" : "off", t.failure ? (" " + *t.failure).c_str() : "");
        std::fflush(stderr);
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "\n%zu trials in %.1f s%s\n", res.trials.size(), secs, res.interrupted ? " (interrupted)" : "");

    std::ostringstream csv;
    write_csv(csv, res.trials);
    write_text(out, csv.str());
    const SweepSummary summary = summarize(res.trials, spec.gamma, spec.d);
    json sj = to_json(summary);
    sj["spec"] = to_json(spec);
    sj["interrupted"] = res.interrupted;
    if (!summary_path.empty()) write_text(summary_path, sj.dump(2) + "\n");

    std::fprintf(stderr, "failure rate %.4f (limit %.4f)\n", summary.fail_rate(), spec.max_fail_rate);
    if (summary.fail_rate() > spec.max_fail_rate) return kExitFailures;
    return res.interrupted ? 130 : kExitOk;
}

void add_adversary_options(CLI::App* app, SweepSpec& s, std::string& quota_rule) {
    app->add_option("--gamma", s.gamma, "weak-learner advantage parameter (advantage 2*gamma)")->required();
    app->add_option("--d", s.d, "VC-dimension parameter")->required();
    app->add_option("--alpha", s.alpha, "universe scaling alpha >= 1")->capture_default_str();
    app->add_option("--budget", s.per_block_budget, "hypotheses per block")->capture_default_str();
    app->add_option("--quota-rule", quota_rule, "calibrated or faithful")
        ->check(CLI::IsMember({"calibrated", "faithful"}))
        ->capture_default_str();
    app->add_option("--minus-quota", s.minus_quota, "override the number of -1 entries demanded on F");
    app->add_option("--seed", s.seed, "master seed")->capture_default_str();
    app->add_option("--jobs", s.jobs, "worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boosting lower-bound experiment driver"};
    app.require_subcommand(1);

    // run
    SweepSpec run_spec;
    run_spec.seed = 42;
    std::size_t run_m = 0;
    std::string run_algo = "adaboost", run_adv = "on", run_quota = "calibrated", run_out = "-", run_summary;
    auto* run = app.add_subcommand("run", "run trials at one sample size");
    add_adversary_options(run, run_spec, run_quota);
    run->add_option("--m", run_m, "sample size")->required();
    run->add_option("--trials", run_spec.trials, "number of trials")->capture_default_str();
    run->add_option("--algo", run_algo, "adaboost, adastar or bagged")
        ->check(CLI::IsMember({"adaboost", "adastar", "bagged"}))
        ->capture_default_str();
    run->add_option("--adversary", run_adv, "on or off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    run->add_option("--rounds", run_spec.rounds, "boosting rounds (default ceil(ln m / (2 gamma^2)) + 1)");
    run->add_option("--nu", run_spec.nu, "margin slack of adastar")->capture_default_str();
    run->add_option("--out", run_out, "CSV output path, - for stdout")->capture_default_str();
    run->add_option("--summary", run_summary, "summary JSON output path");
    run->add_option("--max-fail-rate", run_spec.max_fail_rate, "exit 3 above this trial failure rate")
        ->capture_default_str();

    // sweep
    std::string sweep_config, sweep_out = "-", sweep_summary;
    std::optional<unsigned> sweep_jobs;
    std::optional<double> sweep_max_fail;
    auto* sweep = app.add_subcommand("sweep", "run a sweep described by a JSON config");
    sweep->add_option("--config", sweep_config, "sweep config (see docs/config.md)")->required();
    sweep->add_option("--out", sweep_out, "CSV output path, - for stdout")->capture_default_str();
    sweep->add_option("--summary", sweep_summary, "summary JSON output path");
    sweep->add_option("--jobs", sweep_jobs, "override jobs (0 = all cores)");
    sweep->add_option("--max-fail-rate", sweep_max_fail, "override max_fail_rate");

    // lemmas
    auto* lemmas = app.add_subcommand("lemmas", "Monte-Carlo checks of the supporting lemmas");
    lemmas->require_subcommand(1);
    std::uint64_t lemma_seed = 1;
    unsigned lemma_jobs = 1;
    std::size_t lemma_trials = 100000;
    auto common = [&](CLI::App* a) {
        a->add_option("--trials", lemma_trials, "Monte-Carlo trials")->capture_default_str();
        a->add_option("--seed", lemma_seed, "seed")->capture_default_str();
        a->add_option("--jobs", lemma_jobs, "worker threads (0 = all cores)")->capture_default_str();
    };
    BiasLemmaConfig bias;
    auto* l_bias = lemmas->add_subcommand("bias", "biased-sign tail bound");
    common(l_bias);
    l_bias->add_option("--w", bias.w, "weights with l1 norm 1")->delimiter(',')->required();
    l_bias->add_option("--alpha-tilde", bias.alpha_tilde)->required();
    l_bias->add_option("--alpha-prime", bias.alpha_prime)->required();
    l_bias->add_option("--beta", bias.beta)->required();

    CouponConfig coupon;
    auto* l_coupon = lemmas->add_subcommand("coupon", "coupon-collector bound");
    common(l_coupon);
    l_coupon->add_option("--m", coupon.m)->required();
    l_coupon->add_option("--r", coupon.r)->required();
    l_coupon->add_option("--zeta", coupon.zeta)->capture_default_str();

    LinearCombConfig lincomb;
    auto* l_lincomb = lemmas->add_subcommand("lincomb", "falsification search on random sign matrices");
    l_lincomb->add_option("--r", lincomb.r)->capture_default_str();
    l_lincomb->add_option("--n", lincomb.n)->capture_default_str();
    l_lincomb->add_option("--trials", lincomb.trials, "number of matrices")->capture_default_str();
    l_lincomb->add_option("--budget", lincomb.search_budget, "candidates per matrix")->capture_default_str();
    l_lincomb->add_option("--seed", lincomb.seed)->capture_default_str();
    l_lincomb->add_option("--jobs", lincomb.jobs)->capture_default_str();

    AnticoncentrationConfig anti;
    std::size_t anti_uniform = 0;
    auto* l_anti = lemmas->add_subcommand("anticonc", "anticoncentration bound with calibration");
    common(l_anti);
    l_anti->add_option("--x", anti.x, "nonnegative coefficients")->delimiter(',');
    l_anti->add_option("--uniform", anti_uniform, "use x_i = 1/(2n) for n coordinates");
    l_anti->add_option("--beta", anti.beta)->required();

    // certify
    SweepSpec cert_spec;
    cert_spec.seed = 42;
    std::size_t cert_m = 0, cert_runs = 1;
    int cert_family = 1;
    bool cert_restrict = false;
    std::optional<double> cert_threshold;
    std::string cert_quota = "calibrated";
    auto* certify = app.add_subcommand("certify", "run the majority-voter certifier on seeded samples");
    add_adversary_options(certify, cert_spec, cert_quota);
    certify->add_option("--m", cert_m, "sample size")->required();
    certify->add_option("--runs", cert_runs, "seeded runs")->capture_default_str();
    certify->add_option("--family", cert_family, "1 or 2")->check(CLI::Range(1, 2))->capture_default_str();
    certify->add_flag("--restrict-minus", cert_restrict, "enforce the minus quota on F");
    certify->add_option("--threshold", cert_threshold, "advantage demanded per round (default 2*gamma)");
    certify->add_option("--max-fail-rate", cert_spec.max_fail_rate)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    auto quota = [](const std::string& s) { return s == "faithful" ? QuotaRule::faithful : QuotaRule::calibrated; };

    try {
        if (*run) {
            run_spec.m_grid = {run_m};
            run_spec.algorithms = {{parse_algorithm(run_algo), run_adv == "on"}};
            run_spec.quota_rule = quota(run_quota);
            run_spec.jobs = resolve_jobs(run_spec.jobs);
            run_spec.validate();
            return finish_sweep(run_spec, run_out, run_summary);
        }
        if (*sweep) {
            std::ifstream is(sweep_config);
            if (!is) throw std::invalid_argument("cannot read " + sweep_config);
            json j;
            try {
                j = json::parse(is);
            } catch (const json::exception& e) {
                throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
            }
            SweepSpec spec = parse_sweep_spec(j);
            if (sweep_jobs) spec.jobs = *sweep_jobs;
            spec.jobs = resolve_jobs(spec.jobs);
            if (sweep_max_fail) spec.max_fail_rate = *sweep_max_fail;
            spec.validate();
            return finish_sweep(spec, sweep_out, sweep_summary);
        }
        if (*lemmas) {
            json out;
            bool pass = false;
            if (*l_bias) {
                bias.trials = lemma_trials;
                bias.seed = lemma_seed;
                bias.jobs = resolve_jobs(lemma_jobs);
                const auto r = check_bias_lemma(bias);
                out = r;
                pass = r.pass;
            } else if (*l_coupon) {
                coupon.trials = lemma_trials;
                coupon.seed = lemma_seed;
                coupon.jobs = resolve_jobs(lemma_jobs);
                const auto r = check_coupon_collector(coupon);
                out = r;
                pass = r.pass;
            } else if (*l_lincomb) {
                lincomb.jobs = resolve_jobs(lincomb.jobs);
                const auto r = check_linear_comb(lincomb);
                out = r.report;
                out["violations"] = r.violations;
                out["fewest_small_entries"] = r.fewest_small_entries;
                out["verdict"] = r.verdict;
                pass = r.report.pass;
            } else if (*l_anti) {
                if (anti_uniform > 0) {
                    if (!anti.x.empty()) throw std::invalid_argument("give either --x or --uniform");
                    anti.x.assign(anti_uniform, 1.0 / (2.0 * static_cast<double>(anti_uniform)));
                }
                anti.trials = lemma_trials;
                anti.seed = lemma_seed;
                anti.jobs = resolve_jobs(lemma_jobs);
                const auto r = check_anticoncentration(anti);
                out = r.report;
                out["calibration"] = {{"max_mc2", r.max_c2}, {"min_mc3", r.min_c3}, {"seed", r.seed}};
                pass = r.report.pass;
            }
            std::cout << out.dump(2) << "\n";
            return pass ? kExitOk : kExitFailures;
        }
        if (*certify) {
            AdversaryConfig cfg = cert_spec.adversary_config();
            cfg.quota_rule = quota(cert_quota);
            const AdversaryParams p = derive_params(cert_spec.gamma, cert_spec.d, cert_m, cfg);
            std::size_t fails = 0;
            json runs = json::array();
            for (std::size_t i = 0; i < cert_runs; ++i) {
                const std::uint64_t seed = trial_seed(cert_spec.seed, cert_m, i);
                const HypothesisSets sets(p, derive_seed(seed, {seed_tag::hypotheses}));
                const SampleSet sample = draw_sample(Universe(p.u), cert_m, derive_seed(seed, {seed_tag::sample}));
                const auto res = majority_voter_certify(sets, cert_family, sample, p, cert_restrict, cert_threshold);
                if (const auto* c = std::get_if<Certificate>(&res)) {
                    runs.push_back({{"seed", seed},
                                    {"result", "certificate"},
                                    {"min_margin", c->min_margin},
                                    {"max_normalizer", c->max_normalizer},
                                    {"gamma", c->gamma},
                                    {"log_potential_lhs", c->log_potential_lhs},
                                    {"log_potential_rhs", c->log_potential_rhs}});
                } else {
                    ++fails;
                    runs.push_back({{"seed", seed}, {"result", "fail"}, {"round", std::get<CertifierFail>(res).round}});
                }
            }
            const double rate = static_cast<double>(fails) / static_cast<double>(cert_runs);
            std::cout << json{{"runs", runs}, {"fail_rate", rate}}.dump(2) << "\n";
            return rate > cert_spec.max_fail_rate ? kExitFailures : kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
