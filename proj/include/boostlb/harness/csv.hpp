// csv.hpp
//
// Trial CSV: one row per trial plus mean and median rows per (m, algorithm,
// adversary) group.  Numbers use the shortest round-trip form, so parsing an
// emitted row gives back the same doubles.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "boostlb/harness/trial.hpp"

namespace boostlb {

inline constexpr const char* kCsvHeader =
    "seed,m,u,r,r1,gamma,d,alpha,algo,adversary,exact_error,h0_weight,in_spart1,frs_minus_fraction,rounds_used,"
    "failure";
inline constexpr std::size_t kCsvColumns = 16;

/// Summary of one (m, algorithm, adversary) group.  Statistics are over the
/// trials without a failure tag; in_spart1 is a fraction over all trials.
struct AggregateRow {
    std::string stat;  // "mean" or "median"
    std::size_t m = 0, u = 0, r = 0, r1 = 0;
    double gamma = 0, d = 0, alpha = 0;
    Algorithm algo = Algorithm::adaboost;
    bool adversary_on = true;
    double exact_error = 0;
    double h0_weight = 0;
    double in_spart1 = 0;
    double frs_minus_fraction = 0;
    double rounds_used = 0;
    std::size_t trials = 0;
    std::size_t failures = 0;
};

inline bool same_aggregate(const AggregateRow& a, const AggregateRow& b) {
    auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.stat == b.stat && a.m == b.m && a.u == b.u && a.r == b.r && a.r1 == b.r1 && eq(a.gamma, b.gamma) &&
           eq(a.d, b.d) && eq(a.alpha, b.alpha) && a.algo == b.algo && a.adversary_on == b.adversary_on &&
           eq(a.exact_error, b.exact_error) && eq(a.h0_weight, b.h0_weight) && eq(a.in_spart1, b.in_spart1) &&
           eq(a.frs_minus_fraction, b.frs_minus_fraction) && eq(a.rounds_used, b.rounds_used) &&
           a.trials == b.trials && a.failures == b.failures;
}

namespace csv_detail {

inline std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <class Int>
std::string num(Int x) requires std::is_integral_v<Int> {
    return std::to_string(x);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline const char* kColumnNames[kCsvColumns] = {"seed", "m", "u", "r", "r1", "gamma", "d", "alpha", "algo",
                                                "adversary", "exact_error", "h0_weight", "in_spart1",
                                                "frs_minus_fraction", "rounds_used", "failure"};

[[noreturn]] inline void bad(std::size_t line, std::size_t col, const std::string& what) {
    throw std::runtime_error("csv line " + std::to_string(line) + ", column " + kColumnNames[col] + ": " + what);
}

inline double parse_double(const std::string& s, std::size_t line, std::size_t col) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(line, col, "not a number: '" + s + "'");
    return x;
}

template <class Int>
Int parse_int(const std::string& s, std::size_t line, std::size_t col) {
    Int x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(line, col, "not an integer: '" + s + "'");
    return x;
}

inline bool parse_bool(const std::string& s, std::size_t line, std::size_t col) {
    if (s == "true") return true;
    if (s == "false") return false;
    bad(line, col, "expected true or false, got '" + s + "'");
}

inline bool parse_switch(const std::string& s, std::size_t line, std::size_t col) {
    if (s == "on") return true;
    if (s == "off") return false;
    bad(line, col, "expected on or off, got '" + s + "'");
}

}  // namespace csv_detail

inline std::string to_csv_row(const TrialResult& t) {
    using csv_detail::num;
    if (t.failure && t.failure->find_first_of(",\n\r") != std::string::npos)
        throw std::invalid_argument("failure tag must not contain separators");
    std::string s = num(t.seed);
    for (const std::string& f :
         {num(t.m), num(t.u), num(t.r), num(t.r1), num(t.gamma), num(t.d), num(t.alpha),
          to_string(t.algo), std::string(t.adversary_on ? "on" : "off"), num(t.exact_error), num(t.h0_weight),
          std::string(t.in_spart1 ? "true" : "false"), num(t.frs_minus_fraction), num(t.rounds_used),
          t.failure.value_or("")}) {
        s.push_back(',');
        s += f;
    }
    return s;
}

inline std::string to_csv_row(const AggregateRow& a) {
    using csv_detail::num;
    std::string s = a.stat;
    for (const std::string& f :
         {num(a.m), num(a.u), num(a.r), num(a.r1), num(a.gamma), num(a.d), num(a.alpha), to_string(a.algo),
          std::string(a.adversary_on ? "on" : "off"), num(a.exact_error), num(a.h0_weight), num(a.in_spart1),
          num(a.frs_minus_fraction), num(a.rounds_used),
          "failed=" + num(a.failures) + "/" + num(a.trials)}) {
        s.push_back(',');
        s += f;
    }
    return s;
}

/// Mean and median rows of one group of trials with equal (m, algo, adversary).
/// A group of one trial gets only the mean row (the median is the same).
inline std::vector<AggregateRow> aggregate_group(const std::vector<TrialResult>& group) {
    if (group.empty()) throw std::invalid_argument("empty group");
    const TrialResult& f = group.front();
    AggregateRow base;
    base.m = f.m;
    base.u = f.u;
    base.r = f.r;
    base.r1 = f.r1;
    base.gamma = f.gamma;
    base.d = f.d;
    base.alpha = f.alpha;
    base.algo = f.algo;
    base.adversary_on = f.adversary_on;
    base.trials = group.size();
    std::size_t in_part1 = 0;
    std::vector<double> err, h0, frs, rounds;
    for (const auto& t : group) {
        in_part1 += t.in_spart1;
        if (t.failed()) {
            ++base.failures;
            continue;
        }
        err.push_back(t.exact_error);
        h0.push_back(t.h0_weight);
        rounds.push_back(static_cast<double>(t.rounds_used));
        if (!std::isnan(t.frs_minus_fraction)) frs.push_back(t.frs_minus_fraction);
    }
    base.in_spart1 = static_cast<double>(in_part1) / static_cast<double>(group.size());

    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto median = [](std::vector<double> v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    AggregateRow mn = base, md = base;
    mn.stat = "mean";
    mn.exact_error = mean(err);
    mn.h0_weight = mean(h0);
    mn.frs_minus_fraction = mean(frs);
    mn.rounds_used = mean(rounds);
    md.stat = "median";
    md.exact_error = median(err);
    md.h0_weight = median(h0);
    md.frs_minus_fraction = median(frs);
    md.rounds_used = median(rounds);
    if (group.size() == 1) return {mn};
    return {mn, md};
}

using GroupKey = std::tuple<std::size_t, std::string, bool>;

inline GroupKey group_key(const TrialResult& t) { return {t.m, to_string(t.algo), !t.adversary_on}; }

/// Trial rows sorted by (m, algorithm, adversary, seed) in place.
inline void sort_trials(std::vector<TrialResult>& trials) {
    std::sort(trials.begin(), trials.end(), [](const TrialResult& a, const TrialResult& b) {
        return std::tuple(group_key(a), a.seed) < std::tuple(group_key(b), b.seed);
    });
}

/// Header, then per group its sorted trial rows followed by mean and median.
inline void write_csv(std::ostream& os, std::vector<TrialResult> trials) {
    sort_trials(trials);
    os << kCsvHeader << '\n';
    for (std::size_t i = 0; i < trials.size();) {
        std::size_t j = i;
        while (j < trials.size() && group_key(trials[j]) == group_key(trials[i])) ++j;
        std::vector<TrialResult> group(trials.begin() + static_cast<std::ptrdiff_t>(i),
                                       trials.begin() + static_cast<std::ptrdiff_t>(j));
        for (const auto& t : group) os << to_csv_row(t) << '\n';
        for (const auto& a : aggregate_group(group)) os << to_csv_row(a) << '\n';
        i = j;
    }
}

struct CsvContents {
    std::vector<TrialResult> trials;
    std::vector<AggregateRow> aggregates;
};

inline TrialResult parse_trial_row(const std::vector<std::string>& f, std::size_t line) {
    using namespace csv_detail;
    TrialResult t;
    t.seed = parse_int<std::uint64_t>(f[0], line, 0);
    t.m = parse_int<std::size_t>(f[1], line, 1);
    t.u = parse_int<std::size_t>(f[2], line, 2);
    t.r = parse_int<std::size_t>(f[3], line, 3);
    t.r1 = parse_int<std::size_t>(f[4], line, 4);
    t.gamma = parse_double(f[5], line, 5);
    t.d = parse_double(f[6], line, 6);
    t.alpha = parse_double(f[7], line, 7);
    try {
        t.algo = parse_algorithm(f[8]);
    } catch (const std::invalid_argument& e) {
        bad(line, 8, e.what());
    }
    t.adversary_on = parse_switch(f[9], line, 9);
    t.exact_error = parse_double(f[10], line, 10);
    t.h0_weight = parse_double(f[11], line, 11);
    t.in_spart1 = parse_bool(f[12], line, 12);
    t.frs_minus_fraction = parse_double(f[13], line, 13);
    t.rounds_used = parse_int<std::size_t>(f[14], line, 14);
    if (!f[15].empty()) t.failure = f[15];
    return t;
}

inline AggregateRow parse_aggregate_row(const std::vector<std::string>& f, std::size_t line) {
    using namespace csv_detail;
    AggregateRow a;
    a.stat = f[0];
    a.m = parse_int<std::size_t>(f[1], line, 1);
    a.u = parse_int<std::size_t>(f[2], line, 2);
    a.r = parse_int<std::size_t>(f[3], line, 3);
    a.r1 = parse_int<std::size_t>(f[4], line, 4);
    a.gamma = parse_double(f[5], line, 5);
    a.d = parse_double(f[6], line, 6);
    a.alpha = parse_double(f[7], line, 7);
    try {
        a.algo = parse_algorithm(f[8]);
    } catch (const std::invalid_argument& e) {
        bad(line, 8, e.what());
    }
    a.adversary_on = parse_switch(f[9], line, 9);
    a.exact_error = parse_double(f[10], line, 10);
    a.h0_weight = parse_double(f[11], line, 11);
    a.in_spart1 = parse_double(f[12], line, 12);
    a.frs_minus_fraction = parse_double(f[13], line, 13);
    a.rounds_used = parse_double(f[14], line, 14);
    const std::string& tag = f[15];
    const auto slash = tag.find('/');
    if (tag.rfind("failed=", 0) != 0 || slash == std::string::npos) bad(line, 15, "expected failed=k/n");
    a.failures = parse_int<std::size_t>(tag.substr(7, slash - 7), line, 15);
    a.trials = parse_int<std::size_t>(tag.substr(slash + 1), line, 15);
    return a;
}

/// Parses a CSV written by write_csv.  Throws on schema violations, naming
/// the line and column.
inline CsvContents read_csv(std::istream& is) {
    CsvContents out;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        const auto got = csv_detail::split(line);
        for (std::size_t c = 0; c < kCsvColumns; ++c)
            if (c >= got.size() || got[c] != csv_detail::kColumnNames[c])
                throw std::runtime_error(std::string("csv header mismatch at column ") + csv_detail::kColumnNames[c]);
        throw std::runtime_error("csv header has extra columns");
    }
    for (std::size_t n = 2; std::getline(is, line); ++n) {
        if (line.empty() || line == "\r") continue;
        const auto f = csv_detail::split(line);
        if (f.size() != kCsvColumns)
            throw std::runtime_error("csv line " + std::to_string(n) + ": expected 16 fields, got " +
                                     std::to_string(f.size()));
        if (f[0] == "mean" || f[0] == "median")
            out.aggregates.push_back(parse_aggregate_row(f, n));
        else
            out.trials.push_back(parse_trial_row(f, n));
    }
    return out;
}

}  // namespace boostlb
