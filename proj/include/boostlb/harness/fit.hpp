// fit.hpp
//
// Two one-parameter error models fitted by least squares on log(mean error):
//   log  model  e(m) = a * d ln(m g^2 / d) / (m g^2)
//   flat model  e(m) = a * d / (m g^2)
// With one free scale the fit is the mean log ratio; the preferred model is
// the one with the smaller sum of squared log residuals.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace boostlb {

struct ErrorPoint {
    std::size_t m;
    double error;
};

struct ModelFit {
    double a = 0;
    std::vector<double> residuals;  // log(error) - log(model), per point
    double sse = 0;
};

struct FitReport {
    ModelFit model_log;
    ModelFit model_flat;
    std::string preferred;  // "log" or "flat"
};

inline double log_model_shape(std::size_t m, double gamma, double d) {
    const double x = static_cast<double>(m) * gamma * gamma;
    return d * std::log(x / d) / x;
}

inline double flat_model_shape(std::size_t m, double gamma, double d) {
    return d / (static_cast<double>(m) * gamma * gamma);
}

namespace detail {

inline ModelFit fit_scale(const std::vector<double>& log_err, const std::vector<double>& log_shape) {
    ModelFit f;
    double s = 0.0;
    for (std::size_t i = 0; i < log_err.size(); ++i) s += log_err[i] - log_shape[i];
    const double log_a = s / static_cast<double>(log_err.size());
    f.a = std::exp(log_a);
    for (std::size_t i = 0; i < log_err.size(); ++i) {
        const double res = log_err[i] - log_a - log_shape[i];
        f.residuals.push_back(res);
        f.sse += res * res;
    }
    return f;
}

}  // namespace detail

/// Throws std::domain_error when some error is not positive or some m has
/// m g^2 / d <= 1 (the log model is undefined there).
inline FitReport fit_error_models(const std::vector<ErrorPoint>& points, double gamma, double d) {
    if (points.empty()) throw std::invalid_argument("fit needs at least one point");
    std::vector<double> le, ll, lf;
    for (const auto& p : points) {
        if (!(p.error > 0.0) || !std::isfinite(p.error))
            throw std::domain_error("cannot fit a non-positive mean error at m = " + std::to_string(p.m));
        if (!(static_cast<double>(p.m) * gamma * gamma / d > 1.0))
            throw std::domain_error("log model needs m gamma^2 / d > 1, violated at m = " + std::to_string(p.m));
        le.push_back(std::log(p.error));
        ll.push_back(std::log(log_model_shape(p.m, gamma, d)));
        lf.push_back(std::log(flat_model_shape(p.m, gamma, d)));
    }
    FitReport r{detail::fit_scale(le, ll), detail::fit_scale(le, lf), ""};
    r.preferred = r.model_log.sse < r.model_flat.sse ? "log" : "flat";
    return r;
}

inline void to_json(nlohmann::json& j, const FitReport& f) {
    j = nlohmann::json{{"model_log", {{"a", f.model_log.a}}},
                       {"model_flat", {{"a", f.model_flat.a}}},
                       {"residuals", {{"log", f.model_log.residuals}, {"flat", f.model_flat.residuals}}},
                       {"sse", {{"log", f.model_log.sse}, {"flat", f.model_flat.sse}}},
                       {"preferred", f.preferred}};
}

inline void from_json(const nlohmann::json& j, FitReport& f) {
    j.at("model_log").at("a").get_to(f.model_log.a);
    j.at("model_flat").at("a").get_to(f.model_flat.a);
    j.at("residuals").at("log").get_to(f.model_log.residuals);
    j.at("residuals").at("flat").get_to(f.model_flat.residuals);
    j.at("sse").at("log").get_to(f.model_log.sse);
    j.at("sse").at("flat").get_to(f.model_flat.sse);
    j.at("preferred").get_to(f.preferred);
}

}  // namespace boostlb
