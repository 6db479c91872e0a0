#include "xcmix/model.hpp"

#include "xcmix/error.hpp"
#include "xcmix/kernels.hpp"

#include <cmath>
#include <numbers>

namespace xcmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112; // ln(2 pi)

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

} // namespace

ParameterState ParameterState::zeros(std::size_t athletes, std::size_t courses, std::size_t seasons, bool windspeed) {
    ParameterState s;
    s.athlete.assign(athletes, 0.0);
    s.course.assign(courses, 0.0);
    s.season.assign(seasons, 0.0);
    if (windspeed) s.lambda_wind = 0.0;
    return s;
}

void ParameterState::check_invariants() const {
    require_positive(tau_obs, "tau_obs");
    require_positive(tau_athlete, "tau_athlete");
    require_positive(tau_course, "tau_course");
    require_positive(tau_season, "tau_season");
    require_positive(phi, "phi");
    if (!athlete.empty() && athlete[0] != 0.0) throw DomainError("baseline athlete effect must be 0");
    if (!course.empty() && course[0] != 0.0) throw DomainError("baseline course effect must be 0");
    if (!season.empty() && season[0] != 0.0) throw DomainError("baseline season effect must be 0");
}

std::vector<std::string> ParameterLayout::names(const LevelDictionary& a, const LevelDictionary& c,
                                                const LevelDictionary& s) const {
    std::vector<std::string> out;
    out.reserve(size());
    out.emplace_back("intercept");
    for (const auto& n : a.names()) out.push_back("athlete[" + n + "]");
    for (const auto& n : c.names()) out.push_back("course[" + n + "]");
    for (const auto& n : s.names()) out.push_back("season[" + n + "]");
    out.emplace_back("gamma_dist");
    if (windspeed) out.emplace_back("lambda_wind");
    for (const char* n : {"rho_cur", "rho_prev", "m_rho", "phi", "tau_obs", "tau_athlete", "tau_course", "tau_season"})
        out.emplace_back(n);
    return out;
}

std::vector<bool> ParameterLayout::constrained() const {
    std::vector<bool> out(size(), false);
    if (athletes) out[athlete_offset()] = true;
    if (courses) out[course_offset()] = true;
    if (seasons) out[season_offset()] = true;
    return out;
}

void ParameterLayout::flatten(const ParameterState& s, std::span<double> out) const {
    std::size_t k = 0;
    out[k++] = s.intercept;
    for (double v : s.athlete) out[k++] = v;
    for (double v : s.course) out[k++] = v;
    for (double v : s.season) out[k++] = v;
    out[k++] = s.gamma_dist;
    if (windspeed) out[k++] = s.lambda_wind.value_or(0.0);
    for (double v : {s.rho_cur, s.rho_prev, s.m_rho, s.phi, s.tau_obs, s.tau_athlete, s.tau_course, s.tau_season})
        out[k++] = v;
}

ParameterState ParameterLayout::unflatten(std::span<const double> row) const {
    ParameterState s = ParameterState::zeros(athletes, courses, seasons, windspeed);
    std::size_t k = 0;
    s.intercept = row[k++];
    for (auto& v : s.athlete) v = row[k++];
    for (auto& v : s.course) v = row[k++];
    for (auto& v : s.season) v = row[k++];
    s.gamma_dist = row[k++];
    if (windspeed) s.lambda_wind = row[k++];
    for (double* v : {&s.rho_cur, &s.rho_prev, &s.m_rho, &s.phi, &s.tau_obs, &s.tau_athlete, &s.tau_course,
                      &s.tau_season})
        *v = row[k++];
    return s;
}

ParameterLayout layout_for(const Design& design, bool windspeed) {
    return {design.athletes.size(), design.courses.size(), design.seasons.size(), windspeed};
}

double normal_logpdf(double x, double mean, double variance) {
    require_positive(variance, "variance");
    double z = x - mean;
    return -0.5 * (kLog2Pi + std::log(variance)) - 0.5 * z * z / variance;
}

double gamma_logpdf(double x, double shape, double rate) {
    require_positive(shape, "gamma shape");
    require_positive(rate, "gamma rate");
    if (!(x > 0.0)) throw DomainError("gamma density evaluated at a nonpositive point");
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double linear_predictor(const ParameterState& s, std::size_t i, const Design& d) {
    double mu = s.intercept + s.athlete[d.athlete[i]] + s.course[d.course[i]] + s.season[d.season[i]] +
                s.gamma_dist * d.distance_c[i];
    if (s.lambda_wind) mu += *s.lambda_wind * d.windspeed_c[i];
    mu += s.rho_cur * d.rain_current[i] + s.rho_prev * d.rain_previous[i];
    return mu;
}

void linear_predictor(const ParameterState& s, const Design& d, std::span<double> mu) {
    for (std::size_t i = 0; i < d.size(); ++i) mu[i] = linear_predictor(s, i, d);
}

double log_likelihood(const ParameterState& s, const Design& d) {
    require_positive(s.tau_obs, "tau_obs");
    const std::size_t n = d.size();
    if (n == 0) return 0.0;
    std::vector<double> mu(n);
    linear_predictor(s, d, mu);
    double ss = kernels::squared_distance(d.response_y, mu);
    return 0.5 * static_cast<double>(n) * (std::log(s.tau_obs) - kLog2Pi) - 0.5 * s.tau_obs * ss;
}

double log_likelihood(const ParameterState& s, const Design& d, std::span<const std::size_t> rows) {
    require_positive(s.tau_obs, "tau_obs");
    double ss = 0.0;
    for (auto i : rows) {
        double r = d.response_y[i] - linear_predictor(s, i, d);
        ss += r * r;
    }
    return 0.5 * static_cast<double>(rows.size()) * (std::log(s.tau_obs) - kLog2Pi) - 0.5 * s.tau_obs * ss;
}

double log_prior(const ParameterState& s, const PriorConfig& p) {
    s.check_invariants();
    double lp = normal_logpdf(s.intercept, p.intercept.mean, p.intercept.variance);
    lp += normal_logpdf(s.gamma_dist, p.distance.mean, p.distance.variance);
    if (s.lambda_wind) lp += normal_logpdf(*s.lambda_wind, p.windspeed.mean, p.windspeed.variance);
    lp += normal_logpdf(s.rho_cur, s.m_rho, p.rain_current_variance);
    lp += normal_logpdf(s.rho_prev, s.phi * s.m_rho, p.rain_previous_variance);
    lp += normal_logpdf(s.m_rho, 0.0, p.hypermean_variance);
    lp += gamma_logpdf(s.phi, p.phi.shape, p.phi.rate);
    lp += gamma_logpdf(s.tau_obs, p.tau_obs.shape, p.tau_obs.rate);
    lp += gamma_logpdf(s.tau_athlete, p.tau_athlete.shape, p.tau_athlete.rate);
    lp += gamma_logpdf(s.tau_course, p.tau_course.shape, p.tau_course.rate);
    lp += gamma_logpdf(s.tau_season, p.tau_season.shape, p.tau_season.rate);
    auto effects = [&](const std::vector<double>& v, double tau) {
        for (std::size_t l = 1; l < v.size(); ++l) lp += normal_logpdf(v[l], 0.0, 1.0 / tau);
    };
    effects(s.athlete, s.tau_athlete);
    effects(s.course, s.tau_course);
    effects(s.season, s.tau_season);
    return lp;
}

double log_posterior(const ParameterState& s, const Design& d, const PriorConfig& p) {
    return log_likelihood(s, d) + log_prior(s, p);
}

} // namespace xcmix
