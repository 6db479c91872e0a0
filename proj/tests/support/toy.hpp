#pragma once

// A fixed five-observation dataset and a matching parameter state, used by
// the conditional-sampler oracles.

#include "xcmix/ingest.hpp"
#include "xcmix/model.hpp"
#include "xcmix/sampler.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace xcmix::testing {

inline RaceObservation observation(std::string athlete, std::string course, std::string season, double minutes,
                                   const char* month) {
    RaceObservation o;
    o.athlete_id = std::move(athlete);
    o.course = std::move(course);
    o.season = std::move(season);
    o.finish_time = minutes;
    o.race_month = YearMonth::parse(month);
    return o;
}

inline RaceContext context(std::string course, std::string season, double miles, double wind, const char* month) {
    return {std::move(course), std::move(season), miles, wind, YearMonth::parse(month)};
}

inline std::vector<RaceObservation> toy_observations() {
    return {
        observation("A1", "Alnwick", "17/18", 42.0, "2017-10"),
        observation("A2", "Alnwick", "17/18", 45.5, "2017-10"),
        observation("A1", "Herrington", "17/18", 44.1, "2017-11"),
        observation("A2", "Herrington", "18/19", 47.3, "2018-11"),
        observation("A3", "Alnwick", "18/19", 40.2, "2018-10"),
    };
}

inline std::vector<RaceContext> toy_races() {
    return {
        context("Alnwick", "17/18", 6.0, 10.0, "2017-10"),
        context("Herrington", "17/18", 6.3, 5.0, "2017-11"),
        context("Alnwick", "18/19", 6.1, 12.0, "2018-10"),
        context("Herrington", "18/19", 6.4, 3.0, "2018-11"),
    };
}

inline RainfallTable toy_rainfall() {
    RainfallTable r;
    const double mm[] = {40.0, 55.0, 72.0, 31.0, 64.0, 48.0, 80.0, 22.0, 35.0, 90.0, 58.0, 67.0, 43.0, 29.0, 75.0};
    YearMonth m{2017, 9};
    for (double v : mm) {
        r.mm[m] = v;
        m = next_month(m);
    }
    return r;
}

// Priors informative enough that every conditional differs visibly from its
// prior on the toy data.
inline ModelConfig toy_config(bool windspeed = false) {
    ModelConfig cfg;
    cfg.include_windspeed = windspeed;
    auto& p = cfg.priors;
    p.intercept = {3.5, 1.0};
    p.distance = {0.0, 1.0};
    p.windspeed = {0.0, 0.01};
    p.rain_current_variance = 1e-4;
    p.rain_previous_variance = 1e-4;
    p.hypermean_variance = 1e-3;
    p.phi = {2.0, 2.0};
    p.tau_obs = {1.0, 0.05};
    p.tau_athlete = {1.0, 0.05};
    p.tau_course = {1.0, 0.05};
    p.tau_season = {1.0, 0.05};
    cfg.mcmc.burn_in = 0;
    cfg.mcmc.iterations = 10;
    cfg.mcmc.thin = 1;
    return cfg;
}

inline Design toy_design(bool windspeed = false, Response response = Response::log_time) {
    auto cfg = toy_config(windspeed);
    cfg.response = response;
    return build_design(toy_observations(), toy_races(), toy_rainfall(), cfg);
}

inline ParameterState toy_state(bool windspeed = false) {
    auto s = ParameterState::zeros(3, 2, 2, windspeed);
    s.intercept = 3.75;
    s.athlete = {0.0, 0.02, -0.03};
    s.course = {0.0, 0.05};
    s.season = {0.0, -0.01};
    s.gamma_dist = 0.2;
    if (windspeed) s.lambda_wind = 0.002;
    s.rho_cur = 0.001;
    s.rho_prev = 0.006;
    s.m_rho = 0.004;
    s.phi = 1.2;
    s.tau_obs = 300.0;
    s.tau_athlete = 400.0;
    s.tau_course = 150.0;
    s.tau_season = 2000.0;
    return s;
}

// One scalar coordinate of the state together with the sweep step that
// updates it.
struct Coordinate {
    std::string name;
    Step step;
    std::function<double&(ParameterState&)> ref;
    bool positive = false;
};

inline std::vector<Coordinate> toy_coordinates(bool windspeed = false) {
    std::vector<Coordinate> c = {
        {"intercept", Step::intercept, [](ParameterState& s) -> double& { return s.intercept; }},
        {"gamma_dist", Step::distance, [](ParameterState& s) -> double& { return s.gamma_dist; }},
        {"rho_cur", Step::rain_current, [](ParameterState& s) -> double& { return s.rho_cur; }},
        {"rho_prev", Step::rain_previous, [](ParameterState& s) -> double& { return s.rho_prev; }},
        {"athlete[A2]", Step::athlete_block, [](ParameterState& s) -> double& { return s.athlete[1]; }},
        {"course[Herrington]", Step::course_block, [](ParameterState& s) -> double& { return s.course[1]; }},
        {"season[18/19]", Step::season_block, [](ParameterState& s) -> double& { return s.season[1]; }},
        {"m_rho", Step::hypermean, [](ParameterState& s) -> double& { return s.m_rho; }},
        {"phi", Step::phi, [](ParameterState& s) -> double& { return s.phi; }, true},
        {"tau_obs", Step::tau_obs, [](ParameterState& s) -> double& { return s.tau_obs; }, true},
        {"tau_athlete", Step::tau_athlete, [](ParameterState& s) -> double& { return s.tau_athlete; }, true},
        {"tau_course", Step::tau_course, [](ParameterState& s) -> double& { return s.tau_course; }, true},
        {"tau_season", Step::tau_season, [](ParameterState& s) -> double& { return s.tau_season; }, true},
    };
    if (windspeed)
        c.insert(c.begin() + 2,
                 {"lambda_wind", Step::windspeed, [](ParameterState& s) -> double& { return *s.lambda_wind; }});
    return c;
}

// log_posterior as a function of one coordinate, everything else held at `at`.
inline std::function<double(double)> coordinate_log_density(const Coordinate& c, const ParameterState& at,
                                                            const Design& d, const PriorConfig& p) {
    return [c, at, &d, &p](double v) {
        if (c.positive && !(v > 0.0)) return -std::numeric_limits<double>::infinity();
        ParameterState s = at;
        c.ref(s) = v;
        return log_posterior(s, d, p);
    };
}

// n successive applications of one update, starting from `at` each time the
// sampler is constructed. Only the chosen coordinate moves.
inline std::vector<double> conditional_draws(const Coordinate& c, const ParameterState& at, const Design& d,
                                             const ModelConfig& cfg, std::size_t n, std::uint64_t seed) {
    GibbsSampler sampler(d, cfg, seed);
    sampler.set_state(at);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        sampler.step(c.step);
        ParameterState s = sampler.state();
        out[k] = c.ref(s);
    }
    return out;
}

} // namespace xcmix::testing
