#pragma once

#include "xcmix/config.hpp"
#include "xcmix/ingest.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xcmix {

// One point in parameter space. Entry 0 of each random-effect vector is the
// corner-constrained baseline and is always exactly 0.
struct ParameterState {
    double intercept = 0.0; // log-minutes
    std::vector<double> athlete;
    std::vector<double> course;
    std::vector<double> season;
    double gamma_dist = 0.0;                // per mile
    std::optional<double> lambda_wind{};    // per windspeed unit, only when windspeed is modelled
    double rho_cur = 0.0;                   // per mm
    double rho_prev = 0.0;                  // per mm
    double m_rho = 0.0;
    double phi = 1.0;
    double tau_obs = 1.0;
    double tau_athlete = 1.0;
    double tau_course = 1.0;
    double tau_season = 1.0;

    static ParameterState zeros(std::size_t athletes, std::size_t courses, std::size_t seasons, bool windspeed);

    // Throws DomainError naming the first violated invariant.
    void check_invariants() const;

    bool operator==(const ParameterState&) const = default;
};

// Named flat layout used for chain storage:
// intercept, athlete[..], course[..], season[..], gamma_dist, [lambda_wind],
// rho_cur, rho_prev, m_rho, phi, tau_obs, tau_athlete, tau_course, tau_season.
struct ParameterLayout {
    std::size_t athletes = 0;
    std::size_t courses = 0;
    std::size_t seasons = 0;
    bool windspeed = false;

    std::size_t size() const { return 1 + athletes + courses + seasons + (windspeed ? 10 : 9); }
    std::size_t athlete_offset() const { return 1; }
    std::size_t course_offset() const { return 1 + athletes; }
    std::size_t season_offset() const { return 1 + athletes + courses; }
    std::size_t scalar_offset() const { return 1 + athletes + courses + seasons; }

    std::vector<std::string> names(const LevelDictionary& athletes, const LevelDictionary& courses,
                                   const LevelDictionary& seasons) const;
    // Columns that are identically zero (the corner-constrained levels).
    std::vector<bool> constrained() const;

    void flatten(const ParameterState& s, std::span<double> out) const;
    ParameterState unflatten(std::span<const double> row) const;

    bool operator==(const ParameterLayout&) const = default;
};

ParameterLayout layout_for(const Design& design, bool windspeed);

double normal_logpdf(double x, double mean, double variance);
double gamma_logpdf(double x, double shape, double rate);

// mu for observation i.
double linear_predictor(const ParameterState& s, std::size_t i, const Design& d);
void linear_predictor(const ParameterState& s, const Design& d, std::span<double> mu);

double log_likelihood(const ParameterState& s, const Design& d);
// Restricted to the listed observations.
double log_likelihood(const ParameterState& s, const Design& d, std::span<const std::size_t> rows);
double log_prior(const ParameterState& s, const PriorConfig& p);
double log_posterior(const ParameterState& s, const Design& d, const PriorConfig& p);

} // namespace xcmix
