#pragma once

#include "xcmix/ingest.hpp"
#include "xcmix/model.hpp"
#include "xcmix/rng.hpp"
#include "xcmix/sampler.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace xcmix {

struct UniformRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Generating values for the scalar parameters. Random effects are drawn
// from N(0, 1/tau_*) with the baseline levels fixed at 0.
struct SyntheticTruth {
    double intercept = 3.8066624897703196; // ln 45
    double gamma_dist = 0.224;
    double lambda_wind = 0.0;
    double rho_cur = 0.001;
    double rho_prev = 0.001;
    double m_rho = 0.001;
    double phi = 1.0;
    double tau_obs = 400.0;
    double tau_athlete = 100.0;
    double tau_course = 150.0;
    double tau_season = 2500.0;
};

struct SyntheticSpec {
    std::size_t athletes = 200;
    std::size_t courses = 8;
    std::size_t seasons = 5;
    std::size_t races = 15;
    // Each athlete enters each race independently with probability
    // min(1, mean_finishers / athletes).
    double mean_finishers = 167.0;
    int first_season_year = 2017;
    bool include_windspeed = false;
    Sex sex = Sex::male;
    UniformRange distance{5.9, 6.4};
    UniformRange windspeed{0.0, 30.0};
    UniformRange rainfall{10.0, 120.0};
    SyntheticTruth truth{};
    std::uint64_t seed = 1;

    void validate() const; // throws InputError
};

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc, SyntheticSpec base = {});

struct SyntheticDataset {
    std::vector<RaceObservation> observations;
    std::vector<RaceContext> races;
    RainfallTable rainfall;
    // Generating state, indexed in generation order by the names below.
    ParameterState truth;
    std::vector<std::string> athlete_names, course_names, season_names;
};

SyntheticDataset simulate_dataset(const SyntheticSpec& spec);

nlohmann::json truth_json(const SyntheticDataset& data);

// Writes results.csv, races.csv, rainfall.csv (ingest schemas) and truth.json.
void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec, const std::filesystem::path& dir);

// Fresh observations for every (athlete, race) in the design, drawn from the
// model at a fixed state. Times are back-transformed to minutes.
std::vector<RaceObservation> simulate_observations(const ParameterState& state, const Design& design, Rng& rng);

// Predicted finish times for one race: draws x finishers, row-major.
struct PredictiveDraws {
    std::size_t race = 0;
    std::size_t draws = 0;
    std::size_t finishers = 0;
    std::vector<std::size_t> observations; // design rows of the race's finishers
    std::vector<double> times;             // minutes

    std::span<const double> draw(std::size_t d) const { return {times.data() + d * finishers, finishers}; }
};

inline constexpr std::size_t kPredictiveChunk = 256;

// One replicate per stored draw. Draws are processed in chunks of
// kPredictiveChunk; chunk c of race r uses sub_seed(sub_seed(seed, 1'000'000 + r), c),
// so results do not depend on `threads`.
PredictiveDraws posterior_predictive_race(const ChainOutput& chain, const Design& design, std::string_view course,
                                          std::string_view season, std::uint64_t seed, unsigned threads = 0);
PredictiveDraws posterior_predictive_race(const ChainOutput& chain, const Design& design, std::size_t race,
                                          std::uint64_t seed, unsigned threads = 0);

// min, LQ, median, UQ, max (type-7 quartiles).
using FiveNumber = std::array<double, 5>;
FiveNumber five_number_summary(std::vector<double> values);

struct PpcRaceReport {
    std::string course;
    std::string season;
    std::size_t finishers = 0;
    FiveNumber observed{};
    FiveNumber predicted{};   // mean over draws of each order statistic
    FiveNumber discrepancy{}; // predicted - observed
    bool low_power = false;   // fewer than 5 finishers
};

// Reports for the listed design races (all races when empty). Observed
// times are grouped by (course, season); a requested race with no observed
// finishers is an error.
std::vector<PpcRaceReport> ppc_report(const ChainOutput& chain, const Design& design,
                                      const std::vector<RaceObservation>& observed, std::uint64_t seed,
                                      const std::vector<std::size_t>& races = {});

void write_ppc_csv(const std::filesystem::path& path, const std::vector<PpcRaceReport>& reports);

// Counts of log finish times on a shared grid of equal-width bins.
struct RaceHistogram {
    std::vector<double> edges; // bins + 1 edges, log-minutes
    std::vector<std::size_t> observed;
    std::vector<std::size_t> predicted;
};

RaceHistogram race_histogram(std::span<const double> observed_times, std::span<const double> predicted_times,
                             std::size_t bins);

// Two-sided exact binomial sign test on the nonzero entries.
double sign_test_p_value(std::span<const double> differences);

// Change in finish time, in seconds, for a covariate change of `delta` units
// with log-scale coefficient `coefficient`: 60 * t * (exp(c * delta) - 1).
double effect_on_time(double base_time_minutes, double coefficient, double delta);

} // namespace xcmix
