#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace xcmix {

enum class Response { log_time, log_pace };

std::string_view to_string(Response r);
Response parse_response(std::string_view text); // accepts log_time/log-time, log_pace/log-pace

struct NormalPrior {
    double mean = 0.0;
    double variance = 100.0;
};

struct GammaPrior {
    double shape = 0.001;
    double rate = 0.001;
};

// Hyperparameters. Every Normal is parameterised by its variance, every
// Gamma by shape and rate.
struct PriorConfig {
    NormalPrior intercept{};
    NormalPrior distance{};
    NormalPrior windspeed{};
    double rain_current_variance = 100.0;  // rho_cur ~ N(m_rho, v)
    double rain_previous_variance = 100.0; // rho_prev ~ N(phi * m_rho, v)
    double hypermean_variance = 100.0;     // m_rho ~ N(0, v)
    GammaPrior phi{1.0, 1.0};              // shape <= rate
    GammaPrior tau_athlete{};
    GammaPrior tau_course{};
    GammaPrior tau_season{};
    GammaPrior tau_obs{};

    void validate() const; // throws InputError
};

struct McmcSchedule {
    std::uint64_t burn_in = 10'000;
    std::uint64_t iterations = 1'000'000;
    std::uint64_t thin = 100;
    std::uint64_t seed = 1;
    // Full residual recomputation period, in sweeps.
    std::uint64_t refresh_every = 1'000;
    // Draw (intercept, gamma, [lambda], rho_cur, rho_prev) jointly from their
    // multivariate Normal conditional instead of one at a time.
    bool block_fixed_effects = false;

    std::uint64_t stored_draws() const { return iterations / thin; }
    void validate() const;
};

struct ModelConfig {
    Response response = Response::log_time;
    bool include_windspeed = false;
    PriorConfig priors{};
    McmcSchedule mcmc{};
    std::optional<double> distance_center{};
    std::optional<double> windspeed_center{};

    void validate() const;
};

nlohmann::json to_json(const ModelConfig& cfg);

// Reads a (possibly partial) config document on top of `base`. Unknown keys
// are rejected so typos do not silently fall back to defaults.
ModelConfig config_from_json(const nlohmann::json& doc, ModelConfig base = {});

} // namespace xcmix
