#pragma once

#include "xcmix/config.hpp"
#include "xcmix/error.hpp"
#include "xcmix/ingest.hpp"
#include "xcmix/model.hpp"
#include "xcmix/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace xcmix {

// ---------------------------------------------------------------------------
// Single-parameter conditional updates
// ---------------------------------------------------------------------------

struct NormalConditional {
    double mean = 0.0;
    double variance = 0.0;
};

// Normal prior N(prior_mean, prior_var) times a Gaussian likelihood in which
// the parameter enters as theta * x_i with precision tau_obs, summarised by
// sum_xx = sum x_i^2 and sum_xr = sum x_i r_i.
NormalConditional scalar_normal_conditional(double prior_mean, double prior_var, double sum_xx, double sum_xr,
                                            double tau_obs);

// `residuals` exclude this parameter's own contribution.
double gibbs_scalar_normal(double prior_mean, double prior_var, std::span<const double> xs,
                           std::span<const double> residuals, double tau_obs, Rng& rng);

// Draws every level of a corner-constrained random effect. level_residual_sums
// holds S_l, the sum of partial residuals over level l's observations; entry 0
// of the result is always 0.
std::vector<double> gibbs_random_effect(std::span<const double> level_residual_sums,
                                        std::span<const std::size_t> level_counts, double tau_obs,
                                        double tau_group, Rng& rng);
void gibbs_random_effect(std::span<const double> level_residual_sums, std::span<const std::size_t> level_counts,
                         double tau_obs, double tau_group, Rng& rng, std::span<double> out);

// Gamma(shape + n_free / 2, rate + sum_squares / 2).
double gibbs_precision(double shape, double rate, double sum_squares, std::size_t n_free, Rng& rng);

NormalConditional hypermean_conditional(double rho_cur, double rho_prev, double phi, double v_rho_cur,
                                        double v_rho_prev, double v_m);
double gibbs_hypermean(double rho_cur, double rho_prev, double phi, double v_rho_cur, double v_rho_prev,
                       double v_m, Rng& rng);

// Unnormalised log conditional density of phi; -inf for phi <= 0.
double phi_log_target(double phi, double rho_prev, double m_rho, double v_rho_prev, double a_phi, double b_phi);

struct SliceOptions {
    double width = 0.5;
    int max_step_out = 50;
    int max_shrink = 1000;
};

// One univariate slice-sampling update (stepping out, then shrinkage).
// Each side steps out at most max_step_out times; if the slice is still not
// bracketed a SamplerError describing the state is thrown, so every returned
// draw follows the unbounded stepping-out procedure.
template <class LogDensity>
double slice_sample(double x0, LogDensity&& log_f, Rng& rng, const SliceOptions& opt = {},
                    const char* label = "x") {
    const double f0 = log_f(x0);
    if (!std::isfinite(f0)) {
        std::ostringstream msg;
        msg << "slice sampler started outside the support: " << label << "=" << x0;
        throw DomainError(msg.str());
    }
    const double log_y = f0 + std::log(rng.uniform());
    double left = x0 - opt.width * rng.uniform();
    double right = left + opt.width;
    auto fail = [&](const char* what) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "slice sampler: " << what << " (" << label << "=" << x0 << ", log f=" << f0 << ", log y=" << log_y
            << ", interval=[" << left << ", " << right << "], width=" << opt.width << ")";
        return SamplerError(msg.str());
    };
    int steps = 0;
    while (log_f(left) > log_y) {
        if (++steps > opt.max_step_out) throw fail("failed to bracket the slice on the left");
        left -= opt.width;
    }
    steps = 0;
    while (log_f(right) > log_y) {
        if (++steps > opt.max_step_out) throw fail("failed to bracket the slice on the right");
        right += opt.width;
    }
    for (int k = 0; k < opt.max_shrink; ++k) {
        double x1 = left + rng.uniform() * (right - left);
        if (log_f(x1) > log_y) return x1;
        if (x1 < x0) {
            left = x1;
        } else {
            right = x1;
        }
    }
    throw fail("shrinkage did not terminate");
}

double slice_update_phi(double phi_current, double rho_prev, double m_rho, double v_rho_prev, double a_phi,
                        double b_phi, Rng& rng, const SliceOptions& opt = {});

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

enum class Step {
    fixed_block, // intercept and all fixed effects jointly
    intercept,
    distance,
    windspeed,
    rain_current,
    rain_previous,
    athlete_block,
    course_block,
    season_block,
    hypermean,
    phi,
    tau_athlete,
    tau_course,
    tau_season,
    tau_obs,
};

std::string_view to_string(Step s);

struct SweepPlan {
    std::vector<Step> steps;

    static SweepPlan from_config(const ModelConfig& cfg);
};

// Gibbs/slice sampler over one design. Keeps the residual vector
// e = y - mu in sync with the state as parameters are updated.
class GibbsSampler {
public:
    GibbsSampler(const Design& design, const ModelConfig& cfg, std::uint64_t seed);

    // Deterministic start: intercept = mean response, effects 0, precisions 1,
    // phi = a_phi / b_phi, m_rho = 0.
    static ParameterState initial_state(const Design& design, const ModelConfig& cfg);

    const ParameterState& state() const { return state_; }
    void set_state(ParameterState s);

    const SweepPlan& plan() const { return plan_; }
    std::span<const double> residuals() const { return resid_; }

    void step(Step s);
    void sweep();
    void refresh_residuals();

    Rng& rng() { return rng_; }

private:
    void update_linear(double& coef, std::span<const double> x, double sum_xx, double prior_mean, double prior_var);
    void update_fixed_block();
    void update_block(std::vector<double>& effects, const std::vector<std::uint32_t>& level,
                      const std::vector<std::size_t>& counts, double tau_group);

    const Design& design_;
    ModelConfig cfg_;
    SweepPlan plan_;
    Rng rng_;
    ParameterState state_;
    std::vector<double> resid_;
    std::vector<double> scratch_sums_;
    std::vector<double> scratch_new_;
    std::vector<std::size_t> athlete_counts_, course_counts_, season_counts_;
    double ss_dist_ = 0.0, ss_wind_ = 0.0, ss_rain_cur_ = 0.0, ss_rain_prev_ = 0.0;
    std::vector<std::span<const double>> fixed_columns_; // null span stands for the intercept column
    std::vector<double> fixed_gram_;                      // X'X, row-major
    std::uint64_t sweeps_ = 0;
};

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

struct ChainMetadata {
    std::uint64_t seed = 0;        // root seed as given by the user
    std::uint64_t chain_index = 0; // stream index under the root seed
    ModelConfig config{};          // full config, including the schedule
    double distance_center = 0.0;
    double windspeed_center = 0.0;
    std::vector<std::string> athletes, courses, seasons;
    std::string kernel_backend;
};

struct ChainOutput {
    ParameterLayout layout;
    std::vector<std::string> names;
    std::vector<double> draws; // row-major, rows() x layout.size()
    ChainMetadata meta;

    std::size_t rows() const { return layout.size() ? draws.size() / layout.size() : 0; }
    std::size_t cols() const { return layout.size(); }
    std::span<const double> row(std::size_t r) const { return {draws.data() + r * cols(), cols()}; }
    std::vector<double> column(std::size_t c) const;
    std::size_t column_index(std::string_view name) const; // throws InputError
    ParameterState state(std::size_t r) const { return layout.unflatten(row(r)); }
};

// Runs burn_in + iterations sweeps and stores every thin-th post-burn-in
// state. The chain's generator is seeded with sub_seed(seed, chain_index).
ChainOutput run_chain(const Design& design, const ModelConfig& cfg, std::uint64_t seed,
                      std::uint64_t chain_index = 0);

// k independent chains on separate threads; chain c uses stream c.
std::vector<ChainOutput> run_chains(const Design& design, const ModelConfig& cfg, std::uint64_t seed,
                                    std::size_t k);

} // namespace xcmix
