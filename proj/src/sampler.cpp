#include "xcmix/sampler.hpp"

#include "xcmix/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <future>
#include <numeric>

namespace xcmix {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

double draw(const NormalConditional& c, Rng& rng) { return c.mean + std::sqrt(c.variance) * rng.normal(); }

double finite_or_throw(double v, const char* what) {
    if (!std::isfinite(v)) throw SamplerError(std::string("non-finite draw for ") + what);
    return v;
}

} // namespace

NormalConditional scalar_normal_conditional(double prior_mean, double prior_var, double sum_xx, double sum_xr,
                                            double tau_obs) {
    require_positive(prior_var, "prior variance");
    require_positive(tau_obs, "tau_obs");
    const double precision = tau_obs * sum_xx + 1.0 / prior_var;
    return {(tau_obs * sum_xr + prior_mean / prior_var) / precision, 1.0 / precision};
}

double gibbs_scalar_normal(double prior_mean, double prior_var, std::span<const double> xs,
                           std::span<const double> residuals, double tau_obs, Rng& rng) {
    if (xs.size() != residuals.size()) throw std::invalid_argument("gibbs_scalar_normal: length mismatch");
    auto c = scalar_normal_conditional(prior_mean, prior_var, kernels::sum_squares(xs), kernels::dot(xs, residuals),
                                       tau_obs);
    return draw(c, rng);
}

void gibbs_random_effect(std::span<const double> sums, std::span<const std::size_t> counts, double tau_obs,
                         double tau_group, Rng& rng, std::span<double> out) {
    require_positive(tau_obs, "tau_obs");
    require_positive(tau_group, "random-effect precision");
    if (sums.size() != counts.size() || out.size() != sums.size())
        throw std::invalid_argument("gibbs_random_effect: length mismatch");
    if (out.empty()) return;
    out[0] = 0.0;
    for (std::size_t l = 1; l < out.size(); ++l) {
        const double precision = tau_obs * static_cast<double>(counts[l]) + tau_group;
        out[l] = tau_obs * sums[l] / precision + rng.normal() / std::sqrt(precision);
    }
}

std::vector<double> gibbs_random_effect(std::span<const double> sums, std::span<const std::size_t> counts,
                                        double tau_obs, double tau_group, Rng& rng) {
    std::vector<double> out(sums.size());
    gibbs_random_effect(sums, counts, tau_obs, tau_group, rng, out);
    return out;
}

double gibbs_precision(double shape, double rate, double sum_squares, std::size_t n_free, Rng& rng) {
    require_positive(shape, "gamma shape");
    require_positive(rate, "gamma rate");
    if (!(sum_squares >= 0.0)) throw DomainError("sum of squares must be nonnegative");
    double v = rng.gamma(shape + 0.5 * static_cast<double>(n_free), rate + 0.5 * sum_squares);
    // A Gamma draw with tiny shape can underflow to exactly 0.
    return std::max(v, std::numeric_limits<double>::min());
}

NormalConditional hypermean_conditional(double rho_cur, double rho_prev, double phi, double v_rho_cur,
                                        double v_rho_prev, double v_m) {
    require_positive(v_rho_cur, "current-rainfall variance");
    require_positive(v_rho_prev, "previous-rainfall variance");
    require_positive(v_m, "hyper-mean variance");
    const double precision = 1.0 / v_m + 1.0 / v_rho_cur + phi * phi / v_rho_prev;
    return {(rho_cur / v_rho_cur + phi * rho_prev / v_rho_prev) / precision, 1.0 / precision};
}

double gibbs_hypermean(double rho_cur, double rho_prev, double phi, double v_rho_cur, double v_rho_prev, double v_m,
                       Rng& rng) {
    return draw(hypermean_conditional(rho_cur, rho_prev, phi, v_rho_cur, v_rho_prev, v_m), rng);
}

double phi_log_target(double phi, double rho_prev, double m_rho, double v_rho_prev, double a_phi, double b_phi) {
    if (!(phi > 0.0)) return -std::numeric_limits<double>::infinity();
    const double z = rho_prev - phi * m_rho;
    return (a_phi - 1.0) * std::log(phi) - b_phi * phi - z * z / (2.0 * v_rho_prev);
}

double slice_update_phi(double phi_current, double rho_prev, double m_rho, double v_rho_prev, double a_phi,
                        double b_phi, Rng& rng, const SliceOptions& opt) {
    require_positive(phi_current, "phi");
    require_positive(v_rho_prev, "previous-rainfall variance");
    require_positive(a_phi, "phi prior shape");
    require_positive(b_phi, "phi prior rate");
    auto target = [&](double phi) { return phi_log_target(phi, rho_prev, m_rho, v_rho_prev, a_phi, b_phi); };
    return slice_sample(phi_current, target, rng, opt, "phi");
}

std::string_view to_string(Step s) {
    switch (s) {
    case Step::fixed_block: return "fixed_effects";
    case Step::intercept: return "intercept";
    case Step::distance: return "gamma_dist";
    case Step::windspeed: return "lambda_wind";
    case Step::rain_current: return "rho_cur";
    case Step::rain_previous: return "rho_prev";
    case Step::athlete_block: return "athlete";
    case Step::course_block: return "course";
    case Step::season_block: return "season";
    case Step::hypermean: return "m_rho";
    case Step::phi: return "phi";
    case Step::tau_athlete: return "tau_athlete";
    case Step::tau_course: return "tau_course";
    case Step::tau_season: return "tau_season";
    case Step::tau_obs: return "tau_obs";
    }
    return "?";
}

SweepPlan SweepPlan::from_config(const ModelConfig& cfg) {
    SweepPlan p;
    if (cfg.mcmc.block_fixed_effects) {
        p.steps = {Step::fixed_block};
    } else {
        p.steps = {Step::intercept, Step::distance};
        if (cfg.include_windspeed) p.steps.push_back(Step::windspeed);
        p.steps.push_back(Step::rain_current);
        p.steps.push_back(Step::rain_previous);
    }
    for (Step s : {Step::athlete_block, Step::course_block,
                   Step::season_block, Step::hypermean, Step::phi, Step::tau_athlete, Step::tau_course,
                   Step::tau_season, Step::tau_obs})
        p.steps.push_back(s);
    return p;
}

ParameterState GibbsSampler::initial_state(const Design& d, const ModelConfig& cfg) {
    auto s = ParameterState::zeros(d.athletes.size(), d.courses.size(), d.seasons.size(), cfg.include_windspeed);
    s.intercept = d.size() ? kernels::sum(d.response_y) / static_cast<double>(d.size()) : 0.0;
    s.phi = cfg.priors.phi.shape / cfg.priors.phi.rate;
    return s;
}

namespace {

std::vector<std::size_t> level_counts(const std::vector<std::uint32_t>& level, std::size_t n_levels) {
    std::vector<std::size_t> counts(n_levels, 0);
    for (auto l : level) ++counts[l];
    return counts;
}

} // namespace

GibbsSampler::GibbsSampler(const Design& design, const ModelConfig& cfg, std::uint64_t seed)
    : design_(design), cfg_(cfg), plan_(SweepPlan::from_config(cfg)), rng_(seed),
      state_(initial_state(design, cfg)), resid_(design.size()) {
    cfg_.validate();
    athlete_counts_ = level_counts(design.athlete, design.athletes.size());
    course_counts_ = level_counts(design.course, design.courses.size());
    season_counts_ = level_counts(design.season, design.seasons.size());
    ss_dist_ = kernels::sum_squares(design.distance_c);
    ss_wind_ = kernels::sum_squares(design.windspeed_c);
    ss_rain_cur_ = kernels::sum_squares(design.rain_current);
    ss_rain_prev_ = kernels::sum_squares(design.rain_previous);

    fixed_columns_ = {std::span<const double>{}, design.distance_c};
    if (cfg_.include_windspeed) fixed_columns_.push_back(design.windspeed_c);
    fixed_columns_.push_back(design.rain_current);
    fixed_columns_.push_back(design.rain_previous);
    const std::size_t k = fixed_columns_.size();
    fixed_gram_.assign(k * k, 0.0);
    const double n = static_cast<double>(design.size());
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            const auto& xa = fixed_columns_[a];
            const auto& xb = fixed_columns_[b];
            double g = a == 0 ? (b == 0 ? n : kernels::sum(xb)) : kernels::dot(xa, xb);
            fixed_gram_[a * k + b] = fixed_gram_[b * k + a] = g;
        }
    refresh_residuals();
}

void GibbsSampler::set_state(ParameterState s) {
    if (s.athlete.size() != design_.athletes.size() || s.course.size() != design_.courses.size() ||
        s.season.size() != design_.seasons.size() || s.lambda_wind.has_value() != cfg_.include_windspeed)
        throw std::invalid_argument("GibbsSampler::set_state: state does not match the design");
    s.check_invariants();
    state_ = std::move(s);
    refresh_residuals();
}

void GibbsSampler::refresh_residuals() {
    for (std::size_t i = 0; i < design_.size(); ++i)
        resid_[i] = design_.response_y[i] - linear_predictor(state_, i, design_);
}

void GibbsSampler::update_linear(double& coef, std::span<const double> x, double sum_xx, double prior_mean,
                                 double prior_var) {
    const double old = coef;
    const double sum_xr = kernels::dot(x, resid_) + old * sum_xx;
    const double next = draw(scalar_normal_conditional(prior_mean, prior_var, sum_xx, sum_xr, state_.tau_obs), rng_);
    coef = finite_or_throw(next, "a linear coefficient");
    kernels::axpy(old - coef, x, resid_);
}

void GibbsSampler::update_fixed_block() {
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;
    using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
    const auto& p = cfg_.priors;
    auto& st = state_;
    const std::size_t k = fixed_columns_.size();

    std::vector<double*> coef = {&st.intercept, &st.gamma_dist};
    std::vector<NormalPrior> prior = {p.intercept, p.distance};
    if (cfg_.include_windspeed) {
        coef.push_back(&*st.lambda_wind);
        prior.push_back(p.windspeed);
    }
    coef.push_back(&st.rho_cur);
    prior.push_back({st.m_rho, p.rain_current_variance});
    coef.push_back(&st.rho_prev);
    prior.push_back({st.phi * st.m_rho, p.rain_previous_variance});

    Vec old(k), rhs(k);
    Mat precision(k, k);
    for (std::size_t a = 0; a < k; ++a) old[a] = *coef[a];
    for (std::size_t a = 0; a < k; ++a) {
        // X'(e + X theta_old) without forming the partial residuals
        double xr = a == 0 ? kernels::sum(resid_) : kernels::dot(fixed_columns_[a], resid_);
        for (std::size_t b = 0; b < k; ++b) {
            xr += fixed_gram_[a * k + b] * old[b];
            precision(a, b) = st.tau_obs * fixed_gram_[a * k + b];
        }
        precision(a, a) += 1.0 / prior[a].variance;
        rhs[a] = st.tau_obs * xr + prior[a].mean / prior[a].variance;
    }
    Eigen::LLT<Mat> llt(precision);
    if (llt.info() != Eigen::Success) throw SamplerError("fixed-effect conditional precision is not positive definite");
    Vec mean = llt.solve(rhs);
    Vec z(k);
    for (std::size_t a = 0; a < k; ++a) z[a] = rng_.normal();
    // precision = L L', so L'^{-1} z has covariance precision^{-1}
    Vec next = mean + llt.matrixU().solve(z);

    for (std::size_t a = 0; a < k; ++a) {
        *coef[a] = finite_or_throw(next[a], "a fixed effect");
        const double shift = old[a] - *coef[a];
        if (a == 0) {
            kernels::add_scalar(shift, resid_);
        } else {
            kernels::axpy(shift, fixed_columns_[a], resid_);
        }
    }
}

void GibbsSampler::update_block(std::vector<double>& effects, const std::vector<std::uint32_t>& level,
                                const std::vector<std::size_t>& counts, double tau_group) {
    const std::size_t n_levels = effects.size();
    scratch_sums_.assign(n_levels, 0.0);
    for (std::size_t i = 0; i < level.size(); ++i) scratch_sums_[level[i]] += resid_[i];
    for (std::size_t l = 0; l < n_levels; ++l) scratch_sums_[l] += static_cast<double>(counts[l]) * effects[l];
    scratch_new_.resize(n_levels);
    gibbs_random_effect(scratch_sums_, counts, state_.tau_obs, tau_group, rng_, scratch_new_);
    for (std::size_t l = 0; l < n_levels; ++l) {
        finite_or_throw(scratch_new_[l], "a random effect");
        scratch_sums_[l] = scratch_new_[l] - effects[l]; // reuse as the per-level shift
    }
    for (std::size_t i = 0; i < level.size(); ++i) resid_[i] -= scratch_sums_[level[i]];
    effects.swap(scratch_new_);
}

void GibbsSampler::step(Step s) {
    const auto& p = cfg_.priors;
    const auto& d = design_;
    auto& st = state_;
    switch (s) {
    case Step::fixed_block: update_fixed_block(); break;
    case Step::intercept: {
        const double old = st.intercept;
        const double n = static_cast<double>(d.size());
        const double sum_r = kernels::sum(resid_) + old * n;
        st.intercept = finite_or_throw(
            draw(scalar_normal_conditional(p.intercept.mean, p.intercept.variance, n, sum_r, st.tau_obs), rng_),
            "intercept");
        kernels::add_scalar(old - st.intercept, resid_);
        break;
    }
    case Step::distance:
        update_linear(st.gamma_dist, d.distance_c, ss_dist_, p.distance.mean, p.distance.variance);
        break;
    case Step::windspeed:
        update_linear(*st.lambda_wind, d.windspeed_c, ss_wind_, p.windspeed.mean, p.windspeed.variance);
        break;
    case Step::rain_current:
        update_linear(st.rho_cur, d.rain_current, ss_rain_cur_, st.m_rho, p.rain_current_variance);
        break;
    case Step::rain_previous:
        update_linear(st.rho_prev, d.rain_previous, ss_rain_prev_, st.phi * st.m_rho, p.rain_previous_variance);
        break;
    case Step::athlete_block: update_block(st.athlete, d.athlete, athlete_counts_, st.tau_athlete); break;
    case Step::course_block: update_block(st.course, d.course, course_counts_, st.tau_course); break;
    case Step::season_block: update_block(st.season, d.season, season_counts_, st.tau_season); break;
    case Step::hypermean:
        st.m_rho = finite_or_throw(gibbs_hypermean(st.rho_cur, st.rho_prev, st.phi, p.rain_current_variance,
                                                   p.rain_previous_variance, p.hypermean_variance, rng_),
                                   "m_rho");
        break;
    case Step::phi:
        st.phi = slice_update_phi(st.phi, st.rho_prev, st.m_rho, p.rain_previous_variance, p.phi.shape, p.phi.rate,
                                  rng_);
        break;
    case Step::tau_athlete: {
        double ss = st.athlete.size() > 1 ? kernels::sum_squares(std::span(st.athlete).subspan(1)) : 0.0;
        st.tau_athlete = gibbs_precision(p.tau_athlete.shape, p.tau_athlete.rate, ss,
                                         st.athlete.empty() ? 0 : st.athlete.size() - 1, rng_);
        break;
    }
    case Step::tau_course: {
        double ss = st.course.size() > 1 ? kernels::sum_squares(std::span(st.course).subspan(1)) : 0.0;
        st.tau_course = gibbs_precision(p.tau_course.shape, p.tau_course.rate, ss,
                                        st.course.empty() ? 0 : st.course.size() - 1, rng_);
        break;
    }
    case Step::tau_season: {
        double ss = st.season.size() > 1 ? kernels::sum_squares(std::span(st.season).subspan(1)) : 0.0;
        st.tau_season = gibbs_precision(p.tau_season.shape, p.tau_season.rate, ss,
                                        st.season.empty() ? 0 : st.season.size() - 1, rng_);
        break;
    }
    case Step::tau_obs:
        st.tau_obs = gibbs_precision(p.tau_obs.shape, p.tau_obs.rate, kernels::sum_squares(resid_), d.size(), rng_);
        break;
    }
}

void GibbsSampler::sweep() {
    for (Step s : plan_.steps) step(s);
    if (++sweeps_ % cfg_.mcmc.refresh_every == 0) refresh_residuals();
}

std::vector<double> ChainOutput::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = draws[r * cols() + c];
    return out;
}

std::size_t ChainOutput::column_index(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError("no parameter named '" + std::string(name) + "' in chain");
    return static_cast<std::size_t>(it - names.begin());
}

ChainOutput run_chain(const Design& design, const ModelConfig& cfg, std::uint64_t seed, std::uint64_t chain_index) {
    cfg.validate();
    if (design.size() == 0) throw InputError("cannot fit an empty dataset");

    ChainOutput out;
    out.layout = layout_for(design, cfg.include_windspeed);
    out.names = out.layout.names(design.athletes, design.courses, design.seasons);
    out.meta.seed = seed;
    out.meta.chain_index = chain_index;
    out.meta.config = cfg;
    out.meta.distance_center = design.distance_center;
    out.meta.windspeed_center = design.windspeed_center;
    out.meta.athletes = design.athletes.names();
    out.meta.courses = design.courses.names();
    out.meta.seasons = design.seasons.names();
    out.meta.kernel_backend = std::string(kernels::to_string(kernels::active_backend()));

    const auto& sched = cfg.mcmc;
    const std::size_t width = out.layout.size();
    out.draws.resize(sched.stored_draws() * width);

    GibbsSampler sampler(design, cfg, sub_seed(seed, chain_index));
    const std::uint64_t total = sched.burn_in + sched.iterations;
    std::size_t stored = 0;
    for (std::uint64_t it = 1; it <= total; ++it) {
        try {
            sampler.sweep();
        } catch (const std::exception& e) {
            throw SamplerError("sweep " + std::to_string(it) + ": " + e.what());
        }
        if (it > sched.burn_in && (it - sched.burn_in) % sched.thin == 0) {
            const auto& s = sampler.state();
            try {
                s.check_invariants();
            } catch (const DomainError& e) {
                throw SamplerError("sweep " + std::to_string(it) + ": " + e.what());
            }
            out.layout.flatten(s, std::span(out.draws).subspan(stored * width, width));
            ++stored;
        }
    }
    return out;
}

std::vector<ChainOutput> run_chains(const Design& design, const ModelConfig& cfg, std::uint64_t seed, std::size_t k) {
    std::vector<std::future<ChainOutput>> futures;
    futures.reserve(k);
    for (std::size_t c = 0; c < k; ++c)
        futures.push_back(std::async(std::launch::async, [&, c] { return run_chain(design, cfg, seed, c); }));
    std::vector<ChainOutput> out;
    out.reserve(k);
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

} // namespace xcmix
