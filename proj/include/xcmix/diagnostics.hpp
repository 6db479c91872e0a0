#pragma once

#include "xcmix/sampler.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xcmix {

struct Autocorrelation {
    std::vector<double> rho; // lags 0..max_lag, rho[0] == 1
    bool degenerate = false; // constant chain
};

// Mean-subtracted, biased (divide by N) sample autocorrelations.
// Requires chain.size() > max_lag >= 1.
Autocorrelation autocorrelation(std::span<const double> chain, std::size_t max_lag);

struct EssResult {
    double ess = 0.0;
    bool degenerate = false; // constant chain; ess reported as N
};

// N / (1 + 2 sum rho_k), truncated by Geyer's initial positive sequence and
// clamped to (0, N]. Requires at least 10 draws.
EssResult effective_sample_size(std::span<const double> chain);

// Type-7 quantile (linear interpolation between order statistics) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);
double quantile(std::vector<double> values, double p);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double lower_quartile = 0.0;
    double median = 0.0;
    double upper_quartile = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double ess = 0.0;
    bool ess_degenerate = false;
};

std::vector<ParameterSummary> summarize(const ChainOutput& chain);
// Pools draws across chains; ESS is the sum of per-chain ESS.
std::vector<ParameterSummary> summarize(std::span<const ChainOutput> chains);

// Split potential scale reduction factor across equal-length chains. Returns
// NaN when a column is constant in every chain.
double split_rhat(std::span<const std::vector<double>> chains);

void write_summary_csv(const std::filesystem::path& path, const std::vector<ParameterSummary>& rows);
std::vector<ParameterSummary> read_summary_csv(const std::filesystem::path& path);

// Tidy trace: iteration,parameter,value. Iteration counts sweeps after burn-in.
// An empty filter exports every parameter.
void write_trace_csv(const std::filesystem::path& path, std::span<const ChainOutput> chains,
                     const std::vector<std::string>& parameters = {});

} // namespace xcmix
