#include "xcmix/diagnostics.hpp"

#include "xcmix/csv.hpp"
#include "xcmix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace xcmix {

namespace {

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

std::vector<double> centered(std::span<const double> x) {
    const double mean = kernels::sum(x) / static_cast<double>(x.size());
    std::vector<double> c(x.begin(), x.end());
    kernels::add_scalar(-mean, c);
    return c;
}

// Biased autocovariance at lag k of an already centered series.
double autocov(const std::vector<double>& c, std::size_t k) {
    const std::size_t n = c.size();
    return kernels::dot(std::span(c).first(n - k), std::span(c).subspan(k)) / static_cast<double>(n);
}

} // namespace

Autocorrelation autocorrelation(std::span<const double> chain, std::size_t max_lag) {
    if (max_lag < 1 || chain.size() <= max_lag)
        throw std::invalid_argument("autocorrelation: need chain length > max_lag >= 1");
    Autocorrelation out;
    out.rho.assign(max_lag + 1, 0.0);
    out.rho[0] = 1.0;
    if (is_constant(chain)) {
        out.degenerate = true;
        return out;
    }
    auto c = centered(chain);
    const double c0 = autocov(c, 0);
    for (std::size_t k = 1; k <= max_lag; ++k) out.rho[k] = autocov(c, k) / c0;
    return out;
}

EssResult effective_sample_size(std::span<const double> chain) {
    const std::size_t n = chain.size();
    if (n < 10) throw std::invalid_argument("effective_sample_size: need at least 10 draws");
    const double nd = static_cast<double>(n);
    if (is_constant(chain)) return {nd, true};

    auto c = centered(chain);
    const double c0 = autocov(c, 0);
    auto rho = [&](std::size_t k) { return autocov(c, k) / c0; };

    // Geyer: sums of adjacent pairs Gamma_m = rho_2m + rho_2m+1 are positive
    // for a reversible chain; stop at the first nonpositive one.
    double pair_sum = 1.0 + rho(1);
    for (std::size_t m = 1; 2 * m + 1 < n; ++m) {
        const double gamma_m = rho(2 * m) + rho(2 * m + 1);
        if (!(gamma_m > 0.0)) break;
        pair_sum += gamma_m;
    }
    const double tau = 2.0 * pair_sum - 1.0;
    double ess = tau > 0.0 ? nd / tau : nd;
    ess = std::clamp(ess, std::numeric_limits<double>::min(), nd);
    return {ess, false};
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

namespace {

ParameterSummary summarize_column(const std::string& name, std::vector<double> pooled, double ess, bool degenerate,
                                  bool constrained) {
    ParameterSummary s;
    s.name = name;
    s.ess = ess;
    s.ess_degenerate = degenerate;
    if (constrained) return s; // exact zeros
    s.mean = kernels::sum(pooled) / static_cast<double>(pooled.size());
    std::sort(pooled.begin(), pooled.end());
    s.lower_quartile = quantile_sorted(pooled, 0.25);
    s.median = quantile_sorted(pooled, 0.5);
    s.upper_quartile = quantile_sorted(pooled, 0.75);
    s.ci95_low = quantile_sorted(pooled, 0.025);
    s.ci95_high = quantile_sorted(pooled, 0.975);
    return s;
}

} // namespace

std::vector<ParameterSummary> summarize(std::span<const ChainOutput> chains) {
    if (chains.empty()) throw std::invalid_argument("summarize: no chains");
    const auto& first = chains.front();
    for (const auto& c : chains) {
        if (c.rows() < 2) throw std::invalid_argument("summarize: need at least 2 stored draws");
        if (c.names != first.names) throw std::invalid_argument("summarize: chains have different parameters");
    }
    const auto constrained = first.layout.constrained();
    std::vector<ParameterSummary> out;
    out.reserve(first.cols());
    for (std::size_t j = 0; j < first.cols(); ++j) {
        std::vector<double> pooled;
        double ess = 0.0;
        bool degenerate = true;
        for (const auto& c : chains) {
            auto col = c.column(j);
            if (col.size() >= 10) {
                auto e = effective_sample_size(col);
                ess += e.ess;
                degenerate = degenerate && e.degenerate;
            } else {
                ess += static_cast<double>(col.size());
                degenerate = degenerate && is_constant(col);
            }
            pooled.insert(pooled.end(), col.begin(), col.end());
        }
        out.push_back(summarize_column(first.names[j], std::move(pooled), ess, degenerate, constrained[j]));
    }
    return out;
}

std::vector<ParameterSummary> summarize(const ChainOutput& chain) { return summarize(std::span(&chain, 1)); }

double split_rhat(std::span<const std::vector<double>> chains) {
    std::vector<std::span<const double>> halves;
    for (const auto& c : chains) {
        const std::size_t half = c.size() / 2;
        if (half < 2) throw std::invalid_argument("split_rhat: chains too short");
        halves.emplace_back(c.data(), half);
        halves.emplace_back(c.data() + c.size() - half, half);
    }
    const std::size_t n = halves.front().size();
    for (const auto& h : halves)
        if (h.size() != n) throw std::invalid_argument("split_rhat: chains must have equal length");
    const double m = static_cast<double>(halves.size());
    const double nd = static_cast<double>(n);
    std::vector<double> means, vars;
    for (const auto& h : halves) {
        const double mean = kernels::sum(h) / nd;
        double ss = 0.0;
        for (double v : h) ss += (v - mean) * (v - mean);
        means.push_back(mean);
        vars.push_back(ss / (nd - 1.0));
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= nd / (m - 1.0);
    const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    if (w == 0.0) return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
    const double var_plus = (nd - 1.0) / nd * w + b / nd;
    return std::sqrt(var_plus / w);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<ParameterSummary>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << "parameter,mean,lq,median,uq,ci95_low,ci95_high,ess\n";
    for (const auto& r : rows) {
        out << csv::quote(r.name);
        for (double v : {r.mean, r.lower_quartile, r.median, r.upper_quartile, r.ci95_low, r.ci95_high, r.ess})
            out << ',' << csv::format_double(v);
        out << '\n';
    }
}

std::vector<ParameterSummary> read_summary_csv(const std::filesystem::path& path) {
    auto table = csv::read(path);
    csv::require_header(table, {"parameter", "mean", "lq", "median", "uq", "ci95_low", "ci95_high", "ess"}, path);
    std::vector<ParameterSummary> out;
    for (const auto& row : table.rows) {
        ParameterSummary s;
        s.name = row.fields[0];
        double* dst[] = {&s.mean, &s.lower_quartile, &s.median, &s.upper_quartile, &s.ci95_low, &s.ci95_high, &s.ess};
        for (std::size_t k = 0; k < 7; ++k) *dst[k] = csv::parse_double(row.fields[k + 1], "value", path, row.line);
        out.push_back(std::move(s));
    }
    return out;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const ChainOutput> chains,
                     const std::vector<std::string>& parameters) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    const bool multi = chains.size() > 1;
    out << (multi ? "chain,iteration,parameter,value\n" : "iteration,parameter,value\n");
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto& ch = chains[c];
        std::vector<std::size_t> cols;
        if (parameters.empty()) {
            cols.resize(ch.cols());
            std::iota(cols.begin(), cols.end(), 0);
        } else {
            for (const auto& p : parameters) cols.push_back(ch.column_index(p));
        }
        const auto thin = ch.meta.config.mcmc.thin;
        for (std::size_t r = 0; r < ch.rows(); ++r) {
            const auto row = ch.row(r);
            for (auto j : cols) {
                if (multi) out << c + 1 << ',';
                out << (r + 1) * thin << ',' << csv::quote(ch.names[j]) << ',' << csv::format_double(row[j]) << '\n';
            }
        }
    }
}

} // namespace xcmix
