#include "xcmix/cli.hpp"

#include "xcmix/chain_io.hpp"
#include "xcmix/csv.hpp"
#include "xcmix/diagnostics.hpp"
#include "xcmix/error.hpp"
#include "xcmix/ingest.hpp"
#include "xcmix/kernels.hpp"
#include "xcmix/predictive.hpp"
#include "xcmix/sampler.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace xcmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("'" + path.string() + "': " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

// UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible manifests.
std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json input_entry(const fs::path& p) {
    return {{"path", fs::absolute(p).lexically_normal().string()}, {"sha256", sha256_file(p.string())}};
}

// One manifest per output directory; later commands add a step entry.
void update_manifest(const fs::path& dir, const std::string& command, json step) {
    const auto path = dir / "manifest.json";
    json doc = fs::exists(path) ? read_json(path) : json::object();
    doc["engine_version"] = kEngineVersion;
    step["written_at"] = timestamp();
    if (command == "fit" || command == "simulate") {
        doc["command"] = command;
        doc["created_at"] = step["written_at"];
    }
    doc["steps"][command] = std::move(step);
    write_json(path, doc);
}

fs::path default_out(const std::string& stem, std::uint64_t seed) {
    fs::path root = ".";
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) root = env;
    return root / (stem + "-seed" + std::to_string(seed));
}

std::string chain_file(std::size_t c, const char* ext) {
    return c == 0 ? std::string("chain.") + ext : "chain_" + std::to_string(c + 1) + "." + ext;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string data, covariates, rainfall, sex, response, config, out;
    bool windspeed = false, no_windspeed = false, block_fixed = false;
    std::uint64_t seed = 0, burn_in = 0, iterations = 0, thin = 0, refresh = 0;
    double dbar = 0.0, wbar = 0.0;
    std::size_t chains = 1;
};

struct LoadedFit {
    fs::path dir;
    json manifest;
    ModelConfig config;
    Sex sex = Sex::male;
    std::vector<RaceObservation> observations;
    Design design;
    std::vector<ChainOutput> chains;
};

LoadedFit load_fit(const fs::path& dir) {
    LoadedFit f;
    f.dir = dir;
    const auto manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw InputError("'" + dir.string() + "' has no manifest.json; run fit first");
    f.manifest = read_json(manifest_path);
    try {
        const auto& fit = f.manifest.at("steps").at("fit");
        f.config = config_from_json(fit.at("config"));
        f.sex = parse_sex(fit.at("sex").get<std::string>());
        for (const auto& entry : fit.at("chains")) {
            auto csv_path = dir / entry.at("csv").get<std::string>();
            auto json_path = dir / entry.at("json").get<std::string>();
            if (!fs::exists(csv_path) || !fs::exists(json_path))
                throw InputError("missing fit artifact '" + csv_path.string() + "'");
            f.chains.push_back(read_chain(csv_path, json_path));
        }
        const auto& inputs = fit.at("inputs");
        for (const char* key : {"results", "races", "rainfall"}) {
            const auto path = inputs.at(key).at("path").get<std::string>();
            if (sha256_file(path) != inputs.at(key).at("sha256").get<std::string>())
                throw InputError("input '" + path + "' changed since the fit was written");
        }
        f.observations = parse_results(inputs.at("results").at("path").get<std::string>(), f.sex);
        auto races = parse_races(inputs.at("races").at("path").get<std::string>());
        auto rain = parse_rainfall(inputs.at("rainfall").at("path").get<std::string>());
        if (f.chains.empty()) throw InputError("fit manifest lists no chains");
        ModelConfig design_cfg = f.config;
        design_cfg.distance_center = f.chains.front().meta.distance_center;
        design_cfg.windspeed_center = f.chains.front().meta.windspeed_center;
        f.design = build_design(f.observations, races, rain, design_cfg);
    } catch (const json::exception& e) {
        throw InputError("'" + manifest_path.string() + "': " + e.what());
    }
    return f;
}

void print_summary(std::ostream& out, const std::vector<ParameterSummary>& rows, bool include_athletes) {
    out << std::left << std::setw(28) << "parameter" << std::right;
    for (const char* h : {"mean", "LQ", "median", "UQ", "2.5%", "97.5%", "ESS"}) out << std::setw(11) << h;
    out << '\n';
    for (const auto& r : rows) {
        if (!include_athletes && r.name.rfind("athlete[", 0) == 0) continue;
        out << std::left << std::setw(28) << r.name << std::right << std::fixed;
        for (double v : {r.mean, r.lower_quartile, r.median, r.upper_quartile, r.ci95_low, r.ci95_high})
            out << std::setw(11) << std::setprecision(4) << v;
        out << std::setw(11) << std::setprecision(0) << r.ess << '\n';
    }
    out << std::defaultfloat;
}

int cmd_fit(const FitArgs& a, const CLI::App& app, std::ostream& out) {
    ModelConfig cfg;
    if (!a.config.empty()) cfg = config_from_json(read_json(a.config));
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--response")) cfg.response = parse_response(a.response);
    if (given("--windspeed")) cfg.include_windspeed = true;
    if (given("--no-windspeed")) cfg.include_windspeed = false;
    if (given("--seed")) cfg.mcmc.seed = a.seed;
    if (given("--burn-in")) cfg.mcmc.burn_in = a.burn_in;
    if (given("--iterations")) cfg.mcmc.iterations = a.iterations;
    if (given("--thin")) cfg.mcmc.thin = a.thin;
    if (given("--refresh-every")) cfg.mcmc.refresh_every = a.refresh;
    if (given("--block-fixed")) cfg.mcmc.block_fixed_effects = true;
    if (given("--dbar")) cfg.distance_center = a.dbar;
    if (given("--wbar")) cfg.windspeed_center = a.wbar;
    cfg.validate();
    if (a.chains < 1) throw InputError("--chains must be >= 1");

    const Sex sex = parse_sex(a.sex);
    auto obs = parse_results(a.data, sex);
    auto races = parse_races(a.covariates);
    auto rain = parse_rainfall(a.rainfall);
    if (obs.empty()) throw InputError("no " + std::string(to_string(sex)) + " results in '" + a.data + "'");
    auto design = build_design(obs, races, rain, cfg);

    const fs::path dir = a.out.empty() ? default_out("fit", cfg.mcmc.seed) : fs::path(a.out);
    fs::create_directories(dir);

    std::vector<ChainOutput> chains;
    try {
        chains = run_chains(design, cfg, cfg.mcmc.seed, a.chains);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw SamplerError(e.what());
    }

    json chain_entries = json::array();
    for (std::size_t c = 0; c < chains.size(); ++c) {
        write_chain(chains[c], dir / chain_file(c, "csv"), dir / chain_file(c, "json"));
        chain_entries.push_back({{"csv", chain_file(c, "csv")}, {"json", chain_file(c, "json")}});
    }
    auto summary = summarize(chains);
    write_summary_csv(dir / "summary.csv", summary);

    json artifacts = {"summary.csv"};
    if (chains.size() > 1) {
        std::ofstream conv(dir / "convergence.csv", std::ios::binary);
        conv << "parameter,split_rhat,ess\n";
        for (std::size_t j = 0; j < chains.front().cols(); ++j) {
            std::vector<std::vector<double>> cols;
            for (const auto& ch : chains) cols.push_back(ch.column(j));
            double rhat = chains.front().rows() >= 4 ? split_rhat(cols) : std::numeric_limits<double>::quiet_NaN();
            conv << csv::quote(chains.front().names[j]) << ',' << (std::isnan(rhat) ? "NA" : csv::format_double(rhat))
                 << ',' << csv::format_double(summary[j].ess) << '\n';
        }
        artifacts.push_back("convergence.csv");
    }

    json step = {
        {"config", to_json(cfg)},
        {"seed", cfg.mcmc.seed},
        {"sex", std::string(to_string(sex))},
        {"inputs", {{"results", input_entry(a.data)}, {"races", input_entry(a.covariates)}, {"rainfall", input_entry(a.rainfall)}}},
        {"chains", chain_entries},
        {"artifacts", artifacts},
        {"observations", design.size()},
        {"kernel_backend", std::string(kernels::to_string(kernels::active_backend()))},
    };
    update_manifest(dir, "fit", std::move(step));

    out << "fit: " << design.size() << " observations, " << design.athletes.size() << " athletes, "
        << design.courses.size() << " courses, " << design.seasons.size() << " seasons, " << chains.size()
        << " chain(s) x " << chains.front().rows() << " draws -> " << dir.string() << '\n';
    print_summary(out, summary, false);
    return kOk;
}

int cmd_summarize(const std::string& fit_dir, const std::string& out_dir, double base_time, bool athletes,
                  std::ostream& out) {
    auto f = load_fit(fit_dir);
    const fs::path dir = out_dir.empty() ? f.dir : fs::path(out_dir);
    fs::create_directories(dir);
    auto summary = summarize(f.chains);
    write_summary_csv(dir / "summary.csv", summary);

    // Effect of covariate changes on a typical finish time, at posterior means.
    std::ofstream eff(dir / "effects.csv", std::ios::binary);
    eff << "covariate,delta,base_time_min,seconds\n";
    auto mean_of = [&](const std::string& name) {
        for (const auto& s : summary)
            if (s.name == name) return s.mean;
        throw InputError("parameter '" + name + "' not in chain");
    };
    struct Row {
        const char* param;
        const char* label;
        double delta;
    };
    std::vector<Row> rows = {{"gamma_dist", "distance_miles", 0.1}, {"rho_cur", "rainfall_current_mm", 10.0},
                             {"rho_prev", "rainfall_previous_mm", 10.0}};
    if (f.config.include_windspeed) rows.push_back({"lambda_wind", "windspeed", 1.0});
    out << "effect on a " << base_time << " minute finish (posterior means):\n";
    for (const auto& r : rows) {
        double sec = effect_on_time(base_time, mean_of(r.param), r.delta);
        eff << r.label << ',' << csv::format_double(r.delta) << ',' << csv::format_double(base_time) << ','
            << csv::format_double(sec) << '\n';
        out << "  +" << r.delta << ' ' << r.label << ": " << std::fixed << std::setprecision(1) << sec << " s\n"
            << std::defaultfloat;
    }
    update_manifest(dir, "summarize", {{"fit", fs::absolute(f.dir).string()}, {"base_time_min", base_time},
                                       {"artifacts", {"summary.csv", "effects.csv"}}});
    print_summary(out, summary, athletes);
    return kOk;
}

std::vector<std::size_t> select_races(const Design& d, const std::vector<std::string>& specs) {
    std::vector<std::size_t> out;
    for (const auto& s : specs) {
        if (s == "all") {
            out.clear();
            for (std::size_t r = 0; r < d.races.size(); ++r) out.push_back(r);
            return out;
        }
        auto colon = s.rfind(':');
        if (colon == std::string::npos) throw InputError("race '" + s + "' must be Course:Season or 'all'");
        out.push_back(d.race_index(s.substr(0, colon), s.substr(colon + 1)));
    }
    return out;
}

int cmd_ppc(const std::string& fit_dir, const std::string& out_dir, const std::vector<std::string>& race_specs,
            std::optional<std::uint64_t> seed_opt, std::size_t bins, std::ostream& out) {
    auto f = load_fit(fit_dir);
    const fs::path dir = out_dir.empty() ? f.dir : fs::path(out_dir);
    fs::create_directories(dir);
    const std::uint64_t seed = seed_opt.value_or(f.chains.front().meta.seed);
    auto races = select_races(f.design, race_specs.empty() ? std::vector<std::string>{"all"} : race_specs);
    const auto& chain = f.chains.front();

    auto reports = ppc_report(chain, f.design, f.observations, seed, races);
    write_ppc_csv(dir / "ppc.csv", reports);

    std::ofstream hist(dir / "ppc_histograms.csv", std::ios::binary);
    hist << "course,season,bin,log_time_low,log_time_high,observed,predicted\n";
    for (std::size_t k = 0; k < races.size(); ++k) {
        auto pred = posterior_predictive_race(chain, f.design, races[k], seed);
        std::vector<double> obs_times;
        for (const auto& o : f.observations)
            if (o.course == reports[k].course && o.season == reports[k].season) obs_times.push_back(o.finish_time);
        auto h = race_histogram(obs_times, pred.times, bins);
        for (std::size_t b = 0; b < bins; ++b) {
            hist << csv::quote(reports[k].course) << ',' << reports[k].season << ',' << b << ','
                 << csv::format_double(h.edges[b]) << ',' << csv::format_double(h.edges[b + 1]) << ','
                 << h.observed[b] << ',' << h.predicted[b] << '\n';
        }
    }
    write_json(dir / "ppc.json", {{"seed", seed},
                                  {"draws", chain.rows()},
                                  {"replicates_per_draw", 1},
                                  {"chain", "chain.csv"},
                                  {"aggregation", "mean over posterior draws of each order statistic of the simulated field"},
                                  {"quantiles", "type 7 (linear interpolation of order statistics)"},
                                  {"histogram_scale", "natural log of finish time in minutes"}});
    update_manifest(dir, "ppc", {{"fit", fs::absolute(f.dir).string()}, {"seed", seed}, {"races", reports.size()},
                                 {"artifacts", {"ppc.csv", "ppc_histograms.csv", "ppc.json"}}});

    out << std::left << std::setw(24) << "race" << std::right << std::setw(5) << "n" << "  "
        << "obs (min/LQ/med/UQ/max) | pred\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(24) << (r.course + ":" + r.season) << std::right << std::setw(5) << r.finishers
            << "  " << std::fixed << std::setprecision(2);
        for (double v : r.observed) out << v << ' ';
        out << "| ";
        for (double v : r.predicted) out << v << ' ';
        if (r.low_power) out << "(low power)";
        out << '\n' << std::defaultfloat;
    }
    return kOk;
}

int cmd_simulate(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
                 std::ostream& out) {
    SyntheticSpec spec;
    if (!spec_path.empty()) spec = synthetic_spec_from_json(read_json(spec_path));
    if (seed) spec.seed = *seed;
    spec.validate();
    auto data = simulate_dataset(spec);
    const fs::path dir = out_dir.empty() ? default_out("synthetic", spec.seed) : fs::path(out_dir);
    write_synthetic(data, spec, dir);
    update_manifest(dir, "simulate",
                    {{"spec", to_json(spec)},
                     {"seed", spec.seed},
                     {"artifacts", {"results.csv", "races.csv", "rainfall.csv", "truth.json"}},
                     {"observations", data.observations.size()}});
    out << "simulate: " << data.observations.size() << " observations in " << data.races.size() << " races -> "
        << dir.string() << '\n';
    return kOk;
}

int cmd_diagnose(const std::string& fit_dir, const std::string& out_dir, std::size_t max_lag, bool all_params,
                 std::ostream& out) {
    auto f = load_fit(fit_dir);
    const fs::path dir = out_dir.empty() ? f.dir : fs::path(out_dir);
    fs::create_directories(dir);
    const auto& first = f.chains.front();
    std::vector<std::string> params;
    for (const auto& n : first.names)
        if (all_params || n.rfind("athlete[", 0) != 0) params.push_back(n);

    write_trace_csv(dir / "trace.csv", f.chains, params);

    std::ofstream diag(dir / "diagnostics.csv", std::ios::binary);
    diag << "parameter,chain,ess,degenerate,acf_lag1,split_rhat\n";
    std::ofstream acf(dir / "autocorrelation.csv", std::ios::binary);
    acf << "parameter,chain,lag,rho\n";
    std::size_t flagged = 0;
    for (const auto& p : params) {
        const auto j = first.column_index(p);
        std::vector<std::vector<double>> cols;
        for (const auto& ch : f.chains) cols.push_back(ch.column(j));
        double rhat = std::numeric_limits<double>::quiet_NaN();
        if (cols.size() > 1 && cols.front().size() >= 4) rhat = split_rhat(cols);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& col = cols[c];
            if (col.size() < 10) throw InputError("diagnose needs at least 10 stored draws per chain");
            auto ess = effective_sample_size(col);
            auto ac = autocorrelation(col, std::min(max_lag, col.size() - 1));
            diag << csv::quote(p) << ',' << c + 1 << ',' << csv::format_double(ess.ess) << ','
                 << (ess.degenerate ? 1 : 0) << ',' << csv::format_double(ac.rho[1]) << ','
                 << (std::isnan(rhat) ? "NA" : csv::format_double(rhat)) << '\n';
            for (std::size_t k = 0; k < ac.rho.size(); ++k)
                acf << csv::quote(p) << ',' << c + 1 << ',' << k << ',' << csv::format_double(ac.rho[k]) << '\n';
            if (!ess.degenerate && ess.ess < 100.0) {
                ++flagged;
                out << "warning: " << p << " (chain " << c + 1 << ") has ESS " << std::fixed << std::setprecision(1)
                    << ess.ess << std::defaultfloat << '\n';
            }
        }
    }
    update_manifest(dir, "diagnose", {{"fit", fs::absolute(f.dir).string()}, {"max_lag", max_lag},
                                      {"artifacts", {"trace.csv", "diagnostics.csv", "autocorrelation.csv"}}});
    out << "diagnose: " << params.size() << " parameters, " << flagged << " with ESS < 100\n";
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian mixed-effects model of cross-country race finish times", "xcmix"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kEngineVersion);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Fit the model by MCMC and write chain, summary and manifest");
    fit->add_option("--data", fa.data, "results.csv")->required()->check(CLI::ExistingFile);
    fit->add_option("--covariates", fa.covariates, "races.csv")->required()->check(CLI::ExistingFile);
    fit->add_option("--rainfall", fa.rainfall, "rainfall.csv")->required()->check(CLI::ExistingFile);
    fit->add_option("--sex", fa.sex, "M or F")->required();
    fit->add_option("--config", fa.config, "JSON config document")->check(CLI::ExistingFile);
    fit->add_option("--response", fa.response, "log-time (default) or log-pace");
    auto* wind_on = fit->add_flag("--windspeed", fa.windspeed, "Include the windspeed effect");
    fit->add_flag("--no-windspeed", fa.no_windspeed, "Exclude the windspeed effect (default)")->excludes(wind_on);
    fit->add_option("--seed", fa.seed);
    fit->add_option("--burn-in", fa.burn_in);
    fit->add_option("--iterations", fa.iterations);
    fit->add_option("--thin", fa.thin);
    fit->add_option("--refresh-every", fa.refresh, "Sweeps between full residual recomputations");
    fit->add_flag("--block-fixed", fa.block_fixed, "Draw the intercept and fixed effects jointly");
    fit->add_option("--dbar", fa.dbar, "Distance centering constant (default: data mean)");
    fit->add_option("--wbar", fa.wbar, "Windspeed centering constant (default: data mean)");
    fit->add_option("--chains", fa.chains, "Independent chains run concurrently");
    fit->add_option("--out", fa.out, "Output directory");

    std::string fit_dir, out_dir, spec_path;
    double base_time = 47.0;
    bool all_athletes = false;
    auto* summ = app.add_subcommand("summarize", "Posterior summaries and effect-on-time conversions");
    summ->add_option("--fit", fit_dir, "Fit directory")->required();
    summ->add_option("--out", out_dir, "Output directory (default: the fit directory)");
    summ->add_option("--base-time", base_time, "Finish time in minutes for effect conversions");
    summ->add_flag("--athletes", all_athletes, "Print athlete effects too");

    std::vector<std::string> race_specs;
    std::uint64_t ppc_seed = 0;
    std::size_t bins = 30;
    auto* ppc = app.add_subcommand("ppc", "Posterior predictive check per race");
    ppc->add_option("--fit", fit_dir, "Fit directory")->required();
    ppc->add_option("--races", race_specs, "'all' or Course:Season, comma separated")->delimiter(',');
    ppc->add_option("--seed", ppc_seed, "Predictive seed (default: the fit seed)");
    ppc->add_option("--bins", bins, "Histogram bins");
    ppc->add_option("--out", out_dir, "Output directory (default: the fit directory)");

    std::uint64_t sim_seed = 0;
    auto* sim = app.add_subcommand("simulate", "Simulate a synthetic dataset in the ingest schemas");
    sim->add_option("--spec", spec_path, "Synthetic spec JSON")->check(CLI::ExistingFile);
    sim->add_option("--seed", sim_seed);
    sim->add_option("--out", out_dir, "Output directory");

    std::size_t max_lag = 50;
    auto* diag = app.add_subcommand("diagnose", "Trace export, autocorrelation, ESS and R-hat");
    diag->add_option("--fit", fit_dir, "Fit directory")->required();
    diag->add_option("--out", out_dir, "Output directory (default: the fit directory)");
    diag->add_option("--max-lag", max_lag);
    diag->add_flag("--all", all_athletes, "Include athlete effects");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kEngineVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (fit->parsed()) return cmd_fit(fa, *fit, out);
        if (summ->parsed()) return cmd_summarize(fit_dir, out_dir, base_time, all_athletes, out);
        if (ppc->parsed())
            return cmd_ppc(fit_dir, out_dir, race_specs, ppc->count("--seed") ? std::optional(ppc_seed) : std::nullopt,
                           bins, out);
        if (sim->parsed())
            return cmd_simulate(spec_path, sim->count("--seed") ? std::optional(sim_seed) : std::nullopt, out_dir, out);
        if (diag->parsed()) return cmd_diagnose(fit_dir, out_dir, max_lag, all_athletes, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const SamplerError& e) {
        err << "sampler error: " << e.what() << '\n';
        return kSamplerError;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return kSamplerError;
    }
    return kInputError;
}

} // namespace xcmix::cli
