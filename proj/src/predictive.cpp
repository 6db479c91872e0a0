#include "xcmix/predictive.hpp"

#include "xcmix/csv.hpp"
#include "xcmix/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

namespace xcmix {

using nlohmann::json;

namespace {

constexpr const char* kNehlCourses[] = {"Alnwick",    "Aykley Heads", "Druridge Bay",  "Gosforth",
                                        "Herrington", "Lambton",      "Thornley", "Wrekenton"};

double uniform_in(const UniformRange& r, Rng& rng) { return r.lo + (r.hi - r.lo) * rng.uniform(); }

std::string season_label(int start_year) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d/%02d", start_year % 100, (start_year + 1) % 100);
    return buf;
}

void check_range(const UniformRange& r, const char* what, bool allow_zero) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi) || (allow_zero ? r.lo < 0.0 : r.lo <= 0.0))
        throw InputError(std::string("synthetic spec: invalid ") + what + " range");
}

UniformRange read_range(const json& doc, const char* key, UniformRange def) {
    if (!doc.contains(key)) return def;
    auto v = doc.at(key).get<std::vector<double>>();
    if (v.size() != 2) throw InputError(std::string("synthetic spec: '") + key + "' must be [lo, hi]");
    return {v[0], v[1]};
}

} // namespace

void SyntheticSpec::validate() const {
    if (athletes < 1 || courses < 1 || seasons < 1 || races < 1)
        throw InputError("synthetic spec: athlete, course, season and race counts must be >= 1");
    if (races > courses * seasons) throw InputError("synthetic spec: more races than (course, season) pairs");
    if (!(mean_finishers > 0.0)) throw InputError("synthetic spec: mean_finishers must be > 0");
    check_range(distance, "distance", false);
    check_range(windspeed, "windspeed", true);
    check_range(rainfall, "rainfall", true);
    for (double v : {truth.tau_obs, truth.tau_athlete, truth.tau_course, truth.tau_season, truth.phi})
        if (!(v > 0.0)) throw InputError("synthetic spec: precisions and phi must be > 0");
}

json to_json(const SyntheticSpec& s) {
    const auto& t = s.truth;
    return {
        {"athletes", s.athletes},
        {"courses", s.courses},
        {"seasons", s.seasons},
        {"races", s.races},
        {"mean_finishers", s.mean_finishers},
        {"first_season_year", s.first_season_year},
        {"include_windspeed", s.include_windspeed},
        {"sex", std::string(to_string(s.sex))},
        {"distance_range", {s.distance.lo, s.distance.hi}},
        {"windspeed_range", {s.windspeed.lo, s.windspeed.hi}},
        {"rainfall_range", {s.rainfall.lo, s.rainfall.hi}},
        {"seed", s.seed},
        {"truth",
         {{"intercept", t.intercept},
          {"gamma_dist", t.gamma_dist},
          {"lambda_wind", t.lambda_wind},
          {"rho_cur", t.rho_cur},
          {"rho_prev", t.rho_prev},
          {"m_rho", t.m_rho},
          {"phi", t.phi},
          {"tau_obs", t.tau_obs},
          {"tau_athlete", t.tau_athlete},
          {"tau_course", t.tau_course},
          {"tau_season", t.tau_season}}},
    };
}

SyntheticSpec synthetic_spec_from_json(const json& doc, SyntheticSpec s) {
    if (!doc.is_object()) throw InputError("synthetic spec must be a JSON object");
    static const std::vector<std::string> known = {
        "athletes",        "courses",        "seasons",         "races",          "mean_finishers",
        "first_season_year", "include_windspeed", "sex",       "distance_range", "windspeed_range",
        "rainfall_range",  "seed",           "truth"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw InputError("synthetic spec: unknown key '" + it.key() + "'");
    try {
        auto count = [&](const char* key, std::size_t& out) {
            if (!doc.contains(key)) return;
            auto v = doc.at(key).get<long long>();
            if (v < 0) throw InputError(std::string("synthetic spec: '") + key + "' must be >= 0");
            out = static_cast<std::size_t>(v);
        };
        count("athletes", s.athletes);
        count("courses", s.courses);
        count("seasons", s.seasons);
        count("races", s.races);
        s.mean_finishers = doc.value("mean_finishers", s.mean_finishers);
        s.first_season_year = doc.value("first_season_year", s.first_season_year);
        s.include_windspeed = doc.value("include_windspeed", s.include_windspeed);
        if (doc.contains("sex")) s.sex = parse_sex(doc.at("sex").get<std::string>());
        s.distance = read_range(doc, "distance_range", s.distance);
        s.windspeed = read_range(doc, "windspeed_range", s.windspeed);
        s.rainfall = read_range(doc, "rainfall_range", s.rainfall);
        s.seed = doc.value("seed", s.seed);
        if (doc.contains("truth")) {
            const auto& t = doc.at("truth");
            auto& q = s.truth;
            for (auto [key, dst] : {std::pair{"intercept", &q.intercept}, std::pair{"gamma_dist", &q.gamma_dist},
                                    std::pair{"lambda_wind", &q.lambda_wind}, std::pair{"rho_cur", &q.rho_cur},
                                    std::pair{"rho_prev", &q.rho_prev}, std::pair{"m_rho", &q.m_rho},
                                    std::pair{"phi", &q.phi}, std::pair{"tau_obs", &q.tau_obs},
                                    std::pair{"tau_athlete", &q.tau_athlete}, std::pair{"tau_course", &q.tau_course},
                                    std::pair{"tau_season", &q.tau_season}})
                *dst = t.value(key, *dst);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("synthetic spec: ") + e.what());
    }
    return s;
}

SyntheticDataset simulate_dataset(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(sub_seed(spec.seed, 0));
    SyntheticDataset out;
    const auto& t = spec.truth;

    const int width = std::max(4, static_cast<int>(std::to_string(spec.athletes).size()));
    for (std::size_t a = 0; a < spec.athletes; ++a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "A%0*zu", width, a + 1);
        out.athlete_names.emplace_back(buf);
    }
    for (std::size_t c = 0; c < spec.courses; ++c) {
        if (c < std::size(kNehlCourses)) {
            out.course_names.emplace_back(kNehlCourses[c]);
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "Course %02zu", c + 1);
            out.course_names.emplace_back(buf);
        }
    }
    for (std::size_t k = 0; k < spec.seasons; ++k)
        out.season_names.push_back(season_label(spec.first_season_year + static_cast<int>(k)));

    auto& truth = out.truth;
    truth = ParameterState::zeros(spec.athletes, spec.courses, spec.seasons, spec.include_windspeed);
    truth.intercept = t.intercept;
    truth.gamma_dist = t.gamma_dist;
    if (spec.include_windspeed) truth.lambda_wind = t.lambda_wind;
    truth.rho_cur = t.rho_cur;
    truth.rho_prev = t.rho_prev;
    truth.m_rho = t.m_rho;
    truth.phi = t.phi;
    truth.tau_obs = t.tau_obs;
    truth.tau_athlete = t.tau_athlete;
    truth.tau_course = t.tau_course;
    truth.tau_season = t.tau_season;
    auto draw_effects = [&](std::vector<double>& v, double tau) {
        for (std::size_t l = 1; l < v.size(); ++l) v[l] = rng.normal() / std::sqrt(tau);
    };
    draw_effects(truth.athlete, t.tau_athlete);
    draw_effects(truth.course, t.tau_course);
    draw_effects(truth.season, t.tau_season);

    // Races: a diagonal that covers every course and season, then random
    // distinct (course, season) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (season, course)
    const std::size_t diag = std::min(spec.races, std::max(spec.courses, spec.seasons));
    for (std::size_t r = 0; r < diag; ++r) pairs.emplace_back(r % spec.seasons, r % spec.courses);
    std::vector<std::pair<std::size_t, std::size_t>> rest;
    for (std::size_t k = 0; k < spec.seasons; ++k)
        for (std::size_t c = 0; c < spec.courses; ++c)
            if (std::find(pairs.begin(), pairs.end(), std::pair{k, c}) == pairs.end()) rest.emplace_back(k, c);
    for (std::size_t i = 0; i + 1 < rest.size(); ++i) {
        auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(rest.size() - i));
        std::swap(rest[i], rest[std::min(j, rest.size() - 1)]);
    }
    for (std::size_t i = 0; pairs.size() < spec.races; ++i) pairs.push_back(rest[i]);
    std::sort(pairs.begin(), pairs.end());

    static constexpr int kMonths[] = {9, 10, 11, 12, 1, 2, 3};
    for (auto [k, c] : pairs) {
        RaceContext ctx;
        ctx.course = out.course_names[c];
        ctx.season = out.season_names[k];
        ctx.distance = uniform_in(spec.distance, rng);
        ctx.windspeed = uniform_in(spec.windspeed, rng);
        int month = kMonths[std::min<std::size_t>(6, static_cast<std::size_t>(rng.uniform() * 7.0))];
        ctx.race_month = {spec.first_season_year + static_cast<int>(k) + (month <= 3 ? 1 : 0), month};
        out.races.push_back(ctx);
    }

    for (YearMonth m{spec.first_season_year, 8}; m <= YearMonth{spec.first_season_year + static_cast<int>(spec.seasons), 3};
         m = next_month(m))
        out.rainfall.mm[m] = uniform_in(spec.rainfall, rng);

    const double d_center = 0.5 * (spec.distance.lo + spec.distance.hi);
    const double w_center = 0.5 * (spec.windspeed.lo + spec.windspeed.hi);
    const double p_enter = std::min(1.0, spec.mean_finishers / static_cast<double>(spec.athletes));
    const double sd = 1.0 / std::sqrt(t.tau_obs);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto [k, c] = pairs[r];
        const auto& ctx = out.races[r];
        const double rain_cur = out.rainfall.at(ctx.race_month);
        const double rain_prev = out.rainfall.at(previous_month(ctx.race_month));
        std::vector<std::size_t> field;
        for (std::size_t a = 0; a < spec.athletes; ++a) {
            bool enters = rng.uniform() < p_enter || (a == 0 && r == 0);
            if (enters) field.push_back(a);
        }
        if (field.empty()) field.push_back(std::min(spec.athletes - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(spec.athletes))));
        for (auto a : field) {
            double mu = truth.intercept + truth.athlete[a] + truth.course[c] + truth.season[k] +
                        truth.gamma_dist * (ctx.distance - d_center) + truth.rho_cur * rain_cur +
                        truth.rho_prev * rain_prev;
            if (truth.lambda_wind) mu += *truth.lambda_wind * (ctx.windspeed - w_center);
            const double y = mu + sd * rng.normal();
            out.observations.push_back({out.athlete_names[a], ctx.course, ctx.season, std::exp(y), ctx.race_month, 0});
        }
    }
    return out;
}

json truth_json(const SyntheticDataset& data) {
    const auto& s = data.truth;
    auto effects = [](const std::vector<std::string>& names, const std::vector<double>& v) {
        json o = json::object();
        for (std::size_t i = 0; i < names.size(); ++i) o[names[i]] = v[i];
        return o;
    };
    json doc = {
        {"intercept", s.intercept},
        {"gamma_dist", s.gamma_dist},
        {"rho_cur", s.rho_cur},
        {"rho_prev", s.rho_prev},
        {"m_rho", s.m_rho},
        {"phi", s.phi},
        {"tau_obs", s.tau_obs},
        {"tau_athlete", s.tau_athlete},
        {"tau_course", s.tau_course},
        {"tau_season", s.tau_season},
        {"athlete", effects(data.athlete_names, s.athlete)},
        {"course", effects(data.course_names, s.course)},
        {"season", effects(data.season_names, s.season)},
    };
    if (s.lambda_wind) doc["lambda_wind"] = *s.lambda_wind;
    return doc;
}

void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_results(dir / "results.csv", data.observations, spec.sex);
    write_races(dir / "races.csv", data.races);
    write_rainfall(dir / "rainfall.csv", data.rainfall);
    json doc = truth_json(data);
    doc["distance_center"] = 0.5 * (spec.distance.lo + spec.distance.hi);
    doc["windspeed_center"] = 0.5 * (spec.windspeed.lo + spec.windspeed.hi);
    doc["spec"] = to_json(spec);
    std::ofstream out(dir / "truth.json", std::ios::binary);
    if (!out) throw InputError("cannot write '" + (dir / "truth.json").string() + "'");
    out << doc.dump(2) << '\n';
}

std::vector<RaceObservation> simulate_observations(const ParameterState& state, const Design& d, Rng& rng) {
    state.check_invariants();
    std::vector<RaceObservation> out;
    out.reserve(d.size());
    const double sd = 1.0 / std::sqrt(state.tau_obs);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& race = d.races[d.race[i]];
        const double y = linear_predictor(state, i, d) + sd * rng.normal();
        const double t = d.response == Response::log_pace ? race.distance * std::exp(y) : std::exp(y);
        out.push_back({d.athletes.name(d.athlete[i]), d.courses.name(race.course), d.seasons.name(race.season), t,
                       race.month, 0});
    }
    return out;
}

namespace {

void check_chain_matches(const ChainOutput& chain, const Design& d) {
    const auto& m = chain.meta;
    if (m.athletes != d.athletes.names() || m.courses != d.courses.names() || m.seasons != d.seasons.names())
        throw InputError("chain level dictionaries do not match the design");
    if (m.distance_center != d.distance_center || m.windspeed_center != d.windspeed_center)
        throw InputError("chain centering constants do not match the design");
    if (m.config.response != d.response) throw InputError("chain response variant does not match the design");
    if (chain.layout != layout_for(d, m.config.include_windspeed))
        throw InputError("chain layout does not match the design");
}

double mu_from_row(const ParameterLayout& L, std::span<const double> row, const Design& d, std::size_t i) {
    const std::size_t s = L.scalar_offset();
    double mu = row[0] + row[L.athlete_offset() + d.athlete[i]] + row[L.course_offset() + d.course[i]] +
                row[L.season_offset() + d.season[i]] + row[s] * d.distance_c[i];
    std::size_t k = s + 1;
    if (L.windspeed) mu += row[k++] * d.windspeed_c[i];
    mu += row[k] * d.rain_current[i] + row[k + 1] * d.rain_previous[i];
    return mu;
}

std::size_t tau_obs_column(const ParameterLayout& L) { return L.scalar_offset() + (L.windspeed ? 6 : 5); }

} // namespace

PredictiveDraws posterior_predictive_race(const ChainOutput& chain, const Design& design, std::size_t race,
                                          std::uint64_t seed, unsigned threads) {
    check_chain_matches(chain, design);
    if (race >= design.races.size()) throw InputError("race index out of range");
    PredictiveDraws out;
    out.race = race;
    for (std::size_t i = 0; i < design.size(); ++i)
        if (design.race[i] == race) out.observations.push_back(i);
    out.draws = chain.rows();
    out.finishers = out.observations.size();
    out.times.assign(out.draws * out.finishers, 0.0);

    const bool pace = design.response == Response::log_pace;
    const double distance = design.races[race].distance;
    const std::size_t tau_col = tau_obs_column(chain.layout);
    const std::uint64_t race_seed = sub_seed(seed, 1'000'000 + race);
    const std::size_t chunks = (out.draws + kPredictiveChunk - 1) / kPredictiveChunk;

    auto run_chunk = [&](std::size_t c) {
        Rng rng(sub_seed(race_seed, c));
        const std::size_t end = std::min(out.draws, (c + 1) * kPredictiveChunk);
        for (std::size_t dr = c * kPredictiveChunk; dr < end; ++dr) {
            const auto row = chain.row(dr);
            const double sd = 1.0 / std::sqrt(row[tau_col]);
            double* dst = out.times.data() + dr * out.finishers;
            for (std::size_t a = 0; a < out.finishers; ++a) {
                const double y = mu_from_row(chain.layout, row, design, out.observations[a]) + sd * rng.normal();
                dst[a] = pace ? distance * std::exp(y) : std::exp(y);
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

PredictiveDraws posterior_predictive_race(const ChainOutput& chain, const Design& design, std::string_view course,
                                          std::string_view season, std::uint64_t seed, unsigned threads) {
    return posterior_predictive_race(chain, design, design.race_index(course, season), seed, threads);
}

FiveNumber five_number_summary(std::vector<double> v) {
    if (v.empty()) throw InputError("five-number summary of an empty sample");
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double h = (static_cast<double>(v.size()) - 1.0) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

std::vector<PpcRaceReport> ppc_report(const ChainOutput& chain, const Design& design,
                                      const std::vector<RaceObservation>& observed, std::uint64_t seed,
                                      const std::vector<std::size_t>& races) {
    check_chain_matches(chain, design);
    std::map<std::pair<std::string, std::string>, std::vector<double>> obs_times;
    for (const auto& o : observed) obs_times[{o.course, o.season}].push_back(o.finish_time);

    std::vector<std::size_t> wanted = races;
    if (wanted.empty())
        for (std::size_t r = 0; r < design.races.size(); ++r) wanted.push_back(r);

    std::vector<PpcRaceReport> out;
    for (auto r : wanted) {
        if (r >= design.races.size()) throw InputError("race index out of range");
        PpcRaceReport rep;
        rep.course = design.courses.name(design.races[r].course);
        rep.season = design.seasons.name(design.races[r].season);
        auto it = obs_times.find({rep.course, rep.season});
        if (it == obs_times.end() || it->second.empty())
            throw InputError("no observed finishers for race " + rep.course + ":" + rep.season);
        rep.finishers = it->second.size();
        rep.low_power = rep.finishers < 5;
        rep.observed = five_number_summary(it->second);

        auto pred = posterior_predictive_race(chain, design, r, seed);
        FiveNumber acc{};
        for (std::size_t dr = 0; dr < pred.draws; ++dr) {
            auto d = pred.draw(dr);
            auto f = five_number_summary(std::vector<double>(d.begin(), d.end()));
            for (std::size_t k = 0; k < 5; ++k) acc[k] += f[k];
        }
        for (std::size_t k = 0; k < 5; ++k) {
            rep.predicted[k] = acc[k] / static_cast<double>(pred.draws);
            rep.discrepancy[k] = rep.predicted[k] - rep.observed[k];
        }
        out.push_back(std::move(rep));
    }
    return out;
}

void write_ppc_csv(const std::filesystem::path& path, const std::vector<PpcRaceReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << "course,season,finishers,obs_min,obs_lq,obs_median,obs_uq,obs_max,"
           "pred_min,pred_lq,pred_median,pred_uq,pred_max,low_power\n";
    for (const auto& r : reports) {
        out << csv::quote(r.course) << ',' << r.season << ',' << r.finishers;
        for (double v : r.observed) out << ',' << csv::format_double(v);
        for (double v : r.predicted) out << ',' << csv::format_double(v);
        out << ',' << (r.low_power ? 1 : 0) << '\n';
    }
}

RaceHistogram race_histogram(std::span<const double> observed, std::span<const double> predicted, std::size_t bins) {
    if (bins == 0) throw InputError("histogram needs at least one bin");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto span : {observed, predicted})
        for (double t : span) {
            lo = std::min(lo, std::log(t));
            hi = std::max(hi, std::log(t));
        }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    RaceHistogram h;
    h.edges.resize(bins + 1);
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + w * static_cast<double>(b);
    h.edges[bins] = hi;
    auto fill = [&](std::span<const double> ts, std::vector<std::size_t>& counts) {
        counts.assign(bins, 0);
        for (double t : ts) {
            auto b = static_cast<std::size_t>(std::max(0.0, std::floor((std::log(t) - lo) / w)));
            ++counts[std::min(b, bins - 1)];
        }
    };
    fill(observed, h.observed);
    fill(predicted, h.predicted);
    return h;
}

double sign_test_p_value(std::span<const double> differences) {
    std::size_t n = 0, pos = 0;
    for (double d : differences) {
        if (d == 0.0) continue;
        ++n;
        if (d > 0.0) ++pos;
    }
    if (n == 0) return 1.0;
    auto log_pmf = [&](std::size_t k) {
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - static_cast<double>(n) * std::log(2.0);
    };
    const std::size_t k = std::min(pos, n - pos);
    double tail = 0.0;
    for (std::size_t j = 0; j <= k; ++j) tail += std::exp(log_pmf(j));
    return std::min(1.0, 2.0 * tail);
}

double effect_on_time(double base_time_minutes, double coefficient, double delta) {
    if (!(base_time_minutes > 0.0)) throw DomainError("base time must be positive");
    return 60.0 * base_time_minutes * std::expm1(coefficient * delta);
}

} // namespace xcmix
