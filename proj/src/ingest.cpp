#include "xcmix/ingest.hpp"

#include "xcmix/csv.hpp"
#include "xcmix/error.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>

namespace xcmix {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
    return "'" + path.string() + "' line " + std::to_string(line);
}

YearMonth parse_month_field(const std::string& text, const std::filesystem::path& path, std::size_t line) {
    try {
        return YearMonth::parse(text);
    } catch (const InputError& e) {
        throw InputError(where(path, line) + ": " + e.what());
    }
}

void check_season_label(const std::string& label, const std::filesystem::path& path, std::size_t line) {
    auto slash = label.find('/');
    int first = season_start_year(label);
    bool ok = first != INT_MAX && slash + 3 == label.size();
    if (ok) {
        int second = (label[slash + 1] - '0') * 10 + (label[slash + 2] - '0');
        ok = std::isdigit(static_cast<unsigned char>(label[slash + 1])) &&
             std::isdigit(static_cast<unsigned char>(label[slash + 2])) && second == (first + 1) % 100;
    }
    if (!ok) throw InputError(where(path, line) + ": unknown season label '" + label + "', expected YY/YY");
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

Sex parse_sex(std::string_view text) {
    if (text == "M") return Sex::male;
    if (text == "F") return Sex::female;
    throw InputError("unknown sex '" + std::string(text) + "', expected M or F");
}

std::string_view to_string(Sex s) { return s == Sex::male ? "M" : "F"; }

double RainfallTable::at(YearMonth m) const {
    auto it = mm.find(m);
    if (it == mm.end()) throw InputError("rainfall missing for month " + m.str());
    return it->second;
}

std::vector<RaceObservation> parse_results(const std::filesystem::path& path, Sex sex_filter) {
    auto table = csv::read(path);
    csv::require_header(table, {"athlete_id", "course", "season", "sex", "finish_time_min", "race_month"}, path);
    std::vector<RaceObservation> out;
    for (const auto& row : table.rows) {
        const auto& f = row.fields;
        Sex sex;
        try {
            sex = parse_sex(f[3]);
        } catch (const InputError& e) {
            throw InputError(where(path, row.line) + ": " + e.what());
        }
        if (f[0].empty()) throw InputError(where(path, row.line) + ": empty athlete_id");
        if (f[1].empty()) throw InputError(where(path, row.line) + ": empty course");
        check_season_label(f[2], path, row.line);
        double t = csv::parse_double(f[4], "finish time", path, row.line);
        if (!(t > 0.0)) throw InputError("nonpositive finish time, line " + std::to_string(row.line) + " of '" +
                                         path.string() + "'");
        auto month = parse_month_field(f[5], path, row.line);
        if (sex != sex_filter) continue;
        out.push_back({f[0], f[1], f[2], t, month, row.line});
    }
    return out;
}

std::vector<RaceContext> parse_races(const std::filesystem::path& path) {
    auto table = csv::read(path);
    csv::require_header(table, {"course", "season", "distance_miles", "windspeed", "race_month"}, path);
    std::vector<RaceContext> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& row : table.rows) {
        const auto& f = row.fields;
        if (f[0].empty()) throw InputError(where(path, row.line) + ": empty course");
        check_season_label(f[1], path, row.line);
        double d = csv::parse_double(f[2], "distance", path, row.line);
        double w = csv::parse_double(f[3], "windspeed", path, row.line);
        if (!(d > 0.0)) throw InputError(where(path, row.line) + ": nonpositive distance");
        if (w < 0.0) throw InputError(where(path, row.line) + ": negative windspeed");
        if (!seen.emplace(f[0], f[1]).second) {
            throw InputError(where(path, row.line) + ": duplicate race " + f[0] + " " + f[1]);
        }
        out.push_back({f[0], f[1], d, w, parse_month_field(f[4], path, row.line)});
    }
    return out;
}

RainfallTable parse_rainfall(const std::filesystem::path& path) {
    auto table = csv::read(path);
    csv::require_header(table, {"month", "rainfall_mm"}, path);
    RainfallTable rain;
    for (const auto& row : table.rows) {
        auto m = parse_month_field(row.fields[0], path, row.line);
        double v = csv::parse_double(row.fields[1], "rainfall", path, row.line);
        if (v < 0.0) throw InputError(where(path, row.line) + ": negative rainfall");
        if (!rain.mm.emplace(m, v).second) throw InputError(where(path, row.line) + ": duplicate month " + m.str());
    }
    return rain;
}

void write_results(const std::filesystem::path& path, const std::vector<RaceObservation>& obs, Sex sex) {
    auto out = open_out(path);
    out << "athlete_id,course,season,sex,finish_time_min,race_month\n";
    for (const auto& o : obs) {
        out << csv::quote(o.athlete_id) << ',' << csv::quote(o.course) << ',' << o.season << ',' << to_string(sex)
            << ',' << csv::format_double(o.finish_time) << ',' << o.race_month.str() << '\n';
    }
}

void write_races(const std::filesystem::path& path, const std::vector<RaceContext>& races) {
    auto out = open_out(path);
    out << "course,season,distance_miles,windspeed,race_month\n";
    for (const auto& r : races) {
        out << csv::quote(r.course) << ',' << r.season << ',' << csv::format_double(r.distance) << ','
            << csv::format_double(r.windspeed) << ',' << r.race_month.str() << '\n';
    }
}

void write_rainfall(const std::filesystem::path& path, const RainfallTable& rain) {
    auto out = open_out(path);
    out << "month,rainfall_mm\n";
    for (const auto& [m, v] : rain.mm) out << m.str() << ',' << csv::format_double(v) << '\n';
}

LevelDictionary::LevelDictionary(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!lookup_.emplace(names_[i], i).second) throw InputError("duplicate level '" + names_[i] + "'");
    }
}

std::size_t LevelDictionary::index(std::string_view name) const {
    auto it = lookup_.find(std::string(name));
    if (it == lookup_.end()) throw InputError("unknown level '" + std::string(name) + "'");
    return it->second;
}

bool LevelDictionary::contains(std::string_view name) const { return lookup_.count(std::string(name)) != 0; }

std::size_t Design::race_index(std::string_view course_name, std::string_view season_name) const {
    if (courses.contains(course_name) && seasons.contains(season_name)) {
        auto c = courses.index(course_name);
        auto s = seasons.index(season_name);
        for (std::size_t r = 0; r < races.size(); ++r) {
            if (races[r].course == c && races[r].season == s) return r;
        }
    }
    std::string available;
    for (const auto& r : races) {
        if (!available.empty()) available += ", ";
        available += courses.name(r.course) + ":" + seasons.name(r.season);
    }
    throw InputError("unknown race " + std::string(course_name) + ":" + std::string(season_name) +
                     "; available races: " + available);
}

namespace {

template <class Less>
std::vector<std::string> order_levels(std::set<std::string> levels, std::string_view baseline, Less less) {
    std::vector<std::string> out(levels.begin(), levels.end());
    std::stable_sort(out.begin(), out.end(), less);
    auto it = std::find(out.begin(), out.end(), baseline);
    if (it != out.end()) std::rotate(out.begin(), it, it + 1);
    return out;
}

} // namespace

Design build_design(const std::vector<RaceObservation>& obs, const std::vector<RaceContext>& ctx,
                    const RainfallTable& rain, const ModelConfig& cfg) {
    std::map<std::pair<std::string, std::string>, const RaceContext*> ctx_index;
    for (const auto& c : ctx) {
        if (!(c.distance > 0.0)) throw InputError("nonpositive distance for race " + c.course + " " + c.season);
        ctx_index[{c.course, c.season}] = &c;
    }

    std::set<std::string> athletes, courses, seasons;
    std::vector<const RaceContext*> joined(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs[i];
        auto row = o.line ? " (line " + std::to_string(o.line) + ")" : std::string();
        auto it = ctx_index.find({o.course, o.season});
        if (it == ctx_index.end()) {
            bool season_known = std::any_of(ctx.begin(), ctx.end(), [&](const RaceContext& c) { return c.season == o.season; });
            if (!season_known) throw InputError("unknown season label '" + o.season + "'" + row);
            throw InputError("no race context for " + o.course + " " + o.season + row);
        }
        if (it->second->race_month != o.race_month) {
            throw InputError("race month " + o.race_month.str() + " disagrees with race table month " +
                             it->second->race_month.str() + " for " + o.course + " " + o.season + row);
        }
        if (!(o.finish_time > 0.0)) throw InputError("nonpositive finish time" + row);
        joined[i] = it->second;
        athletes.insert(o.athlete_id);
        courses.insert(o.course);
        seasons.insert(o.season);
    }

    Design d;
    d.response = cfg.response;
    d.athletes = LevelDictionary(std::vector<std::string>(athletes.begin(), athletes.end()));
    d.courses = LevelDictionary(order_levels(courses, kBaselineCourse, std::less<>{}));
    d.seasons = LevelDictionary(order_levels(seasons, kBaselineSeason, [](const std::string& a, const std::string& b) {
        return std::pair{season_start_year(a), a} < std::pair{season_start_year(b), b};
    }));

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> race_of;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        keys.emplace_back(static_cast<std::uint32_t>(d.seasons.index(obs[i].season)),
                          static_cast<std::uint32_t>(d.courses.index(obs[i].course)));
        race_of.emplace(keys.back(), 0);
    }
    for (auto& [key, idx] : race_of) {
        idx = static_cast<std::uint32_t>(d.races.size());
        const auto& c = *ctx_index.at({d.courses.name(key.second), d.seasons.name(key.first)});
        Race r;
        r.course = key.second;
        r.season = key.first;
        r.distance = c.distance;
        r.windspeed = c.windspeed;
        r.month = c.race_month;
        r.rain_current = rain.at(c.race_month);
        r.rain_previous = rain.at(previous_month(c.race_month));
        d.races.push_back(r);
    }

    const std::size_t n = obs.size();
    double dsum = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dsum += joined[i]->distance;
        wsum += joined[i]->windspeed;
    }
    d.distance_center = cfg.distance_center.value_or(n ? dsum / static_cast<double>(n) : 0.0);
    d.windspeed_center = cfg.windspeed_center.value_or(n ? wsum / static_cast<double>(n) : 0.0);

    d.athlete.resize(n);
    d.course.resize(n);
    d.season.resize(n);
    d.race.resize(n);
    d.distance_c.resize(n);
    d.windspeed_c.resize(n);
    d.rain_current.resize(n);
    d.rain_previous.resize(n);
    d.log_time.resize(n);
    d.log_distance.resize(n);
    d.response_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& race = d.races[race_of.at(keys[i])];
        d.athlete[i] = static_cast<std::uint32_t>(d.athletes.index(obs[i].athlete_id));
        d.course[i] = race.course;
        d.season[i] = race.season;
        d.race[i] = race_of.at(keys[i]);
        d.distance_c[i] = race.distance - d.distance_center;
        d.windspeed_c[i] = race.windspeed - d.windspeed_center;
        d.rain_current[i] = race.rain_current;
        d.rain_previous[i] = race.rain_previous;
        d.log_time[i] = std::log(obs[i].finish_time);
        d.log_distance[i] = std::log(race.distance);
        d.response_y[i] = cfg.response == Response::log_time ? d.log_time[i] : d.log_time[i] - d.log_distance[i];
        if (!std::isfinite(d.response_y[i])) throw InputError("non-finite response for observation " + std::to_string(i));
    }
    return d;
}

} // namespace xcmix
