#pragma once

#include "xcmix/calendar.hpp"
#include "xcmix/config.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xcmix {

enum class Sex { male, female };

Sex parse_sex(std::string_view text); // "M" or "F"
std::string_view to_string(Sex s);

// One athlete's finish in one race.
struct RaceObservation {
    std::string athlete_id;
    std::string course;
    std::string season;
    double finish_time = 0.0; // minutes
    YearMonth race_month{};
    std::size_t line = 0; // source line, 0 when not read from a file
};

// Per-(course, season) covariates.
struct RaceContext {
    std::string course;
    std::string season;
    double distance = 0.0; // miles
    double windspeed = 0.0;
    YearMonth race_month{};
};

struct RainfallTable {
    std::map<YearMonth, double> mm;

    double at(YearMonth m) const; // throws InputError when the month is missing
};

std::vector<RaceObservation> parse_results(const std::filesystem::path& path, Sex sex_filter);
std::vector<RaceContext> parse_races(const std::filesystem::path& path);
RainfallTable parse_rainfall(const std::filesystem::path& path);

void write_results(const std::filesystem::path& path, const std::vector<RaceObservation>& obs, Sex sex);
void write_races(const std::filesystem::path& path, const std::vector<RaceContext>& races);
void write_rainfall(const std::filesystem::path& path, const RainfallTable& rain);

// Bijective name <-> dense index map for one grouping factor. Index 0 is the
// corner-constrained baseline level.
class LevelDictionary {
public:
    LevelDictionary() = default;
    explicit LevelDictionary(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t index) const { return names_.at(index); }
    std::size_t index(std::string_view name) const; // throws InputError if unknown
    bool contains(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const LevelDictionary& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

// A (course, season) race as seen by the model.
struct Race {
    std::uint32_t course = 0;
    std::uint32_t season = 0;
    double distance = 0.0;
    double windspeed = 0.0;
    YearMonth month{};
    double rain_current = 0.0;
    double rain_previous = 0.0;
};

// Structure-of-arrays view of the fitted data. Per-observation vectors all
// have size() entries.
struct Design {
    Response response = Response::log_time;
    LevelDictionary athletes;
    LevelDictionary courses;
    LevelDictionary seasons;
    std::vector<Race> races;

    std::vector<std::uint32_t> athlete;
    std::vector<std::uint32_t> course;
    std::vector<std::uint32_t> season;
    std::vector<std::uint32_t> race;

    std::vector<double> distance_c;  // D - distance_center
    std::vector<double> windspeed_c; // W - windspeed_center
    std::vector<double> rain_current;
    std::vector<double> rain_previous;
    std::vector<double> log_time;     // ln T
    std::vector<double> log_distance; // ln D
    std::vector<double> response_y;   // ln T, or ln T - ln D for log pace

    double distance_center = 0.0;
    double windspeed_center = 0.0;

    std::size_t size() const { return response_y.size(); }
    std::size_t race_index(std::string_view course_name, std::string_view season_name) const;
};

inline constexpr std::string_view kBaselineCourse = "Alnwick";
inline constexpr std::string_view kBaselineSeason = "17/18";

Design build_design(const std::vector<RaceObservation>& obs, const std::vector<RaceContext>& ctx,
                    const RainfallTable& rain, const ModelConfig& cfg);

} // namespace xcmix
