#include "support/tempdir.hpp"
#include "support/toy.hpp"

#include "xcmix/calendar.hpp"
#include "xcmix/error.hpp"
#include "xcmix/ingest.hpp"
#include "xcmix/predictive.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace xcmix;
using xcmix::testing::slurp;
using xcmix::testing::spit;
using xcmix::testing::TempDir;

namespace {

const char* kResultsHeader = "athlete_id,course,season,sex,finish_time_min,race_month\n";

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("parse_results maps one row onto one observation") {
    TempDir dir;
    spit(dir / "r.csv", std::string(kResultsHeader) + "A0001,Herrington,21/22,M,47.50,2021-10\n");
    auto obs = parse_results(dir / "r.csv", Sex::male);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].athlete_id == "A0001");
    CHECK(obs[0].course == "Herrington");
    CHECK(obs[0].season == "21/22");
    CHECK(obs[0].finish_time == 47.50);
    CHECK(obs[0].race_month == YearMonth{2021, 10});
    CHECK(obs[0].line == 2);
}

TEST_CASE("parse_results rejects a nonpositive time naming the line") {
    TempDir dir;
    spit(dir / "r.csv", std::string(kResultsHeader) + "A0001,Herrington,21/22,M,47.50,2021-10\n" +
                            "A0002,Herrington,21/22,M,-3.0,2021-10\n");
    auto msg = error_of([&] { parse_results(dir / "r.csv", Sex::male); });
    CHECK(msg.find("nonpositive finish time, line 3") != std::string::npos);
}

TEST_CASE("parse_results keeps only the requested sex") {
    TempDir dir;
    spit(dir / "r.csv", std::string(kResultsHeader) + "A1,Alnwick,17/18,M,40,2017-10\n" +
                            "B1,Alnwick,17/18,F,30,2017-10\n" + "A2,Alnwick,17/18,M,41,2017-10\n");
    CHECK(parse_results(dir / "r.csv", Sex::female).size() == 1);
    CHECK(parse_results(dir / "r.csv", Sex::male).size() == 2);
}

TEST_CASE("parse_results error paths") {
    TempDir dir;
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_results(dir / "absent.csv", Sex::male), InputError);
    }
    SUBCASE("unparseable time") {
        spit(dir / "r.csv", std::string(kResultsHeader) + "A1,Alnwick,17/18,M,forty,2017-10\n");
        CHECK(error_of([&] { parse_results(dir / "r.csv", Sex::male); }).find("line 2") != std::string::npos);
    }
    SUBCASE("unknown season label") {
        spit(dir / "r.csv", std::string(kResultsHeader) + "A1,Alnwick,2017,M,40,2017-10\n");
        CHECK(error_of([&] { parse_results(dir / "r.csv", Sex::male); }).find("unknown season label") !=
              std::string::npos);
    }
    SUBCASE("wrong header") {
        spit(dir / "r.csv", "athlete,course,season,sex,time,month\nA1,Alnwick,17/18,M,40,2017-10\n");
        CHECK_THROWS_AS(parse_results(dir / "r.csv", Sex::male), InputError);
    }
    SUBCASE("bad month") {
        spit(dir / "r.csv", std::string(kResultsHeader) + "A1,Alnwick,17/18,M,40,2017-13\n");
        CHECK_THROWS_AS(parse_results(dir / "r.csv", Sex::male), InputError);
    }
}

TEST_CASE("parse_results tolerates CRLF, BOM and quoted fields") {
    TempDir dir;
    spit(dir / "r.csv", "\xEF\xBB\xBF" "athlete_id,course,season,sex,finish_time_min,race_month\r\n"
                        "A1,\"Aykley Heads\",17/18,M,40.5,2017-10\r\n\r\n");
    auto obs = parse_results(dir / "r.csv", Sex::male);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].course == "Aykley Heads");
}

TEST_CASE("parse_races and parse_rainfall validate their invariants") {
    TempDir dir;
    const std::string header = "course,season,distance_miles,windspeed,race_month\n";
    spit(dir / "ok.csv", header + "Alnwick,17/18,6.1,12,2017-10\n");
    CHECK(parse_races(dir / "ok.csv").size() == 1);
    spit(dir / "zero.csv", header + "Alnwick,17/18,0,12,2017-10\n");
    CHECK(error_of([&] { parse_races(dir / "zero.csv"); }).find("nonpositive distance") != std::string::npos);
    spit(dir / "wind.csv", header + "Alnwick,17/18,6,-1,2017-10\n");
    CHECK_THROWS_AS(parse_races(dir / "wind.csv"), InputError);
    spit(dir / "dup.csv", header + "Alnwick,17/18,6,1,2017-10\nAlnwick,17/18,6.2,1,2017-10\n");
    CHECK(error_of([&] { parse_races(dir / "dup.csv"); }).find("duplicate race") != std::string::npos);

    spit(dir / "rain.csv", "month,rainfall_mm\n2017-09,40\n2017-10,55.5\n");
    auto rain = parse_rainfall(dir / "rain.csv");
    CHECK(rain.at({2017, 10}) == 55.5);
    CHECK_THROWS_AS(rain.at({2017, 11}), InputError);
    spit(dir / "neg.csv", "month,rainfall_mm\n2017-09,-1\n");
    CHECK_THROWS_AS(parse_rainfall(dir / "neg.csv"), InputError);
}

TEST_CASE("writers round-trip through the parsers") {
    TempDir dir;
    auto obs = testing::toy_observations();
    write_results(dir / "results.csv", obs, Sex::male);
    write_races(dir / "races.csv", testing::toy_races());
    write_rainfall(dir / "rainfall.csv", testing::toy_rainfall());
    auto back = parse_results(dir / "results.csv", Sex::male);
    REQUIRE(back.size() == obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        CHECK(back[i].athlete_id == obs[i].athlete_id);
        CHECK(back[i].finish_time == obs[i].finish_time);
        CHECK(back[i].race_month == obs[i].race_month);
    }
    CHECK(parse_rainfall(dir / "rainfall.csv").mm == testing::toy_rainfall().mm);
    CHECK(parse_races(dir / "races.csv").size() == 4);
}

TEST_CASE("previous_month") {
    CHECK(previous_month({2021, 10}) == YearMonth{2021, 9});
    CHECK(previous_month({2022, 1}) == YearMonth{2021, 12});
    CHECK(previous_month({2020, 3}) == YearMonth{2020, 2});
    CHECK(YearMonth::parse("2021-10").str() == "2021-10");
}

TEST_CASE("previous_month composed twelve times is one year back") {
    for (int year = 1990; year <= 2030; ++year)
        for (int month = 1; month <= 12; ++month) {
            YearMonth m{year, month};
            YearMonth p = m;
            for (int k = 0; k < 12; ++k) p = previous_month(p);
            CHECK(p == YearMonth{year - 1, month});
            CHECK(next_month(previous_month(m)) == m);
        }
}

TEST_CASE("build_design responses") {
    ModelConfig cfg;
    std::vector<RaceObservation> obs = {testing::observation("A0001", "Herrington", "21/22", 47.50, "2021-10")};
    std::vector<RaceContext> ctx = {testing::context("Herrington", "21/22", 6.2, 8.0, "2021-10")};
    RainfallTable rain;
    rain.mm[{2021, 9}] = 30.0;
    rain.mm[{2021, 10}] = 50.0;

    auto d = build_design(obs, ctx, rain, cfg);
    CHECK(d.response_y[0] == doctest::Approx(3.860730).epsilon(1e-6));
    CHECK(d.rain_current[0] == 50.0);
    CHECK(d.rain_previous[0] == 30.0);

    cfg.response = Response::log_pace;
    auto p = build_design(obs, ctx, rain, cfg);
    CHECK(p.response_y[0] == doctest::Approx(2.036180).epsilon(1e-6));
    CHECK(p.response_y[0] == doctest::Approx(std::log(47.50 / 6.2)).epsilon(1e-15));

    // one observation: the centre is its own distance
    CHECK(d.distance_center == 6.2);
    CHECK(d.distance_c[0] == 0.0);
    CHECK(d.windspeed_c[0] == 0.0);
}

TEST_CASE("rainfall joins across the year boundary") {
    ModelConfig cfg;
    std::vector<RaceObservation> obs = {testing::observation("A1", "Alnwick", "21/22", 40.0, "2022-01")};
    std::vector<RaceContext> ctx = {testing::context("Alnwick", "21/22", 6.0, 1.0, "2022-01")};
    RainfallTable rain;
    rain.mm[{2021, 12}] = 12.5;
    rain.mm[{2022, 1}] = 99.0;
    auto d = build_design(obs, ctx, rain, cfg);
    CHECK(d.rain_current[0] == 99.0);
    CHECK(d.rain_previous[0] == 12.5);
    rain.mm.erase({2021, 12});
    CHECK_THROWS_AS(build_design(obs, ctx, rain, cfg), InputError);
}

TEST_CASE("build_design error paths") {
    ModelConfig cfg;
    auto obs = testing::toy_observations();
    auto ctx = testing::toy_races();
    auto rain = testing::toy_rainfall();
    SUBCASE("unjoinable observation") {
        obs.push_back(testing::observation("A9", "Lambton", "17/18", 40.0, "2017-10"));
        CHECK(error_of([&] { build_design(obs, ctx, rain, cfg); }).find("no race context") != std::string::npos);
    }
    SUBCASE("season absent from the race table") {
        obs.push_back(testing::observation("A9", "Alnwick", "22/23", 40.0, "2022-10"));
        CHECK(error_of([&] { build_design(obs, ctx, rain, cfg); }).find("unknown season label") != std::string::npos);
    }
    SUBCASE("nonpositive distance") {
        ctx[0].distance = 0.0;
        CHECK(error_of([&] { build_design(obs, ctx, rain, cfg); }).find("nonpositive distance") != std::string::npos);
    }
    SUBCASE("missing rainfall month") {
        rain.mm.erase({2017, 9});
        CHECK(error_of([&] { build_design(obs, ctx, rain, cfg); }).find("rainfall missing") != std::string::npos);
    }
    SUBCASE("race month disagrees with the race table") {
        obs[0].race_month = {2017, 12};
        CHECK_THROWS_AS(build_design(obs, ctx, rain, cfg), InputError);
    }
}

TEST_CASE("baseline levels sit at index 0") {
    auto d = testing::toy_design();
    CHECK(d.courses.name(0) == "Alnwick");
    CHECK(d.seasons.name(0) == "17/18");
    CHECK(d.athletes.name(0) == "A1");
    CHECK(d.athletes.names() == std::vector<std::string>{"A1", "A2", "A3"});

    // Without the named baselines present, fall back to first by order.
    ModelConfig cfg;
    std::vector<RaceObservation> obs = {
        testing::observation("Z9", "Wrekenton", "19/20", 40.0, "2019-10"),
        testing::observation("B2", "Gosforth", "18/19", 41.0, "2018-11"),
    };
    std::vector<RaceContext> ctx = {testing::context("Wrekenton", "19/20", 6, 1, "2019-10"),
                                    testing::context("Gosforth", "18/19", 6, 1, "2018-11")};
    RainfallTable rain;
    for (YearMonth m{2018, 10}; m <= YearMonth{2019, 10}; m = next_month(m)) rain.mm[m] = 10.0;
    auto e = build_design(obs, ctx, rain, cfg);
    CHECK(e.courses.name(0) == "Gosforth");
    CHECK(e.seasons.name(0) == "18/19");
    CHECK(e.athletes.name(0) == "B2");
}

TEST_CASE("level dictionaries are bijective") {
    auto d = testing::toy_design();
    for (const auto* dict : {&d.athletes, &d.courses, &d.seasons})
        for (std::size_t i = 0; i < dict->size(); ++i) CHECK(dict->index(dict->name(i)) == i);
    CHECK_THROWS_AS(d.courses.index("Lambton"), InputError);
    CHECK_THROWS_AS(LevelDictionary({"a", "a"}), InputError);
}

TEST_CASE("centred distance has mean zero") {
    SyntheticSpec spec;
    spec.seed = 11;
    auto data = simulate_dataset(spec);
    auto d = build_design(data.observations, data.races, data.rainfall, ModelConfig{});
    const double mean = std::accumulate(d.distance_c.begin(), d.distance_c.end(), 0.0) / static_cast<double>(d.size());
    CHECK(std::abs(mean) < 1e-12);
    const double wmean =
        std::accumulate(d.windspeed_c.begin(), d.windspeed_c.end(), 0.0) / static_cast<double>(d.size());
    CHECK(std::abs(wmean) < 1e-12);

    ModelConfig fixed;
    fixed.distance_center = 6.0;
    auto e = build_design(data.observations, data.races, data.rainfall, fixed);
    CHECK(e.distance_center == 6.0);
}

TEST_CASE("build_design is deterministic") {
    auto a = testing::toy_design();
    auto b = testing::toy_design();
    CHECK(a.athletes == b.athletes);
    CHECK(a.courses == b.courses);
    CHECK(a.seasons == b.seasons);
    CHECK(a.response_y == b.response_y);
    CHECK(a.distance_c == b.distance_c);
}

TEST_CASE("log-time and log-pace responses differ by ln D") {
    auto t = testing::toy_design(false, Response::log_time);
    auto p = testing::toy_design(false, Response::log_pace);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(p.response_y[i] == t.log_time[i] - t.log_distance[i]);
        CHECK(t.response_y[i] == t.log_time[i]);
        // Adding ln D back is exact up to the one rounding of the subtraction.
        CHECK(std::abs((p.response_y[i] + p.log_distance[i]) - t.response_y[i]) <=
              std::nextafter(t.response_y[i], INFINITY) - t.response_y[i]);
    }
}

TEST_CASE("race_index lists the available races when the race is unknown") {
    auto d = testing::toy_design();
    CHECK(d.race_index("Herrington", "18/19") < d.races.size());
    auto msg = error_of([&] { d.race_index("Lambton", "17/18"); });
    CHECK(msg.find("Alnwick:17/18") != std::string::npos);
}

TEST_CASE("files are not modified by parsing") {
    TempDir dir;
    const std::string text = std::string(kResultsHeader) + "A1,Alnwick,17/18,M,40,2017-10\n";
    spit(dir / "r.csv", text);
    parse_results(dir / "r.csv", Sex::male);
    CHECK(slurp(dir / "r.csv") == text);
}
