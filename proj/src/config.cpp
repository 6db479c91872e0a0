#include "xcmix/config.hpp"

#include "xcmix/error.hpp"

#include <initializer_list>

namespace xcmix {

using nlohmann::json;

std::string_view to_string(Response r) {
    return r == Response::log_time ? "log_time" : "log_pace";
}

Response parse_response(std::string_view text) {
    if (text == "log_time" || text == "log-time") return Response::log_time;
    if (text == "log_pace" || text == "log-pace") return Response::log_pace;
    throw InputError("unknown response '" + std::string(text) + "', expected log-time or log-pace");
}

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw InputError(std::string(what) + " must be > 0");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) throw InputError("config: '" + std::string(where) + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw InputError("config: unknown key '" + it.key() + "' in '" + std::string(where) + "'");
    }
}

template <class T>
void read_field(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

json normal_json(const NormalPrior& p) { return {{"mean", p.mean}, {"variance", p.variance}}; }
json gamma_json(const GammaPrior& p) { return {{"shape", p.shape}, {"rate", p.rate}}; }

void read_normal(const json& obj, const char* key, NormalPrior& p) {
    if (!obj.contains(key)) return;
    const auto& sub = obj.at(key);
    check_keys(sub, {"mean", "variance"}, key);
    read_field(sub, "mean", p.mean);
    read_field(sub, "variance", p.variance);
}

void read_variance(const json& obj, const char* key, double& v) {
    if (!obj.contains(key)) return;
    const auto& sub = obj.at(key);
    check_keys(sub, {"variance"}, key);
    read_field(sub, "variance", v);
}

void read_gamma(const json& obj, const char* key, GammaPrior& p) {
    if (!obj.contains(key)) return;
    const auto& sub = obj.at(key);
    check_keys(sub, {"shape", "rate"}, key);
    read_field(sub, "shape", p.shape);
    read_field(sub, "rate", p.rate);
}

} // namespace

void PriorConfig::validate() const {
    require_positive(intercept.variance, "intercept prior variance");
    require_positive(distance.variance, "distance prior variance");
    require_positive(windspeed.variance, "windspeed prior variance");
    require_positive(rain_current_variance, "current-rainfall prior variance");
    require_positive(rain_previous_variance, "previous-rainfall prior variance");
    require_positive(hypermean_variance, "rainfall hyper-mean prior variance");
    for (auto [g, name] : {std::pair{phi, "phi"}, std::pair{tau_athlete, "tau_athlete"},
                           std::pair{tau_course, "tau_course"}, std::pair{tau_season, "tau_season"},
                           std::pair{tau_obs, "tau_obs"}}) {
        require_positive(g.shape, (std::string(name) + " prior shape").c_str());
        require_positive(g.rate, (std::string(name) + " prior rate").c_str());
    }
    if (phi.shape > phi.rate) throw InputError("phi prior requires shape <= rate");
}

void McmcSchedule::validate() const {
    if (thin < 1) throw InputError("thin must be >= 1");
    if (iterations < thin) throw InputError("iterations must be >= thin");
    if (iterations % thin != 0) throw InputError("iterations must be divisible by thin");
    if (refresh_every < 1) throw InputError("refresh_every must be >= 1");
}

void ModelConfig::validate() const {
    priors.validate();
    mcmc.validate();
}

json to_json(const ModelConfig& cfg) {
    const auto& p = cfg.priors;
    json doc = {
        {"response", std::string(to_string(cfg.response))},
        {"include_windspeed", cfg.include_windspeed},
        {"centering",
         {{"distance", cfg.distance_center ? json(*cfg.distance_center) : json(nullptr)},
          {"windspeed", cfg.windspeed_center ? json(*cfg.windspeed_center) : json(nullptr)}}},
        {"priors",
         {{"intercept", normal_json(p.intercept)},
          {"distance", normal_json(p.distance)},
          {"windspeed", normal_json(p.windspeed)},
          {"rain_current", {{"variance", p.rain_current_variance}}},
          {"rain_previous", {{"variance", p.rain_previous_variance}}},
          {"rain_hypermean", {{"variance", p.hypermean_variance}}},
          {"phi", gamma_json(p.phi)},
          {"tau_athlete", gamma_json(p.tau_athlete)},
          {"tau_course", gamma_json(p.tau_course)},
          {"tau_season", gamma_json(p.tau_season)},
          {"tau_obs", gamma_json(p.tau_obs)}}},
        {"mcmc",
         {{"burn_in", cfg.mcmc.burn_in},
          {"iterations", cfg.mcmc.iterations},
          {"thin", cfg.mcmc.thin},
          {"seed", cfg.mcmc.seed},
          {"refresh_every", cfg.mcmc.refresh_every},
          {"block_fixed_effects", cfg.mcmc.block_fixed_effects}}},
    };
    return doc;
}

ModelConfig config_from_json(const json& doc, ModelConfig cfg) {
    check_keys(doc, {"response", "include_windspeed", "centering", "priors", "mcmc"}, "<root>");
    if (doc.contains("response")) {
        std::string r;
        read_field(doc, "response", r);
        cfg.response = parse_response(r);
    }
    read_field(doc, "include_windspeed", cfg.include_windspeed);
    if (doc.contains("centering")) {
        const auto& c = doc.at("centering");
        check_keys(c, {"distance", "windspeed"}, "centering");
        auto read_opt = [&](const char* key, std::optional<double>& out) {
            if (!c.contains(key)) return;
            if (c.at(key).is_null()) {
                out.reset();
            } else {
                double v = 0.0;
                read_field(c, key, v);
                out = v;
            }
        };
        read_opt("distance", cfg.distance_center);
        read_opt("windspeed", cfg.windspeed_center);
    }
    if (doc.contains("priors")) {
        const auto& p = doc.at("priors");
        check_keys(p,
                   {"intercept", "distance", "windspeed", "rain_current", "rain_previous", "rain_hypermean",
                    "phi", "tau_athlete", "tau_course", "tau_season", "tau_obs"},
                   "priors");
        auto& q = cfg.priors;
        read_normal(p, "intercept", q.intercept);
        read_normal(p, "distance", q.distance);
        read_normal(p, "windspeed", q.windspeed);
        read_variance(p, "rain_current", q.rain_current_variance);
        read_variance(p, "rain_previous", q.rain_previous_variance);
        read_variance(p, "rain_hypermean", q.hypermean_variance);
        read_gamma(p, "phi", q.phi);
        read_gamma(p, "tau_athlete", q.tau_athlete);
        read_gamma(p, "tau_course", q.tau_course);
        read_gamma(p, "tau_season", q.tau_season);
        read_gamma(p, "tau_obs", q.tau_obs);
    }
    if (doc.contains("mcmc")) {
        const auto& m = doc.at("mcmc");
        check_keys(m, {"burn_in", "iterations", "thin", "seed", "refresh_every", "block_fixed_effects"}, "mcmc");
        read_field(m, "burn_in", cfg.mcmc.burn_in);
        read_field(m, "iterations", cfg.mcmc.iterations);
        read_field(m, "thin", cfg.mcmc.thin);
        read_field(m, "seed", cfg.mcmc.seed);
        read_field(m, "refresh_every", cfg.mcmc.refresh_every);
        read_field(m, "block_fixed_effects", cfg.mcmc.block_fixed_effects);
    }
    return cfg;
}

} // namespace xcmix
