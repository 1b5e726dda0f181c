#include "v2csim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace v2csim {

using nlohmann::json;

namespace {

// pull a field if present, leaving the default otherwise
template <typename T>
void get_opt(const json& j, const char* key, T& out, const std::string& ctx) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("config field '" + ctx + "." + key +
                                    "': " + e.what());
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("config: unknown field '" + ctx + "." +
                                        it.key() + "'");
    }
}

LatencyProfile parse_profile(const std::string& name, const json& j) {
    LatencyProfile p;
    p.name = name;
    check_keys(j, {"type", "family", "params", "queueing"}, "profiles." + name);
    const std::string type = j.value("type", "zero");
    if (type == "zero") {
        p.source = ZeroLatency{};
    } else if (type == "distribution") {
        DistributionSpec spec;
        spec.family = family_from_name(j.at("family").get<std::string>());
        const auto& params = j.at("params");
        switch (spec.family) {
            case Family::Gamma:
                spec.p1 = params.at("shape").get<double>();
                spec.p2 = params.at("scale").get<double>();
                break;
            case Family::Normal:
                spec.p1 = params.at("mean").get<double>();
                spec.p2 = params.at("stddev").get<double>();
                break;
            case Family::Nakagami:
                spec.p1 = params.at("shape").get<double>();
                spec.p2 = params.at("spread").get<double>();
                break;
            case Family::Rayleigh:
                spec.p1 = params.at("scale").get<double>();
                break;
        }
        spec.validate();
        p.source = spec;
    } else if (type == "queueing") {
        QueueingGenerator gen;
        const auto& q = j.at("queueing");
        get_opt(q, "lambda1", gen.lambda1, "profiles." + name);
        get_opt(q, "lambda2", gen.lambda2, "profiles." + name);
        get_opt(q, "mu2", gen.mu2, "profiles." + name);
        get_opt(q, "retx_prob", gen.retx_prob, "profiles." + name);
        get_opt(q, "harq_fixed", gen.harq_fixed, "profiles." + name);
        get_opt(q, "n_max", gen.n_max, "profiles." + name);
        if (q.contains("node_delays")) {
            for (const auto& nd : q.at("node_delays")) {
                NodeDelay d;
                const std::string kind = nd.value("kind", "constant");
                d.kind = kind == "exponential" ? NodeDelay::Kind::Exponential
                                               : NodeDelay::Kind::Constant;
                d.value = nd.at("value").get<double>();
                gen.node_delays.push_back(d);
            }
        }
        gen.validate();
        p.source = gen;
    } else {
        throw std::invalid_argument("config: profile '" + name +
                                    "' has unknown type '" + type + "'");
    }
    return p;
}

json profile_to_json(const LatencyProfile& p) {
    json j;
    if (std::holds_alternative<ZeroLatency>(p.source)) {
        j["type"] = "zero";
    } else if (const auto* spec = std::get_if<DistributionSpec>(&p.source)) {
        j["type"] = "distribution";
        j["family"] = family_name(spec->family);
        json params;
        switch (spec->family) {
            case Family::Gamma:
                params["shape"] = spec->p1;
                params["scale"] = spec->p2;
                break;
            case Family::Normal:
                params["mean"] = spec->p1;
                params["stddev"] = spec->p2;
                break;
            case Family::Nakagami:
                params["shape"] = spec->p1;
                params["spread"] = spec->p2;
                break;
            case Family::Rayleigh:
                params["scale"] = spec->p1;
                break;
        }
        j["params"] = params;
    } else {
        const auto& gen = std::get<QueueingGenerator>(p.source);
        j["type"] = "queueing";
        json q;
        q["lambda1"] = gen.lambda1;
        q["lambda2"] = gen.lambda2;
        q["mu2"] = gen.mu2;
        q["retx_prob"] = gen.retx_prob;
        q["harq_fixed"] = gen.harq_fixed;
        q["n_max"] = gen.n_max;
        json nds = json::array();
        for (const auto& d : gen.node_delays) {
            nds.push_back({{"kind", d.kind == NodeDelay::Kind::Exponential
                                        ? "exponential"
                                        : "constant"},
                           {"value", d.value}});
        }
        q["node_delays"] = nds;
        j["queueing"] = q;
    }
    return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    check_keys(j,
               {"pcm_enabled", "latency_profile", "initial_speed", "initial_lane",
                "duration", "seed", "dt", "road", "traffic", "pcm", "sut",
                "dynamics", "profiles", "abs_psd", "pet_delta"},
               "");
    get_opt(j, "pcm_enabled", cfg.pcm_enabled, "");
    get_opt(j, "latency_profile", cfg.latency_profile, "");
    get_opt(j, "initial_speed", cfg.initial_speed, "");
    get_opt(j, "initial_lane", cfg.initial_lane, "");
    get_opt(j, "duration", cfg.duration, "");
    get_opt(j, "seed", cfg.seed, "");
    get_opt(j, "dt", cfg.dt, "");
    get_opt(j, "abs_psd", cfg.abs_psd, "");
    get_opt(j, "pet_delta", cfg.pet_delta, "");

    if (j.contains("road")) {
        const auto& r = j.at("road");
        check_keys(r, {"length", "lane_count", "lane_width", "speed_limit"}, "road");
        get_opt(r, "length", cfg.road.length, "road");
        get_opt(r, "lane_count", cfg.road.lane_count, "road");
        get_opt(r, "lane_width", cfg.road.lane_width, "road");
        get_opt(r, "speed_limit", cfg.road.speed_limit, "road");
    }
    if (j.contains("traffic")) {
        const auto& t = j.at("traffic");
        check_keys(t,
                   {"inflow_rate", "desired_speed_mean", "desired_speed_std",
                    "time_gap", "max_accel", "comfort_decel", "jam_distance",
                    "min_entry_gap"},
                   "traffic");
        get_opt(t, "inflow_rate", cfg.traffic.inflow_rate, "traffic");
        get_opt(t, "desired_speed_mean", cfg.traffic.desired_speed_mean, "traffic");
        get_opt(t, "desired_speed_std", cfg.traffic.desired_speed_std, "traffic");
        get_opt(t, "time_gap", cfg.traffic.behavior.time_gap, "traffic");
        get_opt(t, "max_accel", cfg.traffic.behavior.max_accel, "traffic");
        get_opt(t, "comfort_decel", cfg.traffic.behavior.comfort_decel, "traffic");
        get_opt(t, "jam_distance", cfg.traffic.behavior.jam_distance, "traffic");
        get_opt(t, "min_entry_gap", cfg.traffic.min_entry_gap, "traffic");
    }
    if (j.contains("pcm")) {
        const auto& p = j.at("pcm");
        check_keys(p,
                   {"d_brake", "d_cut", "brake_decel", "brake_hold",
                    "cutin_duration", "cooldown"},
                   "pcm");
        get_opt(p, "d_brake", cfg.pcm.d_brake, "pcm");
        get_opt(p, "d_cut", cfg.pcm.d_cut, "pcm");
        get_opt(p, "brake_decel", cfg.pcm.brake_decel, "pcm");
        get_opt(p, "brake_hold", cfg.pcm.brake_hold, "pcm");
        get_opt(p, "cutin_duration", cfg.pcm.cutin_duration, "pcm");
        get_opt(p, "cooldown", cfg.pcm.cooldown, "pcm");
    }
    if (j.contains("sut")) {
        const auto& s = j.at("sut");
        check_keys(s,
                   {"time_gap", "max_accel", "max_decel", "emergency_gap",
                    "sensor_range", "jam_distance", "k_gap", "k_speed", "k_free"},
                   "sut");
        get_opt(s, "time_gap", cfg.sut.time_gap, "sut");
        get_opt(s, "max_accel", cfg.sut.max_accel, "sut");
        get_opt(s, "max_decel", cfg.sut.max_decel, "sut");
        get_opt(s, "emergency_gap", cfg.sut.emergency_gap, "sut");
        get_opt(s, "sensor_range", cfg.sut.sensor_range, "sut");
        get_opt(s, "jam_distance", cfg.sut.jam_distance, "sut");
        get_opt(s, "k_gap", cfg.sut.k_gap, "sut");
        get_opt(s, "k_speed", cfg.sut.k_speed, "sut");
        get_opt(s, "k_free", cfg.sut.k_free, "sut");
    }
    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        check_keys(d, {"time_constant", "mass", "lane_change_duration"}, "dynamics");
        get_opt(d, "time_constant", cfg.dynamics.time_constant, "dynamics");
        get_opt(d, "mass", cfg.dynamics.mass, "dynamics");
        get_opt(d, "lane_change_duration", cfg.dynamics.lane_change_duration,
                "dynamics");
    }
    if (j.contains("profiles")) {
        for (auto it = j.at("profiles").begin(); it != j.at("profiles").end(); ++it)
            cfg.profiles[it.key()] = parse_profile(it.key(), it.value());
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["pcm_enabled"] = cfg.pcm_enabled;
    j["latency_profile"] = cfg.latency_profile;
    j["initial_speed"] = cfg.initial_speed;
    j["initial_lane"] = cfg.initial_lane;
    j["duration"] = cfg.duration;
    j["seed"] = cfg.seed;
    j["dt"] = cfg.dt;
    j["abs_psd"] = cfg.abs_psd;
    j["pet_delta"] = cfg.pet_delta;
    j["road"] = {{"length", cfg.road.length},
                 {"lane_count", cfg.road.lane_count},
                 {"lane_width", cfg.road.lane_width},
                 {"speed_limit", cfg.road.speed_limit}};
    j["traffic"] = {{"inflow_rate", cfg.traffic.inflow_rate},
                    {"desired_speed_mean", cfg.traffic.desired_speed_mean},
                    {"desired_speed_std", cfg.traffic.desired_speed_std},
                    {"time_gap", cfg.traffic.behavior.time_gap},
                    {"max_accel", cfg.traffic.behavior.max_accel},
                    {"comfort_decel", cfg.traffic.behavior.comfort_decel},
                    {"jam_distance", cfg.traffic.behavior.jam_distance},
                    {"min_entry_gap", cfg.traffic.min_entry_gap}};
    j["pcm"] = {{"d_brake", cfg.pcm.d_brake},
                {"d_cut", cfg.pcm.d_cut},
                {"brake_decel", cfg.pcm.brake_decel},
                {"brake_hold", cfg.pcm.brake_hold},
                {"cutin_duration", cfg.pcm.cutin_duration},
                {"cooldown", cfg.pcm.cooldown}};
    j["sut"] = {{"time_gap", cfg.sut.time_gap},
                {"max_accel", cfg.sut.max_accel},
                {"max_decel", cfg.sut.max_decel},
                {"emergency_gap", cfg.sut.emergency_gap},
                {"sensor_range", cfg.sut.sensor_range},
                {"jam_distance", cfg.sut.jam_distance},
                {"k_gap", cfg.sut.k_gap},
                {"k_speed", cfg.sut.k_speed},
                {"k_free", cfg.sut.k_free}};
    j["dynamics"] = {{"time_constant", cfg.dynamics.time_constant},
                     {"mass", cfg.dynamics.mass},
                     {"lane_change_duration", cfg.dynamics.lane_change_duration}};
    json profiles;
    for (const auto& [name, p] : cfg.profiles) profiles[name] = profile_to_json(p);
    j["profiles"] = profiles;
    return j.dump(2);
}

std::string metrics_to_json(const MetricsReport& m) {
    json j;
    j["cr"] = m.cr;
    j["f_crit_dhw"] = m.f_crit_dhw;
    if (m.f_crit_pet)
        j["f_crit_pet"] = *m.f_crit_pet;
    else
        j["f_crit_pet"] = nullptr;
    j["e_sens"] = m.e_sens;
    j["counts"] = {{"n_dhw_below", m.n_dhw_below},
                   {"n_total", m.n_total},
                   {"n_pet_below", m.n_pet_below},
                   {"n_cutin", m.n_cutin},
                   {"n_collisions", m.n_collisions}};
    j["distance_km"] = m.distance_km;
    return j.dump(2);
}

std::string fit_result_to_json(const FitResult& r) {
    json j;
    j["family"] = family_name(r.spec.family);
    switch (r.spec.family) {
        case Family::Gamma:
            j["params"] = {{"shape", r.spec.p1}, {"scale", r.spec.p2}};
            break;
        case Family::Normal:
            j["params"] = {{"mean", r.spec.p1}, {"stddev", r.spec.p2}};
            break;
        case Family::Nakagami:
            j["params"] = {{"shape", r.spec.p1}, {"spread", r.spec.p2}};
            break;
        case Family::Rayleigh:
            j["params"] = {{"scale", r.spec.p1}};
            break;
    }
    j["sse"] = r.sse;
    return j.dump(2);
}

}  // namespace v2csim
