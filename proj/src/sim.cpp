#include "v2csim/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace v2csim {

ScenarioConfig::ScenarioConfig() {
    profiles["NL"] = LatencyProfile{"NL", ZeroLatency{}};
    // CL/HL shapes are configurable placeholders, not measured ground truth
    profiles["CL"] = LatencyProfile{
        "CL", DistributionSpec{Family::Gamma, 4.0, 7.5}};   // 30 ms per leg
    profiles["HL"] = LatencyProfile{
        "HL", DistributionSpec{Family::Gamma, 4.0, 15.0}};  // 60 ms per leg
}

void ScenarioConfig::validate() const {
    if (duration <= 0.0) throw std::invalid_argument("scenario: duration must be > 0");
    if (dt <= 0.0) throw std::invalid_argument("scenario: dt must be > 0");
    if (initial_speed <= 0.0)
        throw std::invalid_argument("scenario: initial_speed must be > 0");
    road.validate();
    if (initial_lane < 0 || initial_lane >= road.lane_count)
        throw std::invalid_argument("scenario: initial_lane out of range");
    traffic.validate(road.speed_limit);
    pcm.validate();
    sut.validate();
    dynamics.validate();
    if (!profiles.count(latency_profile))
        throw std::invalid_argument("scenario: unknown latency profile '" +
                                    latency_profile + "'");
}

const LatencyProfile& ScenarioConfig::profile() const {
    auto it = profiles.find(latency_profile);
    if (it == profiles.end())
        throw std::invalid_argument("scenario: unknown latency profile '" +
                                    latency_profile + "'");
    return it->second;
}

RunResult run_single(const ScenarioConfig& cfg) {
    cfg.validate();

    // separate streams so the traffic realization for a seed is identical
    // across latency profiles (common random numbers for paired contrasts)
    RandomStream world_rng(cfg.seed);
    RandomStream channel_rng(derive_seed(cfg.seed, 0x9e3779b97f4a7c15ULL));
    World world(cfg.road, cfg.traffic);

    PcmConfig pcm_cfg = cfg.pcm;
    pcm_cfg.enabled = cfg.pcm_enabled;
    Pcm pcm(pcm_cfg);

    SutConfig sut = cfg.sut;
    sut.desired_speed = cfg.initial_speed;
    sut.travel_lane = cfg.initial_lane;

    VehicleState ego;
    ego.id = -1;
    ego.lane = cfg.initial_lane;
    ego.x = 100.0;
    ego.y = cfg.road.lane_center(cfg.initial_lane);
    ego.speed = cfg.initial_speed;
    EgoActuation act;

    RunResult result;
    RunLog& log = result.log;
    log.dt = cfg.dt;
    log.road_length = cfg.road.length;

    Channel<Perception> uplink(MessageKind::StateUp, &log.channel_trace);
    Channel<ControlCommand> downlink(MessageKind::CommandDown, &log.channel_trace);
    const LatencyProfile& profile = cfg.profile();

    std::optional<Perception> cloud_view;  // freshest perception at the cloud
    ControlCommand held_cmd;               // hold-last between deliveries

    const long n_steps = static_cast<long>(std::llround(cfg.duration / cfg.dt));
    double distance_m = 0.0;

    for (long step = 0; step < n_steps; ++step) {
        const double now = static_cast<double>(step) * cfg.dt;

        // cloud: ingest uplink, compute and send a command every step
        for (auto& p : uplink.poll(now)) cloud_view = std::move(p);
        if (cloud_view) {
            ControlCommand cmd = sut_step(*cloud_view, sut, cfg.road, now);
            downlink.send(cmd, now, profile, channel_rng);
        }

        // ego: latest delivered command wins
        for (auto& c : downlink.poll(now)) held_cmd = c;

        // conflict triggers act on the true world
        pcm.step(ego, world, now);

        // record the pre-advance state at time `now`
        StepRecord rec;
        rec.time = now;
        rec.ego = ego;
        rec.ego_accel = ego.accel;
        rec.bgvs.reserve(world.bgvs().size());
        for (const auto& b : world.bgvs()) rec.bgvs.push_back(b.state);
        log.steps.push_back(std::move(rec));

        // uplink: perception of the world at time `now`
        uplink.send(ideal_sensor(world, ego, sut.sensor_range, now), now,
                    profile, channel_rng);

        // advance
        world.spawn_step(world_rng, cfg.dt);
        world.step(now, cfg.dt, &ego);
        ego_step(ego, act, held_cmd, cfg.dynamics, cfg.road, now, cfg.dt);
        distance_m += ego.speed * cfg.dt;

        pcm.finalize_cutins(world, now + cfg.dt);
    }

    log.conflicts = pcm.events();
    log.total_distance_km = distance_m / 1000.0;
    log.collisions = detect_collisions(log);

    result.metrics = compute_metrics(log, 50.0, 1.0, cfg.pet_delta, cfg.abs_psd);
    return result;
}

}  // namespace v2csim
