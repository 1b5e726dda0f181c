#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "v2csim/cloud.hpp"
#include "v2csim/metrics.hpp"
#include "v2csim/pcm.hpp"
#include "v2csim/runlog.hpp"

namespace v2csim {

struct ScenarioConfig {
    bool pcm_enabled = true;
    std::string latency_profile = "NL";  // NL/CL/HL or a custom profile name
    double initial_speed = 27.8;         // m/s
    int initial_lane = 1;
    double duration = 120.0;             // s
    std::uint64_t seed = 1;
    double dt = 0.01;                    // s

    RoadSegment road;
    TrafficConfig traffic;
    PcmConfig pcm;
    SutConfig sut;
    EgoDynamics dynamics;
    std::map<std::string, LatencyProfile> profiles;  // name -> profile
    bool abs_psd = true;
    double pet_delta = 1.0;  // m

    ScenarioConfig();
    void validate() const;
    const LatencyProfile& profile() const;
};

struct RunResult {
    RunLog log;
    MetricsReport metrics;
};

// One deterministic closed-loop run: traffic + PCM + latency-bearing
// cloud control of the ego. Continues through collisions.
RunResult run_single(const ScenarioConfig& cfg);

}  // namespace v2csim
