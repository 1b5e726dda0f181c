#pragma once

#include <string>
#include <vector>

#include "v2csim/cloud.hpp"
#include "v2csim/pcm.hpp"
#include "v2csim/traffic.hpp"

namespace v2csim {

struct StepRecord {
    double time = 0.0;
    VehicleState ego;
    std::vector<VehicleState> bgvs;
    double ego_accel = 0.0;  // achieved
};

struct CollisionEvent {
    double time = 0.0;
    int partner_id = 0;
    double overlap_depth = 0.0;  // m
};

struct RunLog {
    double dt = 0.01;
    double road_length = 0.0;  // ring wrap, needed by distance metrics
    std::vector<StepRecord> steps;
    std::vector<ConflictEvent> conflicts;
    std::vector<CollisionEvent> collisions;
    std::vector<ChannelTraceEntry> channel_trace;
    double total_distance_km = 0.0;
};

// time,ego_x,ego_y,ego_lane,ego_speed,ego_accel plus bgv_<id>_* columns
void write_runlog_csv(const RunLog& log, const std::string& path);

// time, kind, actor_id, t_cut, p*_cut
void write_events_csv(const RunLog& log, const std::string& path);

// direction, seq, send_time, delivery_time, dropped
void write_channel_csv(const RunLog& log, const std::string& path);

}  // namespace v2csim
