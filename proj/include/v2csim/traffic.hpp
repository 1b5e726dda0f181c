#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "v2csim/random.hpp"

namespace v2csim {

struct RoadSegment {
    double length = 2000.0;    // m, ring with wrap-around
    int lane_count = 3;
    double lane_width = 3.5;   // m
    double speed_limit = 36.1; // m/s (130 km/h)

    void validate() const;
    double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
    // forward (wrapped) longitudinal distance from x_from to x_to
    double forward_dx(double x_from, double x_to) const;
    // signed wrapped delta in [-length/2, length/2)
    double wrapped_dx(double x_from, double x_to) const;
    double wrap(double x) const;
};

struct VehicleState {
    int id = 0;
    double x = 0.0;       // longitudinal position, m
    double y = 0.0;       // lateral position, m
    int lane = 0;
    double speed = 0.0;   // m/s
    double accel = 0.0;   // m/s^2
    double heading = 0.0; // rad
    double length = 4.8;  // m
    double width = 1.9;   // m
};

// IDM behavior parameters
struct IdmParams {
    double desired_speed = 27.8;   // m/s
    double time_gap = 1.5;         // s
    double max_accel = 1.5;        // m/s^2
    double comfort_decel = 2.0;    // m/s^2
    double jam_distance = 2.0;     // m
    double accel_exponent = 4.0;
};

// IDM acceleration; gap is bumper-to-bumper distance to the lead (m),
// approach_rate = own speed - lead speed (m/s). No lead: pass nullopt.
double idm_accel(const IdmParams& p, double speed,
                 std::optional<double> gap, double approach_rate);

// equilibrium bumper-to-bumper gap for steady following at `speed`
double idm_equilibrium_gap(const IdmParams& p, double speed);

struct TrafficConfig {
    double inflow_rate = 0.5;        // vehicles/s
    double desired_speed_mean = 25.0;
    double desired_speed_std = 2.0;
    IdmParams behavior;
    double min_entry_gap = 20.0;     // m, clear space required at entry

    void validate(double speed_limit) const;
};

struct Bgv {
    VehicleState state;
    double desired_speed = 25.0;

    // PCM overrides
    bool brake_override = false;
    double brake_decel = 0.0;      // magnitude
    double brake_until = 0.0;      // sim time, s

    bool cutin_active = false;
    double cutin_start = 0.0;
    double cutin_duration = 0.0;
    double cutin_y_from = 0.0;
    double cutin_y_to = 0.0;
    int cutin_target_lane = 0;
};

class World {
public:
    World(const RoadSegment& road, const TrafficConfig& cfg);

    const RoadSegment& road() const { return road_; }
    const std::vector<Bgv>& bgvs() const { return bgvs_; }
    std::vector<Bgv>& bgvs() { return bgvs_; }

    // Poisson arrivals at the segment entry; deferred while the entry is
    // blocked, the pending count carries over.
    void spawn_step(RandomStream& rng, double dt);

    // advance all BGVs one step at sim time `now`; when `ego` is given,
    // BGVs treat it as a potential lead vehicle
    void step(double now, double dt, const VehicleState* ego = nullptr);

    // nearest same-lane vehicle ahead of position x in `lane` (wrapped),
    // excluding vehicle `exclude_id`; nullptr if the lane is empty
    const Bgv* lead_of(double x, int lane, int exclude_id) const;

    int pending_spawns() const { return pending_spawns_; }
    int total_spawned() const { return next_id_; }

private:
    bool entry_blocked(int lane) const;

    RoadSegment road_;
    TrafficConfig cfg_;
    std::vector<Bgv> bgvs_;
    int next_id_ = 0;
    int pending_spawns_ = 0;
};

// quintic lateral profile: position, zero velocity/accel at both ends
double quintic_offset(double y_from, double y_to, double t, double duration);
double quintic_lateral_velocity(double y_from, double y_to, double t, double duration);

}  // namespace v2csim
