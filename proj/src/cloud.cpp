#include "v2csim/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2csim {

void SutConfig::validate() const {
    if (time_gap <= 0.0 || desired_speed <= 0.0 || max_accel <= 0.0 ||
        max_decel <= 0.0 || emergency_gap <= 0.0 || sensor_range <= 0.0 ||
        jam_distance <= 0.0 || k_gap <= 0.0 || k_speed <= 0.0 || k_free <= 0.0)
        throw std::invalid_argument("sut config: all parameters must be > 0");
    if (travel_lane < 0)
        throw std::invalid_argument("sut config: travel_lane must be >= 0");
}

void EgoDynamics::validate() const {
    if (time_constant <= 0.0) throw std::invalid_argument("ego dynamics: time constant must be > 0");
    if (mass <= 0.0) throw std::invalid_argument("ego dynamics: mass must be > 0");
    if (lane_change_duration <= 0.0)
        throw std::invalid_argument("ego dynamics: lane_change_duration must be > 0");
}

Perception ideal_sensor(const World& world, const VehicleState& ego,
                        double range, double now) {
    if (range <= 0.0) throw std::invalid_argument("ideal_sensor: range must be > 0");
    Perception p;
    p.ego = ego;
    p.sensed_at = now;
    const RoadSegment& road = world.road();
    for (const auto& b : world.bgvs()) {
        const double d = std::hypot(road.wrapped_dx(ego.x, b.state.x),
                                    b.state.y - ego.y);
        if (d < range) p.bgvs.push_back(b.state);  // strictly within range
    }
    return p;
}

ControlCommand sut_step(const Perception& perceived, const SutConfig& cfg,
                        const RoadSegment& road, double now) {
    cfg.validate();
    const VehicleState& ego = perceived.ego;

    // nearest perceived same-lane lead
    const VehicleState* lead = nullptr;
    double lead_fwd = road.length + 1.0;
    for (const auto& b : perceived.bgvs) {
        if (b.lane != ego.lane) continue;
        const double d = road.forward_dx(ego.x, b.x);
        if (d > 0.0 && d < lead_fwd) {
            lead_fwd = d;
            lead = &b;
        }
    }

    ControlCommand cmd;
    cmd.issued_at = now;

    // free-flow speed tracking; gap control takes over near a lead
    double accel = cfg.k_free * (cfg.desired_speed - ego.speed);
    if (lead) {
        const double gap = lead_fwd - 0.5 * (ego.length + lead->length);
        // emergency branch: predicted time gap below the trigger
        const double closing_speed = std::max(ego.speed, 0.1);
        if (gap / closing_speed < cfg.emergency_gap) {
            cmd.target_accel = -cfg.max_decel;
            return cmd;
        }
        const double desired_gap = cfg.jam_distance + ego.speed * cfg.time_gap;
        const double a_follow = cfg.k_gap * (gap - desired_gap) +
                                cfg.k_speed * (lead->speed - ego.speed);
        accel = std::min(accel, a_follow);
    }
    cmd.target_accel = std::clamp(accel, -cfg.max_decel, cfg.max_accel);

    // lane change only to recover the configured travel lane when free
    if (ego.lane != cfg.travel_lane && std::abs(ego.lane - cfg.travel_lane) == 1) {
        bool free = true;
        for (const auto& b : perceived.bgvs) {
            if (b.lane != cfg.travel_lane) continue;
            const double dx = road.wrapped_dx(ego.x, b.x);
            if (std::fabs(dx) < cfg.jam_distance + ego.speed * cfg.time_gap) {
                free = false;
                break;
            }
        }
        if (free) cmd.lane_change = cfg.travel_lane;
    }
    return cmd;
}

void ego_step(VehicleState& ego, EgoActuation& act, const ControlCommand& cmd,
              const EgoDynamics& dyn, const RoadSegment& road, double now, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("ego_step: dt must be > 0");
    dyn.validate();

    // exact discrete solution of the first-order lag
    const double alpha = std::exp(-dt / dyn.time_constant);
    ego.accel = cmd.target_accel + (ego.accel - cmd.target_accel) * alpha;

    double new_speed = ego.speed + ego.accel * dt;
    if (new_speed < 0.0) {
        new_speed = 0.0;
        ego.accel = 0.0;
    }
    ego.speed = new_speed;
    ego.x = road.wrap(ego.x + ego.speed * dt);

    if (!act.lane_change_active && cmd.lane_change &&
        *cmd.lane_change != ego.lane) {
        act.lane_change_active = true;
        act.lc_start = now;
        act.lc_y_from = ego.y;
        act.lc_y_to = road.lane_center(*cmd.lane_change);
        act.lc_target_lane = *cmd.lane_change;
    }
    if (act.lane_change_active) {
        const double t = now + dt - act.lc_start;
        ego.y = quintic_offset(act.lc_y_from, act.lc_y_to, t, dyn.lane_change_duration);
        const double boundary = 0.5 * (act.lc_y_from + act.lc_y_to);
        if ((act.lc_y_to > act.lc_y_from && ego.y >= boundary) ||
            (act.lc_y_to < act.lc_y_from && ego.y <= boundary))
            ego.lane = act.lc_target_lane;
        if (t >= dyn.lane_change_duration) {
            act.lane_change_active = false;
            ego.y = act.lc_y_to;
            ego.lane = act.lc_target_lane;
        }
    }
}

double approximate_moi(double i_meas_ref, double i_cub_ref, double i_cub_ego) {
    if (i_meas_ref <= 0.0 || i_cub_ref <= 0.0 || i_cub_ego <= 0.0)
        throw std::invalid_argument("approximate_moi: inputs must be > 0");
    return i_cub_ego * (i_meas_ref / i_cub_ref);
}

double damping_coefficient(double zeta, double k_s, double quarter_mass) {
    if (zeta < 0.0 || k_s <= 0.0 || quarter_mass <= 0.0)
        throw std::invalid_argument("damping_coefficient: invalid inputs");
    return 2.0 * zeta * std::sqrt(k_s * quarter_mass);
}

}  // namespace v2csim
