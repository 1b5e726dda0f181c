#include "v2csim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2csim {

void RoadSegment::validate() const {
    if (length <= 0.0) throw std::invalid_argument("road: length must be > 0");
    if (lane_count < 2) throw std::invalid_argument("road: lane_count must be >= 2");
    if (lane_width <= 0.0) throw std::invalid_argument("road: lane_width must be > 0");
    if (speed_limit <= 0.0) throw std::invalid_argument("road: speed_limit must be > 0");
}

double RoadSegment::wrap(double x) const {
    x = std::fmod(x, length);
    if (x < 0.0) x += length;
    return x;
}

double RoadSegment::forward_dx(double x_from, double x_to) const {
    double d = std::fmod(x_to - x_from, length);
    if (d < 0.0) d += length;
    return d;
}

double RoadSegment::wrapped_dx(double x_from, double x_to) const {
    double d = forward_dx(x_from, x_to);
    if (d >= length / 2.0) d -= length;
    return d;
}

double idm_accel(const IdmParams& p, double speed,
                 std::optional<double> gap, double approach_rate) {
    const double free_term =
        std::pow(std::max(speed, 0.0) / p.desired_speed, p.accel_exponent);
    double interaction = 0.0;
    if (gap.has_value()) {
        const double s = std::max(*gap, 0.1);
        const double s_star = p.jam_distance + std::max(0.0, speed * p.time_gap) +
                              speed * approach_rate /
                                  (2.0 * std::sqrt(p.max_accel * p.comfort_decel));
        interaction = (s_star / s) * (s_star / s);
    }
    return p.max_accel * (1.0 - free_term - interaction);
}

double idm_equilibrium_gap(const IdmParams& p, double speed) {
    const double s_star = p.jam_distance + speed * p.time_gap;
    const double free_term = std::pow(speed / p.desired_speed, p.accel_exponent);
    return s_star / std::sqrt(1.0 - free_term);
}

void TrafficConfig::validate(double speed_limit) const {
    if (inflow_rate < 0.0) throw std::invalid_argument("traffic: inflow_rate must be >= 0");
    if (desired_speed_mean <= 0.0 || desired_speed_std <= 0.0)
        throw std::invalid_argument("traffic: desired speed parameters must be > 0");
    if (desired_speed_mean > speed_limit + 3.0 * desired_speed_std)
        throw std::invalid_argument("traffic: desired_speed_mean exceeds speed limit band");
    if (behavior.time_gap <= 0.0 || behavior.max_accel <= 0.0 ||
        behavior.comfort_decel <= 0.0 || behavior.jam_distance <= 0.0)
        throw std::invalid_argument("traffic: behavior parameters must be > 0");
}

World::World(const RoadSegment& road, const TrafficConfig& cfg)
    : road_(road), cfg_(cfg) {
    road_.validate();
    cfg_.validate(road_.speed_limit);
}

bool World::entry_blocked(int lane) const {
    for (const auto& b : bgvs_) {
        if (b.state.lane != lane) continue;
        const double d = road_.forward_dx(0.0, b.state.x);
        if (d < cfg_.min_entry_gap || road_.length - d < cfg_.min_entry_gap / 2.0)
            return true;
    }
    return false;
}

void World::spawn_step(RandomStream& rng, double dt) {
    if (cfg_.inflow_rate > 0.0)
        pending_spawns_ += rng.poisson(cfg_.inflow_rate * dt);
    while (pending_spawns_ > 0) {
        const int lane = static_cast<int>(rng.uniform() * road_.lane_count) % road_.lane_count;
        if (entry_blocked(lane)) break;  // deferred, count conserved
        Bgv b;
        b.state.id = next_id_++;
        b.state.lane = lane;
        b.state.x = 0.0;
        b.state.y = road_.lane_center(lane);
        b.desired_speed = rng.truncated_normal(cfg_.desired_speed_mean,
                                               cfg_.desired_speed_std);
        b.state.speed = b.desired_speed;
        bgvs_.push_back(b);
        --pending_spawns_;
    }
}

const Bgv* World::lead_of(double x, int lane, int exclude_id) const {
    const Bgv* best = nullptr;
    double best_d = road_.length + 1.0;
    for (const auto& b : bgvs_) {
        if (b.state.id == exclude_id || b.state.lane != lane) continue;
        const double d = road_.forward_dx(x, b.state.x);
        if (d > 0.0 && d < best_d) {
            best_d = d;
            best = &b;
        }
    }
    return best;
}

void World::step(double now, double dt, const VehicleState* ego) {
    if (dt <= 0.0) throw std::invalid_argument("world step: dt must be > 0");

    // decide accelerations against the pre-step snapshot
    std::vector<double> accels(bgvs_.size());
    for (std::size_t i = 0; i < bgvs_.size(); ++i) {
        Bgv& b = bgvs_[i];
        if (b.brake_override && now < b.brake_until) {
            accels[i] = -b.brake_decel;
            continue;
        }
        b.brake_override = b.brake_override && now < b.brake_until;
        if (b.cutin_active) {
            accels[i] = 0.0;  // hold speed through the maneuver
            continue;
        }
        IdmParams p = cfg_.behavior;
        p.desired_speed = b.desired_speed;
        const Bgv* lead = lead_of(b.state.x, b.state.lane, b.state.id);
        std::optional<double> gap;
        double approach = 0.0;
        if (lead) {
            gap = road_.forward_dx(b.state.x, lead->state.x) -
                  0.5 * (b.state.length + lead->state.length);
            approach = b.state.speed - lead->state.speed;
        }
        if (ego && ego->lane == b.state.lane) {
            const double ego_d = road_.forward_dx(b.state.x, ego->x);
            const double ego_gap = ego_d - 0.5 * (b.state.length + ego->length);
            if (ego_d > 0.0 && (!gap.has_value() || ego_gap < *gap)) {
                gap = ego_gap;
                approach = b.state.speed - ego->speed;
            }
        }
        accels[i] = idm_accel(p, b.state.speed, gap, approach);
    }

    // semi-implicit Euler, speed clamped at 0
    for (std::size_t i = 0; i < bgvs_.size(); ++i) {
        Bgv& b = bgvs_[i];
        b.state.accel = accels[i];
        b.state.speed = std::max(0.0, b.state.speed + accels[i] * dt);
        b.state.x = road_.wrap(b.state.x + b.state.speed * dt);

        if (b.cutin_active) {
            const double t = now + dt - b.cutin_start;
            b.state.y = quintic_offset(b.cutin_y_from, b.cutin_y_to, t, b.cutin_duration);
            // lane index flips once the lane boundary is crossed
            const double boundary = 0.5 * (b.cutin_y_from + b.cutin_y_to);
            if ((b.cutin_y_to > b.cutin_y_from && b.state.y >= boundary) ||
                (b.cutin_y_to < b.cutin_y_from && b.state.y <= boundary))
                b.state.lane = b.cutin_target_lane;
            if (t >= b.cutin_duration) {
                b.cutin_active = false;
                b.state.y = b.cutin_y_to;
                b.state.lane = b.cutin_target_lane;
            }
        }
    }
}

double quintic_offset(double y_from, double y_to, double t, double duration) {
    if (t <= 0.0) return y_from;
    if (t >= duration) return y_to;
    const double tau = t / duration;
    const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
    return y_from + (y_to - y_from) * s;
}

double quintic_lateral_velocity(double y_from, double y_to, double t, double duration) {
    if (t <= 0.0 || t >= duration) return 0.0;
    const double tau = t / duration;
    const double ds = tau * tau * (30.0 + tau * (-60.0 + 30.0 * tau));
    return (y_to - y_from) * ds / duration;
}

}  // namespace v2csim
