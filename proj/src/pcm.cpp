#include "v2csim/pcm.hpp"

#include <cmath>
#include <stdexcept>

namespace v2csim {

void PcmConfig::validate() const {
    if (d_brake <= 0.0 || d_cut <= 0.0)
        throw std::invalid_argument("pcm: thresholds must be > 0");
    if (brake_decel <= 0.0 || brake_hold <= 0.0)
        throw std::invalid_argument("pcm: brake parameters must be > 0");
    if (cutin_duration <= 0.0)
        throw std::invalid_argument("pcm: cutin_duration must be > 0");
    if (cooldown < 0.0)
        throw std::invalid_argument("pcm: cooldown must be >= 0");
}

double euclidean_distance(double ax, double ay, double bx, double by) {
    return std::hypot(ax - bx, ay - by);
}

namespace {

double ring_distance(const RoadSegment& road, const VehicleState& a,
                     const VehicleState& b) {
    return std::hypot(road.wrapped_dx(a.x, b.x), b.y - a.y);
}

bool in_cooldown(const std::map<int, double>& cooldown_until, int id, double now) {
    auto it = cooldown_until.find(id);
    return it != cooldown_until.end() && now < it->second;
}

}  // namespace

std::optional<BrakeCommand> check_emergency_brake(
    const VehicleState& ego, const std::vector<Bgv>& bgvs,
    const RoadSegment& road, const PcmConfig& cfg,
    const std::map<int, double>& cooldown_until, double now) {
    if (!cfg.enabled) return std::nullopt;

    // lead = nearest same-lane BGV ahead of the ego
    const Bgv* lead = nullptr;
    double lead_fwd = road.length + 1.0;
    for (const auto& b : bgvs) {
        if (b.state.lane != ego.lane) continue;
        const double d = road.forward_dx(ego.x, b.state.x);
        if (d > 0.0 && d < lead_fwd) {
            lead_fwd = d;
            lead = &b;
        }
    }
    if (!lead) return std::nullopt;

    const double d = ring_distance(road, ego, lead->state);
    if (d >= cfg.d_brake) return std::nullopt;  // strict d(t) < D_brake
    if (in_cooldown(cooldown_until, lead->state.id, now)) return std::nullopt;
    return BrakeCommand{lead->state.id, cfg.brake_decel};
}

std::optional<int> select_cutin_candidate(
    const VehicleState& ego, const std::vector<Bgv>& bgvs,
    const RoadSegment& road, const PcmConfig& cfg,
    const std::map<int, double>& cooldown_until, double now) {
    if (!cfg.enabled) return std::nullopt;

    // argmin of d over the candidate set, ties broken by smallest id
    std::optional<int> best;
    double best_d = 0.0;
    for (const auto& b : bgvs) {
        if (std::abs(b.state.lane - ego.lane) != 1) continue;  // adjacent lanes only
        if (b.cutin_active) continue;
        if (in_cooldown(cooldown_until, b.state.id, now)) continue;
        const double d = ring_distance(road, ego, b.state);
        if (d >= cfg.d_cut) continue;  // strict d_i(t) < D_cut
        if (!best || d < best_d || (d == best_d && b.state.id < *best)) {
            best = b.state.id;
            best_d = d;
        }
    }
    return best;
}

ConflictEvent execute_cutin(Bgv& actor, int ego_lane, const RoadSegment& road,
                            const PcmConfig& cfg, double now) {
    if (std::abs(actor.state.lane - ego_lane) != 1)
        throw std::invalid_argument("execute_cutin: actor not in a lane adjacent to ego");
    actor.cutin_active = true;
    actor.cutin_start = now;
    actor.cutin_duration = cfg.cutin_duration;
    actor.cutin_y_from = actor.state.y;
    actor.cutin_y_to = road.lane_center(ego_lane);
    actor.cutin_target_lane = ego_lane;

    ConflictEvent ev;
    ev.kind = ConflictKind::CutIn;
    ev.actor_id = actor.state.id;
    ev.start_time = now;
    ev.end_time = now + cfg.cutin_duration;  // t_cut
    return ev;
}

void Pcm::step(const VehicleState& ego, World& world, double now) {
    if (!cfg_.enabled) return;

    if (auto cmd = check_emergency_brake(ego, world.bgvs(), world.road(), cfg_,
                                         cooldown_until_, now)) {
        for (auto& b : world.bgvs()) {
            if (b.state.id != cmd->actor_id) continue;
            // one active event per actor
            if (b.cutin_active || (b.brake_override && now < b.brake_until)) break;
            b.brake_override = true;
            b.brake_decel = cmd->decel;
            b.brake_until = now + cfg_.brake_hold;
            cooldown_until_[b.state.id] = now + cfg_.brake_hold + cfg_.cooldown;
            ConflictEvent ev;
            ev.kind = ConflictKind::EmergencyBrake;
            ev.actor_id = b.state.id;
            ev.start_time = now;
            ev.end_time = now + cfg_.brake_hold;
            events_.push_back(ev);
            break;
        }
    }

    if (auto id = select_cutin_candidate(ego, world.bgvs(), world.road(), cfg_,
                                         cooldown_until_, now)) {
        for (auto& b : world.bgvs()) {
            if (b.state.id != *id) continue;
            if (b.cutin_active || (b.brake_override && now < b.brake_until)) break;
            ConflictEvent ev = execute_cutin(b, ego.lane, world.road(), cfg_, now);
            cooldown_until_[b.state.id] = ev.end_time + cfg_.cooldown;
            open_cutin_events_[b.state.id] = events_.size();
            events_.push_back(ev);
            break;
        }
    }
}

void Pcm::finalize_cutins(const World& world, double now) {
    for (auto it = open_cutin_events_.begin(); it != open_cutin_events_.end();) {
        ConflictEvent& ev = events_[it->second];
        if (now < ev.end_time) {
            ++it;
            continue;
        }
        for (const auto& b : world.bgvs()) {
            if (b.state.id == ev.actor_id) {
                ev.completion_x = b.state.x;
                ev.completion_y = b.state.y;
                break;
            }
        }
        it = open_cutin_events_.erase(it);
    }
}

}  // namespace v2csim
