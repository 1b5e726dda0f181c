#pragma once

#include <map>
#include <optional>
#include <vector>

#include "v2csim/traffic.hpp"

namespace v2csim {

struct PcmConfig {
    bool enabled = true;
    double d_brake = 30.0;       // m
    double d_cut = 20.0;         // m
    double brake_decel = 6.0;    // m/s^2, magnitude
    double brake_hold = 2.0;     // s
    double cutin_duration = 3.0; // s
    double cooldown = 10.0;      // s

    void validate() const;
};

enum class ConflictKind { EmergencyBrake, CutIn };

struct ConflictEvent {
    ConflictKind kind = ConflictKind::EmergencyBrake;
    int actor_id = 0;
    double start_time = 0.0;
    double end_time = 0.0;
    // cut-ins only: completion time/position (t_cut, p*_cut)
    double completion_x = 0.0;
    double completion_y = 0.0;
};

double euclidean_distance(double ax, double ay, double bx, double by);

struct BrakeCommand {
    int actor_id = 0;
    double decel = 0.0;  // magnitude
};

// Decision functions over immutable snapshots. Distances use the wrapped
// longitudinal delta of the ring road.
std::optional<BrakeCommand> check_emergency_brake(
    const VehicleState& ego, const std::vector<Bgv>& bgvs,
    const RoadSegment& road, const PcmConfig& cfg,
    const std::map<int, double>& cooldown_until, double now);

std::optional<int> select_cutin_candidate(
    const VehicleState& ego, const std::vector<Bgv>& bgvs,
    const RoadSegment& road, const PcmConfig& cfg,
    const std::map<int, double>& cooldown_until, double now);

// Stateful wrapper owned by the run loop: applies commands to BGVs,
// tracks cooldowns and emits ConflictEvents.
class Pcm {
public:
    explicit Pcm(const PcmConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

    // evaluates both triggers and mutates the targeted BGVs
    void step(const VehicleState& ego, World& world, double now);

    const std::vector<ConflictEvent>& events() const { return events_; }
    std::vector<ConflictEvent>& events() { return events_; }
    const PcmConfig& config() const { return cfg_; }

    // called by the run loop once a cut-in actor finishes, to record p*_cut
    void finalize_cutins(const World& world, double now);

private:
    PcmConfig cfg_;
    std::map<int, double> cooldown_until_;
    std::map<int, std::size_t> open_cutin_events_;  // actor -> event index
    std::vector<ConflictEvent> events_;
};

// quintic cut-in trajectory setup; throws if the actor lane is not
// adjacent to ego_lane
ConflictEvent execute_cutin(Bgv& actor, int ego_lane, const RoadSegment& road,
                            const PcmConfig& cfg, double now);

}  // namespace v2csim
