#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "v2csim/latency.hpp"
#include "v2csim/traffic.hpp"

namespace v2csim {

struct ControlCommand {
    double target_accel = 0.0;            // m/s^2
    std::optional<int> lane_change;       // target lane
    double issued_at = 0.0;               // cloud clock, s
};

struct Perception {
    VehicleState ego;
    std::vector<VehicleState> bgvs;
    double sensed_at = 0.0;  // s
};

enum class MessageKind { StateUp, CommandDown };

template <typename Payload>
struct TimedMessage {
    MessageKind kind = MessageKind::StateUp;
    Payload payload;
    double send_time = 0.0;
    double delivery_time = 0.0;
    std::uint64_t seq = 0;
};

struct ChannelTraceEntry {
    MessageKind kind;
    std::uint64_t seq;
    double send_time;
    double delivery_time;
    bool dropped;
};

// One-directional latency channel with freshest-wins stale drop.
template <typename Payload>
class Channel {
public:
    Channel(MessageKind kind, std::vector<ChannelTraceEntry>* trace = nullptr)
        : kind_(kind), trace_(trace) {}

    // latency profile samples in ms, sim clock in s
    void send(Payload payload, double now, const LatencyProfile& profile,
              RandomStream& rng) {
        TimedMessage<Payload> msg;
        msg.kind = kind_;
        msg.payload = std::move(payload);
        msg.send_time = now;
        msg.delivery_time = now + sample(profile, rng) / 1000.0;
        msg.seq = next_seq_++;
        in_flight_.push_back(std::move(msg));
    }

    // all messages with delivery_time <= now, in seq order; messages older
    // than an already delivered one are dropped as stale
    std::vector<Payload> poll(double now) {
        std::vector<Payload> out;
        std::vector<TimedMessage<Payload>> due;
        for (auto it = in_flight_.begin(); it != in_flight_.end();) {
            if (it->delivery_time <= now) {
                due.push_back(std::move(*it));
                it = in_flight_.erase(it);
            } else {
                ++it;
            }
        }
        std::sort(due.begin(), due.end(),
                  [](const auto& a, const auto& b) { return a.seq < b.seq; });
        for (auto& msg : due) {
            const bool stale = last_delivered_seq_ && msg.seq < *last_delivered_seq_;
            if (trace_)
                trace_->push_back({kind_, msg.seq, msg.send_time, msg.delivery_time, stale});
            if (stale) continue;
            last_delivered_seq_ = msg.seq;
            out.push_back(std::move(msg.payload));
        }
        return out;
    }

    std::size_t in_flight() const { return in_flight_.size(); }

private:
    MessageKind kind_;
    std::uint64_t next_seq_ = 1;
    std::optional<std::uint64_t> last_delivered_seq_;
    std::deque<TimedMessage<Payload>> in_flight_;
    std::vector<ChannelTraceEntry>* trace_;
};

struct SutConfig {
    double time_gap = 2.0;          // s
    double desired_speed = 30.0;    // m/s
    double max_accel = 2.0;         // m/s^2
    double max_decel = 6.0;         // m/s^2, magnitude
    double emergency_gap = 0.8;     // s, time-gap trigger for full braking
    double sensor_range = 150.0;    // m
    double jam_distance = 2.0;      // m
    // linear ACC gains: gap error (1/s^2), relative speed and free-flow
    // speed tracking (1/s); tuned tight so feedback delay is felt
    double k_gap = 0.3;
    double k_speed = 5.0;
    double k_free = 0.6;
    int travel_lane = 1;

    void validate() const;
};

struct EgoDynamics {
    double time_constant = 0.15;  // s, actuator first-order lag
    double mass = 1950.0;        // kg
    double lane_change_duration = 3.0;  // s, quintic profile

    void validate() const;
};

// exact noise-free states of all BGVs strictly within `range` of the ego
Perception ideal_sensor(const World& world, const VehicleState& ego,
                        double range, double now);

// IDM-form ACC over the perceived snapshot
ControlCommand sut_step(const Perception& perceived, const SutConfig& cfg,
                        const RoadSegment& road, double now);

struct EgoActuation {
    bool lane_change_active = false;
    double lc_start = 0.0;
    double lc_y_from = 0.0;
    double lc_y_to = 0.0;
    int lc_target_lane = 0;
};

// first-order lag toward the commanded acceleration, hold-last between
// deliveries; lateral motion uses the quintic lane-change profile
void ego_step(VehicleState& ego, EgoActuation& act, const ControlCommand& cmd,
              const EgoDynamics& dyn, const RoadSegment& road, double now, double dt);

// Appendix-style closed-form helpers
double approximate_moi(double i_meas_ref, double i_cub_ref, double i_cub_ego);
double damping_coefficient(double zeta, double k_s, double quarter_mass);

}  // namespace v2csim
