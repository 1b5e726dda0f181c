#include "v2csim/runlog.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

namespace v2csim {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot write file: " + path);
    return f;
}

}  // namespace

void write_runlog_csv(const RunLog& log, const std::string& path) {
    auto f = open_for_write(path);

    std::set<int> ids;
    for (const auto& s : log.steps)
        for (const auto& b : s.bgvs) ids.insert(b.id);

    std::fprintf(f.get(), "time,ego_x,ego_y,ego_lane,ego_speed,ego_accel");
    for (int id : ids)
        std::fprintf(f.get(), ",bgv_%d_x,bgv_%d_y,bgv_%d_lane,bgv_%d_speed,bgv_%d_accel",
                     id, id, id, id, id);
    std::fprintf(f.get(), "\n");

    for (const auto& s : log.steps) {
        std::fprintf(f.get(), "%.4f,%.6f,%.6f,%d,%.6f,%.6f", s.time, s.ego.x,
                     s.ego.y, s.ego.lane, s.ego.speed, s.ego_accel);
        std::map<int, const VehicleState*> by_id;
        for (const auto& b : s.bgvs) by_id[b.id] = &b;
        for (int id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                std::fprintf(f.get(), ",,,,,");
            } else {
                const VehicleState* b = it->second;
                std::fprintf(f.get(), ",%.6f,%.6f,%d,%.6f,%.6f", b->x, b->y,
                             b->lane, b->speed, b->accel);
            }
        }
        std::fprintf(f.get(), "\n");
    }
}

void write_events_csv(const RunLog& log, const std::string& path) {
    auto f = open_for_write(path);
    std::fprintf(f.get(), "time,kind,actor_id,t_cut,p_cut_x,p_cut_y\n");
    for (const auto& ev : log.conflicts) {
        if (ev.kind == ConflictKind::CutIn) {
            std::fprintf(f.get(), "%.4f,cut_in,%d,%.4f,%.6f,%.6f\n", ev.start_time,
                         ev.actor_id, ev.end_time, ev.completion_x, ev.completion_y);
        } else {
            std::fprintf(f.get(), "%.4f,emergency_brake,%d,,,\n", ev.start_time,
                         ev.actor_id);
        }
    }
    for (const auto& c : log.collisions)
        std::fprintf(f.get(), "%.4f,collision,%d,,,\n", c.time, c.partner_id);
}

void write_channel_csv(const RunLog& log, const std::string& path) {
    auto f = open_for_write(path);
    std::fprintf(f.get(), "direction,seq,send_time,delivery_time,dropped\n");
    for (const auto& e : log.channel_trace)
        std::fprintf(f.get(), "%s,%" PRIu64 ",%.6f,%.6f,%d\n",
                     e.kind == MessageKind::StateUp ? "up" : "down", e.seq,
                     e.send_time, e.delivery_time, e.dropped ? 1 : 0);
}

}  // namespace v2csim
