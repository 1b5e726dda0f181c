#include "v2csim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "v2csim/fft.hpp"

namespace v2csim {

namespace {

double wrapped_dx(double road_length, double from, double to) {
    double d = std::fmod(to - from, road_length);
    if (d < 0.0) d += road_length;
    if (d >= road_length / 2.0) d -= road_length;
    return d;
}

double forward_dx(double road_length, double from, double to) {
    double d = std::fmod(to - from, road_length);
    if (d < 0.0) d += road_length;
    return d;
}

}  // namespace

std::vector<CollisionEvent> detect_collisions(const RunLog& log) {
    std::vector<CollisionEvent> events;
    std::map<int, bool> overlapping;
    for (const auto& s : log.steps) {
        for (const auto& b : s.bgvs) {
            const double dx = wrapped_dx(log.road_length, s.ego.x, b.x);
            const double dy = b.y - s.ego.y;
            const double ox = 0.5 * (s.ego.length + b.length) - std::fabs(dx);
            const double oy = 0.5 * (s.ego.width + b.width) - std::fabs(dy);
            const bool hit = ox > 0.0 && oy > 0.0;
            bool& was = overlapping[b.id];
            if (hit && !was) {
                CollisionEvent ev;
                ev.time = s.time;
                ev.partner_id = b.id;
                ev.overlap_depth = std::min(ox, oy);
                events.push_back(ev);
            }
            was = hit;
        }
    }
    return events;
}

double collision_rate(const std::vector<std::pair<long, double>>& runs) {
    long collisions = 0;
    double dist = 0.0;
    for (const auto& [n, d] : runs) {
        collisions += n;
        dist += d;
    }
    if (dist <= 0.0) throw std::invalid_argument("collision_rate: zero total distance");
    return static_cast<double>(collisions) / dist;
}

double f_crit_dhw(const RunLog& log, double threshold) {
    if (log.steps.empty()) throw std::invalid_argument("f_crit_dhw: empty log");
    long below = 0;
    for (const auto& s : log.steps) {
        // nearest-ahead same-lane lead by forward distance
        const VehicleState* lead = nullptr;
        double lead_fwd = log.road_length + 1.0;
        for (const auto& b : s.bgvs) {
            if (b.lane != s.ego.lane) continue;
            const double fwd = forward_dx(log.road_length, s.ego.x, b.x);
            if (fwd > 0.0 && fwd < lead_fwd) {
                lead_fwd = fwd;
                lead = &b;
            }
        }
        if (!lead) continue;  // counts toward N_total only
        const double dhw = std::hypot(wrapped_dx(log.road_length, s.ego.x, lead->x),
                                      lead->y - s.ego.y);
        if (dhw < threshold) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(log.steps.size());
}

std::optional<double> pet(const ConflictEvent& event, const RunLog& log,
                          double delta) {
    if (event.kind != ConflictKind::CutIn)
        throw std::invalid_argument("pet: event must be a cut-in");
    const double t_cut = event.end_time;
    for (const auto& s : log.steps) {
        if (s.time < t_cut) continue;
        const double d = std::hypot(
            wrapped_dx(log.road_length, s.ego.x, event.completion_x),
            event.completion_y - s.ego.y);
        if (d < delta) return s.time - t_cut;
    }
    return std::nullopt;
}

PetFrequency f_crit_pet(const std::vector<const RunLog*>& logs, double threshold,
                        double delta) {
    PetFrequency out;
    for (const RunLog* log : logs) {
        const double run_end = log->steps.empty() ? 0.0 : log->steps.back().time;
        for (const auto& ev : log->conflicts) {
            if (ev.kind != ConflictKind::CutIn) continue;
            if (ev.end_time > run_end) continue;  // maneuver never completed
            ++out.n_cutin;
            const auto p = pet(ev, *log, delta);
            if (p && *p < threshold) ++out.n_below;
        }
    }
    if (out.n_cutin > 0)
        out.frequency = static_cast<double>(out.n_below) /
                        static_cast<double>(out.n_cutin);
    return out;
}

double band_power(const std::vector<double>& accel, double dt, double f_lo,
                  double f_hi, bool use_abs) {
    if (dt <= 0.0) throw std::invalid_argument("band_power: dt must be > 0");
    const std::size_t n = accel.size();
    const double min_len = 2.0 / (f_lo * dt);
    if (f_lo > 0.0 && static_cast<double>(n) < min_len)
        throw std::invalid_argument("band_power: series too short to resolve the band");
    if (n < 2) throw std::invalid_argument("band_power: series too short");

    std::vector<double> sig(n);
    for (std::size_t i = 0; i < n; ++i) sig[i] = use_abs ? std::fabs(accel[i]) : accel[i];
    const auto spectrum = dft(sig);

    const double df = 1.0 / (static_cast<double>(n) * dt);
    const std::size_t half = n / 2;
    double total = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < f_lo || f > f_hi) continue;  // band boundaries inclusive
        double p = std::norm(spectrum[k]) / static_cast<double>(n);
        // one-sided: interior bins carry the mirrored negative frequency
        const bool interior = k != 0 && !(n % 2 == 0 && k == half);
        if (interior) p *= 2.0;
        total += p;
    }
    return total;
}

MetricsReport compute_metrics(const RunLog& log, double dhw_threshold,
                              double pet_threshold, double pet_delta,
                              bool abs_psd) {
    MetricsReport r;
    r.n_total = static_cast<long>(log.steps.size());
    r.distance_km = log.total_distance_km;
    r.n_collisions = static_cast<long>(log.collisions.size());
    if (r.distance_km > 0.0)
        r.cr = static_cast<double>(r.n_collisions) / r.distance_km;
    if (!log.steps.empty()) {
        r.f_crit_dhw = f_crit_dhw(log, dhw_threshold);
        r.n_dhw_below = static_cast<long>(std::lround(
            r.f_crit_dhw * static_cast<double>(log.steps.size())));
        std::vector<double> accel(log.steps.size());
        for (std::size_t i = 0; i < log.steps.size(); ++i)
            accel[i] = log.steps[i].ego_accel;
        if (accel.size() >= static_cast<std::size_t>(2.0 / (0.5 * log.dt)))
            r.e_sens = band_power(accel, log.dt, 0.5, 10.0, abs_psd);
    }
    const PetFrequency pf = f_crit_pet({&log}, pet_threshold, pet_delta);
    r.n_pet_below = pf.n_below;
    r.n_cutin = pf.n_cutin;
    r.f_crit_pet = pf.frequency;
    return r;
}

}  // namespace v2csim
