#pragma once

#include <optional>
#include <vector>

#include "v2csim/runlog.hpp"

namespace v2csim {

struct MetricsReport {
    double cr = 0.0;                       // collisions per km
    double f_crit_dhw = 0.0;               // in [0,1]
    std::optional<double> f_crit_pet;      // absent when no cut-ins occurred
    double e_sens = 0.0;                   // (m/s^2)^2 in [0.5, 10] Hz
    long n_dhw_below = 0;
    long n_total = 0;
    long n_pet_below = 0;
    long n_cutin = 0;
    long n_collisions = 0;
    double distance_km = 0.0;
};

// axis-aligned footprint overlap between ego and BGVs; one event per
// contiguous overlap interval (rising edge)
std::vector<CollisionEvent> detect_collisions(const RunLog& log);

// Sum N_collision / Sum D over all runs (cumulative, never mean-of-rates)
double collision_rate(const std::vector<std::pair<long, double>>& runs);

// fraction of steps with a same-lane lead closer than `threshold`; steps
// without a lead count only in the denominator
double f_crit_dhw(const RunLog& log, double threshold = 50.0);

// PET of one completed cut-in event; absent if the ego never comes within
// delta of the completion position before run end
std::optional<double> pet(const ConflictEvent& event, const RunLog& log,
                          double delta = 1.0);

struct PetFrequency {
    long n_below = 0;
    long n_cutin = 0;
    std::optional<double> frequency;  // absent when n_cutin == 0
};

PetFrequency f_crit_pet(const std::vector<const RunLog*>& logs,
                        double threshold = 1.0, double delta = 1.0);

// One-sided PSD of the signal: P_k = |DFT|^2/N with interior bins doubled
// so that the [0, Nyquist] sum satisfies Parseval. Band boundaries inclusive.
// When use_abs is set the DFT is taken of |a(t)|.
double band_power(const std::vector<double>& accel, double dt,
                  double f_lo = 0.5, double f_hi = 10.0, bool use_abs = true);

// full report for one run (e_sens over the achieved ego acceleration)
MetricsReport compute_metrics(const RunLog& log, double dhw_threshold = 50.0,
                              double pet_threshold = 1.0, double pet_delta = 1.0,
                              bool abs_psd = true);

}  // namespace v2csim
