#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2csim/sim.hpp"

namespace v2csim {

struct ConditionAggregate {
    bool pcm_enabled = false;
    std::string profile;

    long n_collisions = 0;
    double distance_km = 0.0;
    long n_dhw_below = 0;
    long n_total = 0;
    long n_pet_below = 0;
    long n_cutin = 0;
    double e_sens_total = 0.0;
    long run_count = 0;

    double cr() const;
    double f_crit_dhw() const;
    std::optional<double> f_crit_pet() const;
    double e_sens_mean() const;
};

struct RunRecord {
    bool pcm_enabled;
    std::string profile;
    double initial_speed;
    int initial_lane;
    std::uint64_t seed;
    MetricsReport metrics;
};

struct MatrixReport {
    std::vector<ConditionAggregate> conditions;  // 6 entries
    std::vector<RunRecord> runs;

    const ConditionAggregate& condition(bool pcm, const std::string& profile) const;
};

struct MatrixOptions {
    std::vector<double> speeds_mps;  // defaults to the five-speed set
    std::vector<int> lanes;          // defaults to {0, 1, 2}
    std::vector<std::string> profiles = {"NL", "CL", "HL"};
    int seeds_per_cell = 1;
    std::uint64_t master_seed = 1;
    int workers = 1;
    std::string out_dir;             // when nonempty, persist per-run artifacts

    MatrixOptions();
};

// full PCM x latency x speed x lane x seed sweep; deterministic and
// independent of worker count and execution order
MatrixReport run_matrix(const ScenarioConfig& base, const MatrixOptions& opts);

// JSON summary plus Table-style CSVs (per-condition values and pairwise
// percentage deltas) into `dir`
void write_matrix_report(const MatrixReport& report, const std::string& dir);

// rebuild a MatrixReport from per-run metrics persisted by run_matrix
MatrixReport load_matrix_report(const std::string& dir);

}  // namespace v2csim
