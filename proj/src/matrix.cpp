#include "v2csim/matrix.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "v2csim/config.hpp"

namespace v2csim {

namespace fs = std::filesystem;
using nlohmann::json;

double ConditionAggregate::cr() const {
    return distance_km > 0.0 ? static_cast<double>(n_collisions) / distance_km : 0.0;
}

double ConditionAggregate::f_crit_dhw() const {
    return n_total > 0 ? static_cast<double>(n_dhw_below) / static_cast<double>(n_total)
                       : 0.0;
}

std::optional<double> ConditionAggregate::f_crit_pet() const {
    if (n_cutin == 0) return std::nullopt;
    return static_cast<double>(n_pet_below) / static_cast<double>(n_cutin);
}

double ConditionAggregate::e_sens_mean() const {
    return run_count > 0 ? e_sens_total / static_cast<double>(run_count) : 0.0;
}

const ConditionAggregate& MatrixReport::condition(bool pcm,
                                                  const std::string& profile) const {
    for (const auto& c : conditions)
        if (c.pcm_enabled == pcm && c.profile == profile) return c;
    throw std::invalid_argument("matrix report: no condition " + profile +
                                (pcm ? "/pcm" : "/no-pcm"));
}

MatrixOptions::MatrixOptions() {
    // 90, 100, 110, 120, 130 km/h
    for (double kmh : {90.0, 100.0, 110.0, 120.0, 130.0})
        speeds_mps.push_back(kmh / 3.6);
    lanes = {0, 1, 2};
}

namespace {

struct Cell {
    bool pcm;
    std::string profile;
    double speed;
    int lane;
    std::uint64_t seed;
    std::size_t index;
};

void aggregate_into(ConditionAggregate& agg, const MetricsReport& m) {
    agg.n_collisions += m.n_collisions;
    agg.distance_km += m.distance_km;
    agg.n_dhw_below += m.n_dhw_below;
    agg.n_total += m.n_total;
    agg.n_pet_below += m.n_pet_below;
    agg.n_cutin += m.n_cutin;
    agg.e_sens_total += m.e_sens;
    agg.run_count += 1;
}

std::string run_file_stem(const Cell& c) {
    std::ostringstream ss;
    ss << "run_" << (c.pcm ? "pcm" : "nopcm") << "_" << c.profile << "_v"
       << static_cast<int>(std::lround(c.speed * 3.6)) << "_l" << c.lane << "_s"
       << c.seed;
    return ss.str();
}

}  // namespace

MatrixReport run_matrix(const ScenarioConfig& base, const MatrixOptions& opts) {
    if (opts.seeds_per_cell < 1)
        throw std::invalid_argument("matrix: seeds_per_cell must be >= 1");
    if (opts.workers < 1) throw std::invalid_argument("matrix: workers must be >= 1");

    std::vector<Cell> cells;
    std::size_t cell_index = 0;
    for (int pcm = 0; pcm <= 1; ++pcm) {
        for (const auto& profile : opts.profiles) {
            for (double speed : opts.speeds_mps) {
                for (int lane : opts.lanes) {
                    for (int s = 0; s < opts.seeds_per_cell; ++s) {
                        Cell c;
                        c.pcm = pcm == 1;
                        c.profile = profile;
                        c.speed = speed;
                        c.lane = lane;
                        // one master seed reproduces the whole matrix
                        c.seed = derive_seed(opts.master_seed,
                                             cell_index * 1000003ULL +
                                                 static_cast<std::uint64_t>(s));
                        c.index = cells.size();
                        cells.push_back(c);
                    }
                    ++cell_index;
                }
            }
        }
    }

    if (!opts.out_dir.empty()) fs::create_directories(opts.out_dir);

    std::vector<RunRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            try {
                ScenarioConfig cfg = base;
                cfg.pcm_enabled = c.pcm;
                cfg.latency_profile = c.profile;
                cfg.initial_speed = c.speed;
                cfg.initial_lane = c.lane;
                cfg.seed = c.seed;
                RunResult res = run_single(cfg);

                RunRecord rec;
                rec.pcm_enabled = c.pcm;
                rec.profile = c.profile;
                rec.initial_speed = c.speed;
                rec.initial_lane = c.lane;
                rec.seed = c.seed;
                rec.metrics = res.metrics;
                records[c.index] = std::move(rec);

                if (!opts.out_dir.empty()) {
                    const std::string stem =
                        (fs::path(opts.out_dir) / run_file_stem(c)).string();
                    write_runlog_csv(res.log, stem + "_log.csv");
                    write_events_csv(res.log, stem + "_events.csv");
                    std::ofstream mf(stem + "_metrics.json");
                    mf << metrics_to_json(res.metrics) << "\n";
                    std::ofstream cf(stem + "_config.json");
                    cf << config_to_json(cfg) << "\n";
                }
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                if (first_error.empty())
                    first_error = "matrix cell " + run_file_stem(c) +
                                  " failed: " + e.what();
                next.store(cells.size());  // abort remaining work
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const int workers = std::min<int>(opts.workers, static_cast<int>(cells.size()));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);

    // deterministic reduction in cell order
    MatrixReport report;
    for (int pcm = 0; pcm <= 1; ++pcm) {
        for (const auto& profile : opts.profiles) {
            ConditionAggregate agg;
            agg.pcm_enabled = pcm == 1;
            agg.profile = profile;
            report.conditions.push_back(agg);
        }
    }
    for (const auto& rec : records) {
        for (auto& agg : report.conditions) {
            if (agg.pcm_enabled == rec.pcm_enabled && agg.profile == rec.profile) {
                aggregate_into(agg, rec.metrics);
                break;
            }
        }
    }
    report.runs = std::move(records);
    return report;
}

namespace {

json condition_json(const ConditionAggregate& c) {
    json j;
    j["pcm_enabled"] = c.pcm_enabled;
    j["profile"] = c.profile;
    j["cr"] = c.cr();
    j["f_crit_dhw"] = c.f_crit_dhw();
    if (c.f_crit_pet())
        j["f_crit_pet"] = *c.f_crit_pet();
    else
        j["f_crit_pet"] = nullptr;
    j["e_sens_total"] = c.e_sens_total;
    j["e_sens_mean"] = c.e_sens_mean();
    j["counts"] = {{"n_collisions", c.n_collisions},
                   {"n_dhw_below", c.n_dhw_below},
                   {"n_total", c.n_total},
                   {"n_pet_below", c.n_pet_below},
                   {"n_cutin", c.n_cutin},
                   {"run_count", c.run_count}};
    j["distance_km"] = c.distance_km;
    return j;
}

double pct_delta(double with_value, double without_value) {
    if (without_value == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (with_value / without_value - 1.0) * 100.0;
}

std::vector<std::string> report_profiles(const MatrixReport& r) {
    std::vector<std::string> out;
    for (const auto& c : r.conditions)
        if (!c.pcm_enabled) out.push_back(c.profile);
    return out;
}

void write_metric_tables(std::ofstream& f, const MatrixReport& r,
                         const std::string& metric,
                         double (*get)(const ConditionAggregate&)) {
    const std::vector<std::string> profiles = report_profiles(r);
    f << "# " << metric << " per condition\n";
    f << "condition";
    for (const auto& p : profiles) f << "," << p;
    f << "\n";
    for (int pcm = 0; pcm <= 1; ++pcm) {
        f << (pcm ? "with_pcm" : "without_pcm");
        for (const auto& p : profiles) f << "," << get(r.condition(pcm == 1, p));
        f << "\n";
    }
    f << "pcm_increase_pct";
    for (const auto& p : profiles)
        f << "," << pct_delta(get(r.condition(true, p)), get(r.condition(false, p)));
    f << "\n";
    if (profiles.size() > 1) {
        const std::string& base = profiles.front();
        f << "# relative change vs " << base << "\n";
        f << "comparison,without_pcm,with_pcm\n";
        for (std::size_t i = 1; i < profiles.size(); ++i) {
            f << base << "_vs_" << profiles[i];
            for (int pcm = 0; pcm <= 1; ++pcm)
                f << ","
                  << pct_delta(get(r.condition(pcm == 1, profiles[i])),
                               get(r.condition(pcm == 1, base)));
            f << "\n";
        }
    }
    f << "\n";
}

}  // namespace

void write_matrix_report(const MatrixReport& report, const std::string& dir) {
    fs::create_directories(dir);

    json j;
    j["conditions"] = json::array();
    for (const auto& c : report.conditions) j["conditions"].push_back(condition_json(c));
    j["runs"] = json::array();
    for (const auto& rec : report.runs) {
        json rj;
        rj["pcm_enabled"] = rec.pcm_enabled;
        rj["profile"] = rec.profile;
        rj["initial_speed"] = rec.initial_speed;
        rj["initial_lane"] = rec.initial_lane;
        rj["seed"] = rec.seed;
        rj["metrics"] = json::parse(metrics_to_json(rec.metrics));
        j["runs"].push_back(rj);
    }
    {
        std::ofstream f(fs::path(dir) / "matrix_summary.json");
        if (!f) throw std::runtime_error("cannot write matrix summary in " + dir);
        f << j.dump(2) << "\n";
    }

    std::ofstream f(fs::path(dir) / "matrix_tables.csv");
    if (!f) throw std::runtime_error("cannot write matrix tables in " + dir);
    write_metric_tables(f, report, "collision_rate_per_km",
                        [](const ConditionAggregate& c) { return c.cr(); });
    write_metric_tables(f, report, "f_crit_dhw",
                        [](const ConditionAggregate& c) { return c.f_crit_dhw(); });
    write_metric_tables(f, report, "f_crit_pet", [](const ConditionAggregate& c) {
        return c.f_crit_pet().value_or(std::numeric_limits<double>::quiet_NaN());
    });
    write_metric_tables(f, report, "e_sens_total",
                        [](const ConditionAggregate& c) { return c.e_sens_total; });
}

MatrixReport load_matrix_report(const std::string& dir) {
    const fs::path summary = fs::path(dir) / "matrix_summary.json";
    std::ifstream in(summary);
    if (!in) throw std::runtime_error("cannot open " + summary.string());
    json j = json::parse(in);

    MatrixReport report;
    // conditions mirror whatever profiles were persisted
    for (const auto& cj : j.at("conditions")) {
        ConditionAggregate agg;
        agg.pcm_enabled = cj.at("pcm_enabled").get<bool>();
        agg.profile = cj.at("profile").get<std::string>();
        report.conditions.push_back(agg);
    }
    for (const auto& rj : j.at("runs")) {
        RunRecord rec;
        rec.pcm_enabled = rj.at("pcm_enabled").get<bool>();
        rec.profile = rj.at("profile").get<std::string>();
        rec.initial_speed = rj.at("initial_speed").get<double>();
        rec.initial_lane = rj.at("initial_lane").get<int>();
        rec.seed = rj.at("seed").get<std::uint64_t>();
        const auto& m = rj.at("metrics");
        rec.metrics.cr = m.at("cr").get<double>();
        rec.metrics.f_crit_dhw = m.at("f_crit_dhw").get<double>();
        if (!m.at("f_crit_pet").is_null())
            rec.metrics.f_crit_pet = m.at("f_crit_pet").get<double>();
        rec.metrics.e_sens = m.at("e_sens").get<double>();
        const auto& counts = m.at("counts");
        rec.metrics.n_dhw_below = counts.at("n_dhw_below").get<long>();
        rec.metrics.n_total = counts.at("n_total").get<long>();
        rec.metrics.n_pet_below = counts.at("n_pet_below").get<long>();
        rec.metrics.n_cutin = counts.at("n_cutin").get<long>();
        rec.metrics.n_collisions = counts.at("n_collisions").get<long>();
        rec.metrics.distance_km = m.at("distance_km").get<double>();

        for (auto& agg : report.conditions) {
            if (agg.pcm_enabled == rec.pcm_enabled && agg.profile == rec.profile) {
                aggregate_into(agg, rec.metrics);
                break;
            }
        }
        report.runs.push_back(std::move(rec));
    }
    return report;
}

}  // namespace v2csim
