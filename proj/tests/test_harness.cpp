#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "v2csim/config.hpp"
#include "v2csim/matrix.hpp"
#include "v2csim/runlog.hpp"
#include "v2csim/sim.hpp"

using namespace v2csim;

namespace {

ScenarioConfig short_config(double duration = 10.0) {
    ScenarioConfig cfg;
    cfg.duration = duration;
    cfg.seed = 7;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string("v2csim_test_") + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("run_single is reproducible bit for bit") {
    const ScenarioConfig cfg = short_config();
    const RunResult a = run_single(cfg);
    const RunResult b = run_single(cfg);

    REQUIRE(a.log.steps.size() == b.log.steps.size());
    for (std::size_t i = 0; i < a.log.steps.size(); ++i) {
        CHECK(a.log.steps[i].ego.x == b.log.steps[i].ego.x);
        CHECK(a.log.steps[i].ego.speed == b.log.steps[i].ego.speed);
        CHECK(a.log.steps[i].ego_accel == b.log.steps[i].ego_accel);
        REQUIRE(a.log.steps[i].bgvs.size() == b.log.steps[i].bgvs.size());
    }
    CHECK(a.log.total_distance_km == b.log.total_distance_km);

    // and the persisted CSVs are byte-identical
    TempDir dir("repro");
    const auto pa = (dir.path / "a.csv").string();
    const auto pb = (dir.path / "b.csv").string();
    write_runlog_csv(a.log, pa);
    write_runlog_csv(b.log, pb);
    CHECK(slurp(pa) == slurp(pb));
    CHECK(!slurp(pa).empty());
}

TEST_CASE("different seeds give different trajectories") {
    ScenarioConfig cfg = short_config();
    const RunResult a = run_single(cfg);
    cfg.seed = 8;
    const RunResult b = run_single(cfg);
    bool any_diff = false;
    const std::size_t n = std::min(a.log.steps.size(), b.log.steps.size());
    for (std::size_t i = 0; i < n && !any_diff; ++i)
        any_diff = a.log.steps[i].bgvs.size() != b.log.steps[i].bgvs.size() ||
                   a.log.steps[i].ego.x != b.log.steps[i].ego.x;
    CHECK(any_diff);
}

TEST_CASE("invalid configuration is rejected") {
    ScenarioConfig cfg = short_config();
    cfg.duration = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = short_config();
    cfg.dt = -0.01;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = short_config();
    cfg.latency_profile = "no-such-profile";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("empty road without pcm stays collision free") {
    ScenarioConfig cfg = short_config(20.0);
    cfg.pcm_enabled = false;
    cfg.traffic.inflow_rate = 0.0;
    const RunResult r = run_single(cfg);
    CHECK(r.log.collisions.empty());
    CHECK(r.log.conflicts.empty());
    CHECK(r.metrics.cr == 0.0);
    CHECK(r.metrics.n_cutin == 0);
    CHECK(!r.metrics.f_crit_pet.has_value());
    // ego cruised: distance close to v * T
    CHECK(r.log.total_distance_km ==
          doctest::Approx(cfg.initial_speed * cfg.duration / 1000.0).epsilon(0.02));
}

TEST_CASE("runlog csv carries the expected schema") {
    ScenarioConfig cfg = short_config(2.0);
    const RunResult r = run_single(cfg);
    TempDir dir("schema");
    const auto p = (dir.path / "log.csv").string();
    write_runlog_csv(r.log, p);
    std::ifstream in(p);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header.rfind("time,ego_x,ego_y,ego_lane,ego_speed,ego_accel", 0) == 0);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == r.log.steps.size());
}

TEST_CASE("config json round trip preserves every field") {
    ScenarioConfig cfg = short_config(42.5);
    cfg.pcm.d_brake = 33.0;
    cfg.traffic.inflow_rate = 0.7;
    cfg.latency_profile = "HL";
    cfg.abs_psd = false;

    const std::string text = config_to_json(cfg);
    const ScenarioConfig back = parse_config(text);
    CHECK(back.duration == cfg.duration);
    CHECK(back.seed == cfg.seed);
    CHECK(back.pcm.d_brake == cfg.pcm.d_brake);
    CHECK(back.traffic.inflow_rate == cfg.traffic.inflow_rate);
    CHECK(back.latency_profile == cfg.latency_profile);
    CHECK(back.abs_psd == cfg.abs_psd);
    CHECK(config_to_json(back) == text);
}

TEST_CASE("unknown config keys are rejected with the field name") {
    try {
        parse_config("{\"duraton\": 10.0}");
        FAIL("expected a parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("duraton") != std::string::npos);
    }
}

TEST_CASE("matrix results are independent of worker count") {
    ScenarioConfig base = short_config(5.0);
    MatrixOptions opts;
    opts.speeds_mps = {25.0};
    opts.lanes = {1};
    opts.profiles = {"NL", "HL"};
    opts.seeds_per_cell = 2;
    opts.master_seed = 11;

    opts.workers = 1;
    const MatrixReport serial = run_matrix(base, opts);
    opts.workers = 4;
    const MatrixReport parallel = run_matrix(base, opts);

    REQUIRE(serial.runs.size() == parallel.runs.size());
    REQUIRE(serial.runs.size() == 2 * 1 * 1 * 2 * 2);  // pcm x speed x lane x profile x seed
    for (std::size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].seed == parallel.runs[i].seed);
        CHECK(serial.runs[i].profile == parallel.runs[i].profile);
        CHECK(serial.runs[i].metrics.distance_km ==
              parallel.runs[i].metrics.distance_km);
        CHECK(serial.runs[i].metrics.n_collisions ==
              parallel.runs[i].metrics.n_collisions);
        CHECK(serial.runs[i].metrics.e_sens == parallel.runs[i].metrics.e_sens);
    }
    for (const std::string& prof : opts.profiles) {
        for (bool pcm : {false, true}) {
            const auto& cs = serial.condition(pcm, prof);
            const auto& cp = parallel.condition(pcm, prof);
            CHECK(cs.n_collisions == cp.n_collisions);
            CHECK(cs.distance_km == cp.distance_km);
            CHECK(cs.e_sens_total == cp.e_sens_total);
            CHECK(cs.run_count == cp.run_count);
        }
    }
}

TEST_CASE("matrix artifacts round trip through the report loader") {
    ScenarioConfig base = short_config(3.0);
    MatrixOptions opts;
    opts.speeds_mps = {25.0};
    opts.lanes = {0};
    opts.profiles = {"NL"};
    opts.seeds_per_cell = 1;
    opts.workers = 2;
    TempDir dir("artifacts");
    opts.out_dir = dir.path.string();

    const MatrixReport report = run_matrix(base, opts);
    write_matrix_report(report, opts.out_dir);
    CHECK(std::filesystem::exists(dir.path / "matrix_summary.json"));
    CHECK(std::filesystem::exists(dir.path / "matrix_tables.csv"));

    const MatrixReport loaded = load_matrix_report(opts.out_dir);
    REQUIRE(loaded.runs.size() == report.runs.size());
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        CHECK(loaded.runs[i].seed == report.runs[i].seed);
        CHECK(loaded.runs[i].metrics.n_collisions ==
              report.runs[i].metrics.n_collisions);
        CHECK(loaded.runs[i].metrics.distance_km ==
              doctest::Approx(report.runs[i].metrics.distance_km));
    }
}

TEST_CASE("per-run seeds are distinct across the matrix") {
    ScenarioConfig base = short_config(2.0);
    MatrixOptions opts;
    opts.speeds_mps = {22.0, 25.0};
    opts.lanes = {0, 1};
    opts.profiles = {"NL"};
    opts.seeds_per_cell = 3;
    opts.master_seed = 99;
    const MatrixReport report = run_matrix(base, opts);
    std::set<std::uint64_t> seeds;
    for (const auto& r : report.runs) CHECK(seeds.insert(r.seed).second);
}

TEST_CASE("latency profile slows command arrival relative to zero latency") {
    ScenarioConfig cfg = short_config(5.0);
    cfg.traffic.inflow_rate = 0.0;
    cfg.pcm_enabled = false;

    cfg.latency_profile = "NL";
    const RunResult nl = run_single(cfg);
    cfg.latency_profile = "HL";
    const RunResult hl = run_single(cfg);

    auto mean_delay = [](const RunLog& log) {
        double sum = 0.0;
        long n = 0;
        for (const auto& e : log.channel_trace) {
            if (e.dropped) continue;
            sum += e.delivery_time - e.send_time;
            ++n;
        }
        return n ? sum / static_cast<double>(n) : 0.0;
    };
    CHECK(mean_delay(nl.log) == doctest::Approx(0.0));
    CHECK(mean_delay(hl.log) > 0.01);  // HL mean is 40 ms per leg
}
