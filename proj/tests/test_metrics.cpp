#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "v2csim/fft.hpp"
#include "v2csim/metrics.hpp"
#include "v2csim/random.hpp"

using namespace v2csim;

namespace {

RunLog make_log(double dt = 0.01, double road_length = 2000.0) {
    RunLog log;
    log.dt = dt;
    log.road_length = road_length;
    return log;
}

StepRecord step_at(double t, double ego_x, int ego_lane = 1) {
    StepRecord s;
    s.time = t;
    s.ego.id = -1;
    s.ego.x = ego_x;
    s.ego.y = (ego_lane + 0.5) * 3.5;
    s.ego.lane = ego_lane;
    return s;
}

VehicleState bgv_at(int id, double x, int lane = 1) {
    VehicleState b;
    b.id = id;
    b.x = x;
    b.y = (lane + 0.5) * 3.5;
    b.lane = lane;
    return b;
}

// independent quadratic-time oracle for PET
std::optional<double> pet_oracle(const ConflictEvent& ev, const RunLog& log,
                                 double delta) {
    for (const auto& s : log.steps) {
        if (s.time < ev.end_time) continue;
        double dx = std::fmod(ev.completion_x - s.ego.x, log.road_length);
        if (dx < 0.0) dx += log.road_length;
        if (dx >= log.road_length / 2.0) dx -= log.road_length;
        if (std::hypot(dx, ev.completion_y - s.ego.y) < delta)
            return s.time - ev.end_time;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("collision detection by rising edge") {
    RunLog log = make_log();

    SUBCASE("distant vehicles never collide") {
        for (int i = 0; i < 100; ++i) {
            auto s = step_at(i * 0.01, 500.0);
            s.bgvs.push_back(bgv_at(0, 600.0));
            log.steps.push_back(s);
        }
        CHECK(detect_collisions(log).empty());
    }

    SUBCASE("contiguous overlap counts once") {
        for (int i = 0; i < 10; ++i) {
            auto s = step_at(i * 0.01, 500.0);
            const double bx = (i >= 3 && i < 8) ? 502.0 : 600.0;  // overlap 5 steps
            s.bgvs.push_back(bgv_at(0, bx));
            log.steps.push_back(s);
        }
        const auto evs = detect_collisions(log);
        REQUIRE(evs.size() == 1);
        CHECK(evs[0].partner_id == 0);
        CHECK(evs[0].time == doctest::Approx(0.03));
    }
}

TEST_CASE("collision rising edge details") {
    RunLog log = make_log();
    // overlap steps 3..7 only, then far again: exactly one event
    for (int i = 0; i < 12; ++i) {
        auto s = step_at(i * 0.01, 500.0);
        const double bx = (i >= 3 && i <= 7) ? 502.0 : 700.0;
        s.bgvs.push_back(bgv_at(0, bx));
        log.steps.push_back(s);
    }
    auto evs = detect_collisions(log);
    REQUIRE(evs.size() == 1);
    // two separate overlap windows with the same partner give two events
    log.steps.clear();
    for (int i = 0; i < 30; ++i) {
        auto s = step_at(i * 0.01, 500.0);
        const bool hit = (i >= 3 && i <= 7) || (i >= 15 && i <= 18);
        s.bgvs.push_back(bgv_at(0, hit ? 502.0 : 700.0));
        log.steps.push_back(s);
    }
    evs = detect_collisions(log);
    CHECK(evs.size() == 2);
}

TEST_CASE("collision rate pools across runs") {
    CHECK(collision_rate({{2, 60.0}, {0, 40.0}}) == doctest::Approx(0.02));
    CHECK(collision_rate({{0, 10.0}, {0, 5.0}}) == 0.0);
    CHECK_THROWS_AS(collision_rate({{1, 0.0}, {0, 0.0}}), std::invalid_argument);
    // cumulative form, never the mean of per-run rates
    const double pooled = collision_rate({{4, 10.0}, {0, 90.0}});
    CHECK(pooled == doctest::Approx(0.04));
    CHECK(pooled != doctest::Approx((4.0 / 10.0 + 0.0) / 2.0));
}

TEST_CASE("critical headway frequency") {
    RunLog log = make_log();

    SUBCASE("lead always far") {
        for (int i = 0; i < 1000; ++i) {
            auto s = step_at(i * 0.01, 500.0);
            s.bgvs.push_back(bgv_at(0, 600.0));
            log.steps.push_back(s);
        }
        CHECK(f_crit_dhw(log) == 0.0);
    }

    SUBCASE("200 of 1000 steps below threshold") {
        for (int i = 0; i < 1000; ++i) {
            auto s = step_at(i * 0.01, 500.0);
            s.bgvs.push_back(bgv_at(0, i < 200 ? 530.0 : 580.0));
            log.steps.push_back(s);
        }
        CHECK(f_crit_dhw(log) == doctest::Approx(0.2));
    }

    SUBCASE("steps without a lead count only in the denominator") {
        for (int i = 0; i < 100; ++i) {
            auto s = step_at(i * 0.01, 500.0);
            if (i < 50) s.bgvs.push_back(bgv_at(0, 510.0));  // below 50 m
            log.steps.push_back(s);
        }
        CHECK(f_crit_dhw(log) == doctest::Approx(0.5));
    }
}

TEST_CASE("pet basics") {
    RunLog log = make_log();
    ConflictEvent ev;
    ev.kind = ConflictKind::CutIn;
    ev.end_time = 1.0;
    ev.completion_x = 530.0;
    ev.completion_y = 5.25;

    SUBCASE("ego reaches the completion point after 0.8 s") {
        for (int i = 0; i < 500; ++i) {
            const double t = i * 0.01;
            // ego moves 25 m/s from x=500 at t=0.6; reaches 530 at ~t=1.8
            log.steps.push_back(step_at(t, 500.0 + 25.0 * (t - 0.6)));
        }
        const auto p = pet(ev, log);
        REQUIRE(p.has_value());
        CHECK(*p == doctest::Approx(0.77).epsilon(0.05));
    }

    SUBCASE("ego already within delta at t_cut gives zero") {
        for (int i = 0; i < 200; ++i)
            log.steps.push_back(step_at(i * 0.01, 530.0));
        const auto p = pet(ev, log);
        REQUIRE(p.has_value());
        CHECK(*p < 0.011);  // first recorded step at or after t_cut
    }

    SUBCASE("ego never within delta gives absent") {
        for (int i = 0; i < 200; ++i)
            log.steps.push_back(step_at(i * 0.01, 100.0));
        CHECK(!pet(ev, log).has_value());
    }
}

TEST_CASE("pet equals the exhaustive scan on fuzzed trajectories") {
    RandomStream rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        RunLog log = make_log();
        double x = rng.uniform(0.0, 2000.0);
        for (int i = 0; i < 300; ++i) {
            const double t = i * 0.01;
            x = std::fmod(x + rng.uniform(0.0, 0.5), 2000.0);
            auto s = step_at(t, x);
            s.ego.y = rng.uniform(1.0, 9.0);
            log.steps.push_back(s);
        }
        ConflictEvent ev;
        ev.kind = ConflictKind::CutIn;
        ev.end_time = rng.uniform(0.0, 2.5);
        ev.completion_x = rng.uniform(0.0, 2000.0);
        ev.completion_y = rng.uniform(1.0, 9.0);
        const double delta = rng.uniform(0.5, 3.0);
        CHECK(pet(ev, log, delta) == pet_oracle(ev, log, delta));
    }
}

TEST_CASE("critical pet frequency") {
    RunLog log = make_log();
    // three completed cut-ins with PETs 0.5, 1.5, 0.9 via synthetic motion
    // simpler: hand-check the counting through f_crit_pet on crafted logs
    for (int i = 0; i < 1000; ++i)
        log.steps.push_back(step_at(i * 0.01, 500.0));
    auto add_cutin = [&](double t_cut, double pet_value) {
        ConflictEvent ev;
        ev.kind = ConflictKind::CutIn;
        ev.start_time = t_cut - 3.0;
        ev.end_time = t_cut;
        ev.completion_x = 500.0;
        ev.completion_y = 5.25;
        // shift completion so the ego (fixed at x=500) enters the ball
        // exactly at t_cut + pet_value: emulate by placing the ego there
        // via per-event y offsets is awkward; instead move completion_y
        // out of reach and patch the matching step
        ev.completion_y = 100.0;
        const std::size_t idx =
            static_cast<std::size_t>(std::lround((t_cut + pet_value) / 0.01));
        log.steps[idx].ego.y = 100.0;
        log.steps[idx].ego.x = 500.0;
        return ev;
    };
    log.conflicts.push_back(add_cutin(1.0, 0.5));
    log.conflicts.push_back(add_cutin(3.0, 1.5));
    log.conflicts.push_back(add_cutin(6.0, 0.9));

    const auto pf = f_crit_pet({&log});
    CHECK(pf.n_cutin == 3);
    CHECK(pf.n_below == 2);
    REQUIRE(pf.frequency.has_value());
    CHECK(*pf.frequency == doctest::Approx(2.0 / 3.0));

    RunLog empty = make_log();
    empty.steps.push_back(step_at(0.0, 0.0));
    CHECK(!f_crit_pet({&empty}).frequency.has_value());
}

TEST_CASE("band power satisfies parseval") {
    RandomStream rng(66);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 400 + static_cast<std::size_t>(rng.uniform(0.0, 1200.0));
        std::vector<double> sig(n);
        for (auto& x : sig) x = rng.normal(0.0, 1.0);
        double time_energy = 0.0;
        for (double x : sig) time_energy += x * x;
        // f_hi above Nyquist captures every one-sided bin regardless of
        // floating-point placement of the top bin frequency
        const double full = band_power(sig, 0.01, 0.0, 51.0, false);
        CHECK(full == doctest::Approx(time_energy).epsilon(1e-9));
    }
}

TEST_CASE("band power of a zero signal is zero") {
    std::vector<double> sig(1000, 0.0);
    CHECK(band_power(sig, 0.01) == 0.0);
}

TEST_CASE("pure tone power lands inside the comfort band") {
    // 2 Hz tone at 100 Hz sampling for 10 s: exactly on bin 20
    const double dt = 0.01;
    std::vector<double> sig(1000);
    for (std::size_t i = 0; i < sig.size(); ++i)
        sig[i] = std::sin(2.0 * M_PI * 2.0 * static_cast<double>(i) * dt);
    double total = 0.0;
    for (double x : sig) total += x * x;
    const double in_band = band_power(sig, dt, 0.5, 10.0, false);
    CHECK(in_band >= 0.99 * total);
}

TEST_CASE("band power is invariant under circular shifts") {
    RandomStream rng(77);
    std::vector<double> sig(777);
    for (auto& x : sig) x = rng.normal(0.0, 2.0);
    const double base = band_power(sig, 0.01, 0.5, 10.0, true);
    for (int shift : {1, 13, 400}) {
        std::vector<double> shifted(sig.size());
        for (std::size_t i = 0; i < sig.size(); ++i)
            shifted[i] = sig[(i + shift) % sig.size()];
        CHECK(band_power(shifted, 0.01, 0.5, 10.0, true) ==
              doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("too-short series raises a resolution error") {
    std::vector<double> sig(100, 1.0);  // 1 s at 100 Hz cannot resolve 0.5 Hz
    CHECK_THROWS_AS(band_power(sig, 0.01), std::invalid_argument);
}

TEST_CASE("dft matches a naive evaluation") {
    RandomStream rng(88);
    for (std::size_t n : {8, 15, 127}) {
        std::vector<double> sig(n);
        for (auto& x : sig) x = rng.uniform(-1.0, 1.0);
        const auto fast = dft(sig);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> slow(0.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double ang = -2.0 * M_PI * static_cast<double>(k * j) /
                                   static_cast<double>(n);
                slow += sig[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            CHECK(std::abs(fast[k] - slow) < 1e-8);
        }
    }
}
