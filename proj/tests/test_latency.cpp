#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "v2csim/latency.hpp"
#include "v2csim/mathutil.hpp"

using namespace v2csim;

namespace {

double integrate_pdf(const DistributionSpec& spec, double lo, double hi, int n) {
    // Simpson's rule
    double sum = pdf(spec, lo) + pdf(spec, hi);
    const double h = (hi - lo) / n;
    for (int i = 1; i < n; ++i)
        sum += pdf(spec, lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

std::vector<double> draw(const DistributionSpec& spec, std::size_t n,
                         std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = sample(spec, rng);
    return out;
}

}  // namespace

TEST_CASE("pdf point values") {
    // shape-1 Gamma reduces to Exponential(1/theta)
    CHECK(pdf({Family::Gamma, 1.0, 10.0}, 0.0) == doctest::Approx(0.1));
    CHECK(pdf({Family::Normal, 20.0, 5.0}, 20.0) ==
          doctest::Approx(1.0 / (5.0 * std::sqrt(2.0 * M_PI))));
    CHECK(pdf({Family::Rayleigh, 3.0, 0.0}, 0.0) == 0.0);
}

TEST_CASE("pdf rejects non-positive parameters") {
    CHECK_THROWS_AS(pdf({Family::Gamma, -1.0, 2.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pdf({Family::Normal, 5.0, 0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pdf({Family::Nakagami, 0.3, 2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("pdf integrates to one") {
    const DistributionSpec specs[] = {
        {Family::Gamma, 2.0, 5.0},
        {Family::Normal, 50.0, 4.0},
        {Family::Nakagami, 1.5, 100.0},
        {Family::Rayleigh, 3.0, 0.0},
    };
    for (const auto& spec : specs) {
        const double hi = spec.analytic_mean() * 10.0 + 100.0;
        CHECK(integrate_pdf(spec, 0.0, hi, 200000) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Normal far from zero also integrates over the real line
    CHECK(integrate_pdf({Family::Normal, 50.0, 4.0}, 0.0, 100.0, 100000) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero profile always samples zero") {
    LatencyProfile p{"NL", ZeroLatency{}};
    RandomStream rng(7);
    for (int i = 0; i < 100; ++i) CHECK(sample(p, rng) == 0.0);
}

TEST_CASE("gamma sample moments match analytic values") {
    const auto xs = draw({Family::Gamma, 2.0, 5.0}, 100000, 42);
    CHECK(mean(xs) == doctest::Approx(10.0).epsilon(0.02));
    CHECK(variance(xs) == doctest::Approx(50.0).epsilon(0.05));
}

TEST_CASE("sample mean converges for every family") {
    struct Case {
        DistributionSpec spec;
        double expected;
    } cases[] = {
        {{Family::Gamma, 2.0, 5.0}, 10.0},
        {{Family::Normal, 50.0, 2.0}, 50.0},  // truncation negligible far from 0
        {{Family::Nakagami, 1.5, 100.0}, 0.0},
        {{Family::Rayleigh, 3.0, 0.0}, 3.0 * std::sqrt(M_PI / 2.0)},
    };
    cases[2].expected = cases[2].spec.analytic_mean();
    for (const auto& c : cases) {
        const auto xs = draw(c.spec, 100000, 99);
        CHECK(mean(xs) == doctest::Approx(c.expected).epsilon(0.02));
    }
}

TEST_CASE("normal samples are truncated at zero") {
    // heavy truncation regime
    const auto xs = draw({Family::Normal, 1.0, 5.0}, 10000, 3);
    for (double x : xs) CHECK(x >= 0.0);
}

TEST_CASE("identical seed gives bit-exact sequences") {
    RandomStream a(123), b(123);
    DistributionSpec spec{Family::Gamma, 2.0, 5.0};
    for (int i = 0; i < 1000; ++i) CHECK(sample(spec, a) == sample(spec, b));
}

TEST_CASE("fit recovers gamma parameters") {
    const auto xs = draw({Family::Gamma, 2.0, 5.0}, 100000, 11);
    const auto r = fit(xs, Family::Gamma);
    CHECK(r.spec.p1 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r.spec.p2 == doctest::Approx(5.0).epsilon(0.05));
    CHECK(r.sse >= 0.0);
}

TEST_CASE("exponential data fits as gamma with shape near one") {
    RandomStream rng(5);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = rng.exponential(0.1);
    const auto r = fit(xs, Family::Gamma);
    CHECK(r.spec.p1 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("degenerate samples raise a fit error") {
    std::vector<double> xs(200, 5.0);
    CHECK_THROWS_AS(fit(xs, Family::Gamma), FitError);
    CHECK_THROWS_AS((void)fit(std::vector<double>(10, 1.0), Family::Gamma), FitError);
}

TEST_CASE("rank_families puts the generating family first") {
    const auto gamma_draws = draw({Family::Gamma, 2.0, 5.0}, 100000, 21);
    auto ranked = rank_families(gamma_draws);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked.front().spec.family == Family::Gamma);
    for (std::size_t i = 1; i < ranked.size(); ++i)
        CHECK(ranked[i - 1].sse <= ranked[i].sse);

    const auto normal_draws = draw({Family::Normal, 50.0, 2.0}, 100000, 22);
    ranked = rank_families(normal_draws);
    CHECK(ranked.front().spec.family == Family::Normal);
}

TEST_CASE("queueing sample reduces to the M/M/1 sojourn time") {
    QueueingGenerator gen;
    gen.lambda1 = 0.05;
    gen.lambda2 = 0.15;
    gen.retx_prob = 0.0;
    RandomStream rng(31);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = queueing_sample(gen, rng);
    CHECK(mean(xs) == doctest::Approx(1.0 / 0.1).epsilon(0.02));
}

TEST_CASE("queueing mean follows linearity of expectation") {
    QueueingGenerator gen;
    gen.lambda1 = 0.05;
    gen.lambda2 = 0.15;
    gen.mu2 = 0.2;
    gen.retx_prob = 0.4;
    gen.harq_fixed = 1.0;
    gen.node_delays = {{NodeDelay::Kind::Constant, 2.0},
                       {NodeDelay::Kind::Exponential, 0.5}};
    RandomStream rng(33);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = queueing_sample(gen, rng);
    const double expected = 1.0 / 0.1 + 0.4 / 0.2 + 1.0 + 2.0 + 2.0;
    CHECK(gen.analytic_mean() == doctest::Approx(expected));
    CHECK(mean(xs) == doctest::Approx(expected).epsilon(0.02));
    for (double x : xs) CHECK(x >= gen.harq_fixed);
}

TEST_CASE("unstable queue is rejected") {
    QueueingGenerator gen;
    gen.lambda1 = 0.2;
    gen.lambda2 = 0.1;
    RandomStream rng(1);
    CHECK_THROWS_AS(queueing_sample(gen, rng), std::invalid_argument);
}

TEST_CASE("verify_gamma_theory matches Gamma(2, 1/mu)") {
    QueueingGenerator gen;
    gen.lambda1 = 0.1;
    gen.lambda2 = 0.2;  // mu = 0.1/ms
    gen.mu2 = 0.1;
    gen.retx_prob = 1.0;
    RandomStream rng(77);
    const auto rep = verify_gamma_theory(gen, 100000, rng);
    CHECK(rep.analytic_mean == doctest::Approx(20.0));
    CHECK(rep.empirical_mean == doctest::Approx(20.0).epsilon(0.02));
    CHECK(rep.empirical_variance == doctest::Approx(200.0).epsilon(0.05));
    CHECK(rep.ks_distance < 0.02);
}

TEST_CASE("verify_gamma_theory rejects misconfiguration") {
    QueueingGenerator gen;
    gen.lambda1 = 0.1;
    gen.lambda2 = 0.2;
    gen.mu2 = 0.1;
    gen.retx_prob = 1.0;
    RandomStream rng(1);
    CHECK_THROWS_AS(verify_gamma_theory(gen, 0, rng), std::invalid_argument);
    gen.retx_prob = 0.5;
    CHECK_THROWS_AS(verify_gamma_theory(gen, 100, rng), std::invalid_argument);
}

TEST_CASE("latency CSV ingestion") {
    const char* path = "test_latency_samples.csv";
    {
        std::ofstream f(path);
        f << "latency_ms\n12.5\n14.0\n9.75\n";
    }
    const auto xs = load_latency_csv(path);
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == 12.5);
    CHECK(xs[2] == 9.75);
    std::remove(path);

    {
        std::ofstream f(path);
        f << "wrong_header\n1.0\n";
    }
    CHECK_THROWS(load_latency_csv(path));
    std::remove(path);
}
