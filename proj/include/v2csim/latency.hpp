#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "v2csim/random.hpp"

namespace v2csim {

enum class Family { Gamma, Normal, Nakagami, Rayleigh };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Parameterized latency distribution; times in milliseconds.
struct DistributionSpec {
    Family family = Family::Gamma;
    // Gamma: p1=shape k, p2=scale theta (ms)
    // Normal: p1=mean (ms), p2=stddev (ms)
    // Nakagami: p1=shape m, p2=spread omega (ms^2)
    // Rayleigh: p1=scale sigma (ms), p2 unused
    double p1 = 1.0;
    double p2 = 1.0;

    void validate() const;
    double analytic_mean() const;
};

struct LatencyHistogram {
    std::vector<double> bin_edges;  // size = bins + 1, strictly increasing
    std::vector<double> densities;  // size = bins, integrates to 1

    void validate() const;
};

struct FitResult {
    DistributionSpec spec;
    double sse = 0.0;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Appendix-style end-to-end latency generator. Rates in 1/ms, delays in ms.
struct NodeDelay {
    enum class Kind { Constant, Exponential } kind = Kind::Constant;
    double value = 0.0;  // constant delay (ms) or exponential rate (1/ms)

    double sample(RandomStream& rng) const;
    double mean() const;
};

struct QueueingGenerator {
    double lambda1 = 0.05;  // packet arrival rate (1/ms)
    double lambda2 = 0.15;  // service rate (1/ms)
    double mu2 = 0.1;       // retransmission rate (1/ms)
    double retx_prob = 0.0; // probability of one HARQ retransmission
    double harq_fixed = 0.0;  // fixed HARQ latency C (ms)
    int n_max = 1;            // max retransmission count
    std::vector<NodeDelay> node_delays;  // l_TN, l_CN, l_UPF-AS, l_AS

    void validate() const;
    double analytic_mean() const;
};

struct ZeroLatency {};

struct LatencyProfile {
    std::string name = "NL";
    std::variant<ZeroLatency, DistributionSpec, QueueingGenerator> source = ZeroLatency{};
};

// probability density, x in ms
double pdf(const DistributionSpec& spec, double x);

// one draw in ms; Normal is rejection-truncated at 0
double sample(const DistributionSpec& spec, RandomStream& rng);
double sample(const LatencyProfile& profile, RandomStream& rng);

// Freedman-Diaconis histogram normalized to unit area
LatencyHistogram make_histogram(const std::vector<double>& samples);

// Maximum-likelihood / moment fit of one family plus SSE against the
// sample histogram. Requires >= 100 nonnegative samples.
FitResult fit(const std::vector<double>& samples, Family family);
FitResult fit(const std::vector<double>& samples, Family family,
              const LatencyHistogram& hist);

// All four families, sorted ascending by SSE with a small parsimony
// factor on two-parameter families (Nakagami nests Rayleigh, so raw SSE
// ties on Rayleigh data); remaining ties by enumeration order.
std::vector<FitResult> rank_families(const std::vector<double>& samples);

double queueing_sample(const QueueingGenerator& gen, RandomStream& rng);

struct GammaTheoryReport {
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    double analytic_mean = 0.0;      // 2/mu
    double analytic_variance = 0.0;  // 2/mu^2
    double ks_distance = 0.0;        // vs Gamma(2, 1/mu)
};

// Requires gen configured with retx_prob=1, mu2 = lambda2-lambda1, zero
// node delays and harq_fixed; throws std::invalid_argument otherwise.
GammaTheoryReport verify_gamma_theory(const QueueingGenerator& gen,
                                      std::size_t n, RandomStream& rng);

// Single-column CSV with header `latency_ms`.
std::vector<double> load_latency_csv(const std::string& path);

}  // namespace v2csim
