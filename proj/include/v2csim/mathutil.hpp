#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace v2csim {

double digamma(double x);

// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
// (not required to be sorted) and an analytic CDF.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// p-th sample quantile (linear interpolation), p in [0,1]
double quantile(std::vector<double> sorted, double p);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased

// Upper-tail p-value of Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

// One-sided paired t-test that mean(a - b) > 0; returns the p-value.
double paired_t_test_greater(const std::vector<double>& a,
                             const std::vector<double>& b);

}  // namespace v2csim
