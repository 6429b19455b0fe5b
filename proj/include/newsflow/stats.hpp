#pragma once

#include <cstdint>
#include <span>

namespace newsflow::stats {

double mean(std::span<const double> xs);
// Unbiased (n-1) sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch's unequal-variance t test, two-sided. Throws DataError when either
/// sample has fewer than two values or both variances are zero.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct ZTestResult {
  double z = 0.0;
  double p = 1.0;
};

/// Pooled two-proportion z test, two-sided. Throws DataError when a total is
/// zero or the pooled proportion is 0 or 1.
ZTestResult two_proportion_z_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);

// Kolmogorov-Smirnov distance between the sample and Uniform(0,1).
double ks_uniform_statistic(std::span<const double> xs);
// Asymptotic KS critical value for sample size n at level alpha.
double ks_critical_value(std::size_t n, double alpha);

}  // namespace newsflow::stats
