#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace egonet::stats {

double mean(std::span<const double> xs);

// Unbiased sample variance (n-1 denominator). Requires xs.size() >= 2.
double sample_variance(std::span<const double> xs);
double sample_variance(std::span<const double> xs, double precomputed_mean);

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), evaluated with the Lentz continued
// fraction to relative tolerance 1e-14.
// https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
double regularized_incomplete_beta(double x, double a, double b);

// CDF of Student's t with (possibly fractional) df degrees of freedom.
double student_t_cdf(double x, double df);

// Two-sided tail probability of |T| >= |t| under Student's t with df dof.
double student_t_two_sided_p(double t, double df);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Kolmogorov-Smirnov statistic of a sample against Uniform(0,1).
double ks_uniform_statistic(std::vector<double> sample);

// Critical KS value at significance `alpha` using Stephens' approximation.
double ks_uniform_critical(std::size_t n, double alpha);

}  // namespace egonet::stats
