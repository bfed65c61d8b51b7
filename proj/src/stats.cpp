#include "egonet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace egonet::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  return sample_variance(xs, mean(xs));
}

double sample_variance(std::span<const double> xs, double precomputed_mean) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance needs n >= 2");
  double acc = 0.0;
  for (double x : xs) acc += (x - precomputed_mean) * (x - precomputed_mean);
  return acc / static_cast<double>(xs.size() - 1);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double tol = 1e-14;
  constexpr int max_terms = 100000;

  auto numer = [&](int n) -> double {
    if (n % 2 == 0) {
      const double m = n / 2;
      return m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    }
    const double m = (n - 1) / 2;
    return -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
  };

  double ret = 1.0;  // denominator terms are all 1
  double c = ret;
  double d = 0.0;
  for (int n = 1; n < max_terms; ++n) {
    const double an = numer(n);
    d = 1.0 + an * d;
    if (d == 0.0) d = tiny;
    c = 1.0 + an / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double mult = c * d;
    ret *= mult;
    if (std::fabs(mult - 1.0) <= tol) break;
  }
  return ret;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0)) return NAN;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_x = std::log(x);
  const double log_y = std::log1p(-x);
  if (x <= (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_x * a + log_y * b - log_beta(a, b)) / a / incomplete_beta_cf(x, a, b);
  }
  return 1.0 - std::exp(log_y * b + log_x * a - log_beta(a, b)) / b / incomplete_beta_cf(1.0 - x, b, a);
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) return NAN;
  const double tail = regularized_incomplete_beta(df / (x * x + df), df / 2.0, 0.5) / 2.0;
  return x >= 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) return NAN;
  return regularized_incomplete_beta(df / (t * t + df), df / 2.0, 0.5);
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman_rho needs two equal-length samples, n >= 2");
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double ks_uniform_statistic(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_uniform_statistic needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double x = sample[i];
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x);
    d = std::max(d, x - static_cast<double>(i) / n);
  }
  return d;
}

double ks_uniform_critical(std::size_t n, double alpha) {
  // c(alpha) = sqrt(-0.5 * ln(alpha/2)); Stephens' denominator corrects for
  // finite samples.
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double sn = std::sqrt(static_cast<double>(n));
  return c / (sn + 0.12 + 0.11 / sn);
}

}  // namespace egonet::stats
