#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "dlp/common.hpp"

namespace dlp {

struct GaussLegendreRule {
  std::vector<double> nodes;  // ascending in (-1, 1)
  std::vector<double> weights;
};

namespace detail {

// (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

// Newton iteration on P_n from the usual cosine initial guesses.
inline GaussLegendreRule gauss_legendre(int n) {
  if (n < 2) throw InvalidArgument("gauss_legendre: need at least two nodes");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Weights R_k, k = 0..N-1, of the periodic logarithmic quadrature
//
//   int_0^{2pi} log(4 sin^2((t_i - s)/2)) f(s) ds  ~  sum_j R_{|i-j| mod N} f(t_j),
//
// exact for trigonometric polynomials of degree < N/2 on the equispaced grid t_j = 2pi j/N.
inline std::vector<double> log_sine_weights(int N) {
  if (N < 2 || N % 2 != 0) throw InvalidArgument("log_sine_weights: N must be even and >= 2");
  const int n = N / 2;
  std::vector<double> r(N);
  for (int k = 0; k < N; ++k) {
    const double d = pi * k / n;
    double sum = 0.0;
    for (int m = 1; m < n; ++m) sum += std::cos(m * d) / m;
    r[k] = -(2.0 * pi / n) * sum - (pi / (double(n) * n)) * std::cos(n * d);
  }
  return r;
}

}  // namespace dlp
