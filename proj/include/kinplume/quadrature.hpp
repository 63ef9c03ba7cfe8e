#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "kinplume/errors.hpp"

namespace kinplume::quad {

struct Options {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  int max_intervals = 4000;
  /// Initial uniform split of [a, b] before refinement starts.
  int initial_intervals = 1;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

namespace detail {

// 7-point Gauss-Legendre nodes embedded in the 15-point Kronrod rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) integration: the interval carrying the largest
/// error estimate is bisected until the total estimate is below
/// max(abs_tol, rel_tol * |value|). Throws ConvergenceError when max_intervals is reached.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result res;
  if (a == b) return res;
  std::priority_queue<detail::Segment> heap;
  const int n0 = std::max(1, opt.initial_intervals);
  double value = 0.0, error = 0.0;
  for (int k = 0; k < n0; ++k) {
    const double lo = a + (b - a) * k / n0;
    const double hi = (k + 1 == n0) ? b : a + (b - a) * (k + 1) / n0;
    auto s = detail::kronrod15(f, lo, hi);
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  res.evaluations = 15 * n0;
  int intervals = n0;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (intervals >= opt.max_intervals) {
      std::ostringstream os;
      os << "adaptive quadrature on [" << a << ", " << b << "] stopped at " << intervals
         << " intervals with error estimate " << error;
      throw ConvergenceError(os.str());
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    res.evaluations += 30;
    ++intervals;
    if (!std::isfinite(value)) throw ConvergenceError("quadrature produced a non-finite value");
  }
  // re-add to reduce drift from the running updates
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  res.value = value;
  res.error = error;
  res.intervals = intervals;
  return res;
}

/// Integral of f(tau) over [0, t] after the substitution tau = t sin^2(theta), which makes
/// 1/sqrt(tau) and 1/sqrt(t - tau) endpoint behaviour bounded.
template <class F>
Result integrate_residence(F&& f, double t, const Options& opt = {}) {
  auto g = [&](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return f(t * s * s) * 2.0 * t * s * c;
  };
  return integrate(g, 0.0, 0.5 * std::numbers::pi, opt);
}

/// Fixed n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(c + h * nodes[i]);
    return s * h;
  }
};

}  // namespace kinplume::quad
