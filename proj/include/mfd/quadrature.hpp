#pragma once

// Adaptive quadrature on finite and semi-infinite intervals.
//
// The workhorse is a globally adaptive 7/15-point Gauss-Kronrod scheme
// (QUADPACK QAG strategy): the interval with the largest error estimate is
// bisected until the summed estimate meets max(abs_tol, rel_tol*|I|).
// A double-exponential (tanh-sinh) rule is provided for integrands with
// endpoint singularities or very fast endpoint decay.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "mfd/errors.hpp"

namespace mfd {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  bool throw_on_failure = true;
};

namespace detail {

struct GaussKronrod15 {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // 7-point Gauss weights at xgk[1], xgk[3], xgk[5], xgk[7].
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double lo, double hi) {
  using R = GaussKronrod15;
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * R::wgk[7];
  double gauss = fc * R::wg[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * R::xgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += R::wgk[j] * (f1[j] + f2[j]);
    abs_sum += R::wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += R::wg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = R::wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += R::wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = kronrod * half;
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * abs_sum, err);
  return {lo, hi, value, err};
}

}  // namespace detail

/// Integrates f over the union of consecutive intervals [points[i], points[i+1]].
/// Breakpoints let callers place panel edges at known features (boundary
/// layers, kinks, peaks) before adaptive refinement starts.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> points,
                                    const QuadratureOptions& opts = {}) {
  if (points.size() < 2) throw DomainError("integrate_adaptive: need at least two points");
  if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0))
    throw DomainError("integrate_adaptive: tolerances must be positive");
  for (size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1] < points[i]))
      throw DomainError("integrate_adaptive: points must be strictly increasing");

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, total_err = 0.0;
  long evals = 0;
  for (size_t i = 1; i < points.size(); ++i) {
    auto p = detail::gk15(f, points[i - 1], points[i]);
    evals += 15;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  int splits = 0;
  while (total_err > target() && splits < opts.max_subdivisions) {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    // Interval collapsed to adjacent doubles: no further progress possible.
    if (!(worst.lo < mid && mid < worst.hi)) break;
    heap.pop();
    auto left = detail::gk15(f, worst.lo, mid);
    auto right = detail::gk15(f, mid, worst.hi);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum to shed drift from the incremental updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  QuadratureResult out{total, total_err, evals};
  if (!std::isfinite(total))
    throw ConvergenceError("integrate_adaptive: non-finite integral");
  if (opts.throw_on_failure && total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)))
    throw ConvergenceError("integrate_adaptive: error estimate " + std::to_string(total_err) +
                           " exceeds tolerance after " + std::to_string(splits) + " subdivisions");
  return out;
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  if (!(lo < hi)) throw DomainError("integrate_adaptive: require lo < hi");
  const std::array<double, 2> pts{lo, hi};
  return integrate_adaptive(f, std::span<const double>(pts), opts);
}

/// Integrates f over [lo, inf) through t = lo + u/(1-u), u in (0,1).
/// Optional breakpoints are given in the original variable t.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double lo, std::span<const double> breaks = {},
                                         const QuadratureOptions& opts = {}) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double t = lo + u / one_minus;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  std::vector<double> pts{0.0};
  for (double t : breaks) {
    if (t <= lo) continue;
    const double s = t - lo;
    const double u = s / (1.0 + s);
    if (u > pts.back() && u < 1.0) pts.push_back(u);
  }
  pts.push_back(1.0);
  return integrate_adaptive(mapped, std::span<const double>(pts), opts);
}

/// Tanh-sinh (double exponential) quadrature on a finite interval.
/// The integrand is never evaluated at the endpoints, which makes the rule
/// robust against integrable endpoint singularities.
template <class F>
QuadratureResult integrate_tanh_sinh(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  if (!(lo < hi)) throw DomainError("integrate_tanh_sinh: require lo < hi");
  constexpr double half_pi = 1.57079632679489661923;
  constexpr double t_max = 6.5;  // weights below 1e-300 beyond this
  const double half = 0.5 * (hi - lo);
  long evals = 0;

  // Abscissae are written as distance from the nearer endpoint so that
  // points close to an endpoint do not collapse onto it.
  auto term = [&](double t) {
    const double s = half_pi * std::sinh(t);
    const double c = std::cosh(s);
    const double w = half_pi * std::cosh(t) / (c * c);
    const double dist = half / (std::exp(s) * c);  // half * (1 - tanh(s))
    double sum = 0.0;
    if (dist > 0.0) {
      const double xl = lo + dist;
      const double xr = hi - dist;
      if (xl > lo && xl < hi) sum += f(xl);
      if (xr > lo && xr < hi && t != 0.0) sum += f(xr);
      evals += (t != 0.0) ? 2 : 1;
    }
    return w * sum;
  };

  double h = 1.0;
  double sum = term(0.0);
  for (double t = h; t <= t_max; t += h) sum += term(t);
  double estimate = h * half * sum;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += term(t);
    const double next = h * half * sum;
    err = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(estimate))) break;
  }
  if (!std::isfinite(estimate)) throw ConvergenceError("integrate_tanh_sinh: non-finite integral");
  if (opts.throw_on_failure && err > std::max(opts.abs_tol, opts.rel_tol * std::abs(estimate)))
    throw ConvergenceError("integrate_tanh_sinh: error estimate exceeds tolerance");
  return {estimate, err, std::max(evals, 1L)};
}

}  // namespace mfd
