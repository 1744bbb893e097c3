#include "mfd/specfun.hpp"

#include <cmath>

namespace mfd {

double ln_gamma(double z) {
  detail::require_domain(z > 0.0 && std::isfinite(z), "ln_gamma: require z > 0");
  return std::lgamma(z);
}

double digamma(double z) {
  detail::require_domain(z > 0.0 && std::isfinite(z), "digamma: require z > 0");
  double shift = 0.0;
  while (z < 12.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  const double r = 1.0 / (z * z);
  // Bernoulli terms B_2k / (2k z^2k), k = 1..7
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r * (1.0 / 12)))))));
  return shift + std::log(z) - 0.5 / z - series;
}

double tricomi_u_scaled(double a, double b, double z, const QuadratureOptions& opts) {
  detail::require_domain(a > 0.0, "tricomi_u: require a > 0");
  detail::require_domain(z > 0.0 && std::isfinite(z), "tricomi_u: require z > 0");
  const double c = b - a - 1.0;
  const double lg = std::lgamma(a);
  auto integrand = [=](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(-s + (a - 1.0) * std::log(s) + c * std::log1p(s / z) - lg);
  };
  // The integrand peaks near s = a - 1 (for c ~ 0); seed panels around it
  // and at the scale z where the (1+s/z) factor turns over.
  std::vector<double> breaks;
  const double peak = std::max(a - 1.0, 0.0);
  for (double s : {0.25 * (peak + 1.0), peak + 1.0, 2.0 * (peak + 1.0) + 4.0, 4.0 * (peak + 1.0) + 16.0})
    breaks.push_back(s);
  if (z < breaks.back()) breaks.push_back(z);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  QuadratureOptions local = opts;
  local.abs_tol = std::min(opts.abs_tol, 1e-14);
  local.rel_tol = std::min(opts.rel_tol, 1e-11);
  return integrate_semi_infinite(integrand, 0.0, breaks, local).value;
}

double tricomi_u_log(double a, double b, double z, const QuadratureOptions& opts) {
  const double scaled = tricomi_u_scaled(a, b, z, opts);
  if (!(scaled > 0.0)) throw ConvergenceError("tricomi_u: non-positive integral");
  return std::log(scaled) - a * std::log(z);
}

double tricomi_u(double a, double b, double z, const QuadratureOptions& opts) {
  return std::exp(tricomi_u_log(a, b, z, opts));
}

double elliptic_k_modulus(double k) {
  detail::require_domain(k >= 0.0 && k < 1.0, "elliptic_k_modulus: require 0 <= k < 1");
  return std::comp_ellint_1(k);
}

}  // namespace mfd
