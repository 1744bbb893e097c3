#include "mfd/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfd/specfun.hpp"

namespace mfd {

namespace {

constexpr double kLogUnderflow = -745.0;
const double kLnPi = std::log(kPi);
const double kLn2 = std::log(2.0);

void require_eps(CrossoverParam eps) {
  detail::require_domain(eps.epsilon() > 0.0, "crossover: require epsilon > 0");
}

void require_q(double q) {
  detail::require_domain(q >= 1.0 && std::isfinite(q), "crossover: require q >= 1");
}

// Trigonometric pieces of phi in (0, pi), written so that both endpoints
// keep full relative accuracy.
struct PhiTrig {
  double sin_phi;     // > 0
  double cos_phi;
  double sin_half;    // sin(phi/2)
  double cos_half;    // cos(phi/2), computed as sin((pi - phi)/2)
};

PhiTrig phi_trig(double phi) {
  const double comp = kPi - phi;
  const double near = std::min(phi, comp);
  PhiTrig t;
  t.sin_phi = std::sin(near);
  t.cos_phi = (phi <= 0.5 * kPi) ? std::cos(near) : -std::cos(near);
  t.sin_half = std::sin(0.5 * phi);
  t.cos_half = std::sin(0.5 * comp);
  return t;
}

// Panel edges on (0, pi): the integrands have boundary layers of width
// ~sqrt(eps) at both ends for small eps, and a peak of width ~1/sqrt(eps)
// around pi/2 for large eps.
std::vector<double> phi_breakpoints(double epsilon) {
  std::vector<double> pts{0.0, 0.5 * kPi, kPi};
  const double r = std::sqrt(epsilon);
  if (r < 1.0) {
    for (double k : {0.25, 1.0, 4.0, 16.0}) {
      const double d = k * r;
      if (d < 0.45 * kPi) {
        pts.push_back(d);
        pts.push_back(kPi - d);
      }
    }
  }
  if (epsilon > 1.0) {
    for (double k : {1.0, 3.0, 6.0, 12.0}) {
      const double d = k / r;
      if (d < 0.45 * kPi) {
        pts.push_back(0.5 * kPi - d);
        pts.push_back(0.5 * kPi + d);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

QuadratureOptions tight(double rel) {
  QuadratureOptions o;
  o.abs_tol = 1e-15;
  o.rel_tol = rel;
  o.max_subdivisions = 4000;
  return o;
}

}  // namespace

CrossoverParam::CrossoverParam(double epsilon) : epsilon_(epsilon) {
  detail::require_domain(epsilon >= 0.0 && std::isfinite(epsilon),
                         "CrossoverParam: require finite epsilon >= 0");
}

CrossoverParam CrossoverParam::from_alpha(double alpha, int n_dim) {
  detail::require_domain(alpha >= 0.0 && alpha <= 1.0, "CrossoverParam: require alpha in [0,1]");
  detail::require_domain(n_dim >= 1, "CrossoverParam: require N >= 1");
  return CrossoverParam(alpha * alpha * n_dim);
}

double pdf_oe_finite(double x, int n_dim) {
  detail::require_domain(n_dim >= 3, "pdf_oe_finite: require N >= 3");
  detail::require_domain(x >= 0.0 && x <= n_dim, "pdf_oe_finite: require 0 <= x <= N");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  const double n = n_dim;
  const double one_minus = 1.0 - x / n;
  // Normalized in x: the 1/N Jacobian from |c|^2 = x/N is included.
  const double head = -0.5 * std::log(n) + std::lgamma(n / 2) - std::lgamma((n - 1) / 2) - 0.5 * std::log(kPi * x);
  if (one_minus == 0.0) return n_dim == 3 ? std::exp(head) : 0.0;
  return std::exp(head + 0.5 * (n - 3) * std::log(one_minus));
}

double pdf_ue_finite(double x, int n_dim) {
  detail::require_domain(n_dim >= 2, "pdf_ue_finite: require N >= 2");
  detail::require_domain(x >= 0.0 && x <= n_dim, "pdf_ue_finite: require 0 <= x <= N");
  return (n_dim - 1.0) / n_dim * std::pow(1.0 - x / n_dim, n_dim - 2);
}

double pdf_oe_limit(double x) {
  detail::require_domain(x >= 0.0, "pdf_oe_limit: require x >= 0");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(-0.5 * x) / std::sqrt(2.0 * kPi * x);
}

double pdf_ue_limit(double x) {
  detail::require_domain(x >= 0.0, "pdf_ue_limit: require x >= 0");
  return std::exp(-x);
}

double cdf_oe_limit(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

double cdf_ue_limit(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

double pdf_crossover(CrossoverParam eps, double x, const QuadratureOptions& opts) {
  require_eps(eps);
  detail::require_domain(x >= 0.0 && std::isfinite(x), "pdf_crossover: require x >= 0");
  const double e = eps.epsilon();
  const double ln_prefactor = std::log(e) - kLn2 - 0.5 * kLnPi;

  // e^eps exp[-(eps + 2x sin^2(phi/2)) csc^2 phi]
  //   = exp[-eps cot^2 phi - x / (2 cos^2(phi/2))]
  auto integrand = [=](double phi) {
    const PhiTrig t = phi_trig(phi);
    if (t.sin_phi <= 0.0 || t.cos_half <= 0.0) return 0.0;
    const double csc2 = 1.0 / (t.sin_phi * t.sin_phi);
    const double cot2 = t.cos_phi * t.cos_phi * csc2;
    const double exponent = -e * cot2 - x / (2.0 * t.cos_half * t.cos_half);
    if (exponent < kLogUnderflow) return 0.0;
    const double a = e + 2.0 * x * t.sin_half * t.sin_half;
    const double log_value =
        ln_prefactor + exponent + std::log(2.0 * a * csc2 + 1.0) - 1.5 * std::log(a);
    return std::exp(log_value);
  };
  const auto pts = phi_breakpoints(e);
  return integrate_adaptive(integrand, std::span<const double>(pts), opts).value;
}

double pdf_crossover_log(CrossoverParam eps, double y, const QuadratureOptions& opts) {
  const double x = std::exp(y);
  if (x == 0.0) return 0.0;
  return x * pdf_crossover(eps, x, opts);
}

double moment_crossover(CrossoverParam eps, double q) {
  require_eps(eps);
  require_q(q);
  const double e = eps.epsilon();
  const double ln_prefactor =
      std::lgamma(q + 1.0) + (q + 0.5) * std::log(e) - (q + 2.0) * kLn2 - 0.5 * kLnPi;
  const QuadratureOptions inner = tight(1e-12);

  auto integrand = [=, &inner](double phi) {
    const PhiTrig t = phi_trig(phi);
    if (t.sin_phi <= 0.0 || t.sin_half <= 0.0) return 0.0;
    const double csc2 = 1.0 / (t.sin_phi * t.sin_phi);
    const double z = e * csc2;
    const double log_common =
        ln_prefactor - e * t.cos_phi * t.cos_phi * csc2 - (2.0 * q + 2.0) * std::log(t.sin_half);
    // z^(q+1) U(q+1, b, z) <= 1 for b < q + 2, so this bounds both terms.
    const double log_bound = log_common - (q + 1.0) * std::log(z) + std::log1p(2.0 * z);
    if (log_bound < kLogUnderflow) return 0.0;
    const double lu1 = tricomi_u_log(q + 1.0, q + 0.5, z, inner);
    const double lu2 = tricomi_u_log(q + 1.0, q + 1.5, z, inner);
    return std::exp(log_common + lu1) + std::exp(log_common + std::log(2.0 * z) + lu2);
  };
  const auto pts = phi_breakpoints(e);
  return integrate_adaptive(integrand, std::span<const double>(pts), tight(1e-10)).value;
}

double xlogx_crossover(CrossoverParam eps) {
  require_eps(eps);
  const QuadratureOptions inner = tight(1e-11);
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double p = pdf_crossover(eps, x, inner);
    return x * std::log(x) * p;
  };
  const std::vector<double> breaks{0.05, 0.3, 1.0, 3.0, 10.0, 30.0};
  return integrate_semi_infinite(integrand, 0.0, breaks, tight(1e-10)).value;
}

FractalDimensionPoint d_q_crossover(CrossoverParam eps, double q, int n_dim) {
  require_q(q);
  detail::require_domain(n_dim >= 3, "d_q_crossover: require N >= 3");
  const double ln_n = std::log(static_cast<double>(n_dim));
  return {q, n_dim, 1.0 - s_q_inf_crossover(eps, q) / ln_n};
}

double s_q_inf_crossover(CrossoverParam eps, double q) {
  require_q(q);
  if (q == 1.0) return xlogx_crossover(eps);
  return std::log(moment_crossover(eps, q)) / (q - 1.0);
}

FractalDimensionPoint d_q_oe(double q, int n_dim) {
  require_q(q);
  detail::require_domain(n_dim >= 3, "d_q_oe: require N >= 3");
  const double n = n_dim;
  const double ln_n = std::log(n);
  if (q == 1.0) return {q, n_dim, (digamma(0.5 * (n + 2.0)) - digamma(1.5)) / ln_n};
  const double ln_moment = ln_n + std::lgamma(0.5 * n) + std::lgamma(q + 0.5) - 0.5 * kLnPi -
                           std::lgamma(q + 0.5 * n);
  return {q, n_dim, -ln_moment / ((q - 1.0) * ln_n)};
}

FractalDimensionPoint d_q_ue(double q, int n_dim) {
  require_q(q);
  detail::require_domain(n_dim >= 2, "d_q_ue: require N >= 2");
  const double n = n_dim;
  const double ln_n = std::log(n);
  if (q == 1.0) return {q, n_dim, (-1.0 + kEulerGamma + digamma(n + 1.0)) / ln_n};
  // ln[q! N! / (N - 1 + q)!]
  const double ln_moment = std::lgamma(q + 1.0) + std::lgamma(n + 1.0) - std::lgamma(n + q);
  return {q, n_dim, -ln_moment / ((q - 1.0) * ln_n)};
}

double d_q_oe_asymptotic(double q, int n_dim) {
  detail::require_domain(n_dim >= 2, "d_q_oe_asymptotic: require N >= 2");
  return 1.0 - s_q_inf_oe(q) / std::log(static_cast<double>(n_dim));
}

double d_q_ue_asymptotic(double q, int n_dim) {
  detail::require_domain(n_dim >= 2, "d_q_ue_asymptotic: require N >= 2");
  return 1.0 - s_q_inf_ue(q) / std::log(static_cast<double>(n_dim));
}

double s_q_inf_oe(double q) {
  require_q(q);
  if (q == 1.0) return kLn2 + digamma(1.5);
  return (std::lgamma(q + 0.5) + q * kLn2 - 0.5 * kLnPi) / (q - 1.0);
}

double s_q_inf_ue(double q) {
  require_q(q);
  if (q == 1.0) return 1.0 - kEulerGamma;
  return std::lgamma(q + 1.0) / (q - 1.0);
}

// ---------------------------------------------------------------------------

CrossoverTable::CrossoverTable(CrossoverParam eps, double y_min, double y_max, int n_nodes)
    : epsilon_(eps.epsilon()) {
  require_eps(eps);
  detail::require_domain(y_min < y_max, "CrossoverTable: require y_min < y_max");
  detail::require_domain(n_nodes >= 4, "CrossoverTable: require at least 4 nodes");
  h_ = (y_max - y_min) / (n_nodes - 1);
  y_.resize(n_nodes);
  log_density_y_.resize(n_nodes);
  const QuadratureOptions opts = tight(1e-10);
  for (int i = 0; i < n_nodes; ++i) {
    y_[i] = (i == n_nodes - 1) ? y_max : y_min + i * h_;
    const double x = std::exp(y_[i]);
    log_density_y_[i] = y_[i] + std::log(pdf_crossover(eps, x, opts));
  }
  // Fourth-order differences; one-sided stencils at the two ends.
  slope_.resize(n_nodes);
  const auto& f = log_density_y_;
  for (int i = 0; i < n_nodes; ++i) {
    if (n_nodes < 5)
      slope_[i] = (f[std::min(i + 1, n_nodes - 1)] - f[std::max(i - 1, 0)]) /
                  (h_ * (std::min(i + 1, n_nodes - 1) - std::max(i - 1, 0)));
    else if (i < 2)
      slope_[i] = i == 0 ? (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h_)
                         : (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h_);
    else if (i > n_nodes - 3) {
      const int e = n_nodes - 1;
      slope_[i] = i == e ? (25 * f[e] - 48 * f[e - 1] + 36 * f[e - 2] - 16 * f[e - 3] + 3 * f[e - 4]) / (12 * h_)
                         : (3 * f[e] + 10 * f[e - 1] - 18 * f[e - 2] + 6 * f[e - 3] - f[e - 4]) / (12 * h_);
    } else
      slope_[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h_);
  }

  // Mass below the table, then segment masses of the interpolated density.
  const double x_min = std::exp(y_min);
  auto pdf_x = [&](double x) { return pdf_crossover(eps, x, opts); };
  std::vector<double> head_breaks;
  const double r = std::min(epsilon_, x_min);
  for (double k : {1e-3, 1e-2, 1e-1}) if (k * r < x_min) head_breaks.push_back(k * r);
  head_breaks.push_back(x_min);
  std::vector<double> pts{0.0};
  for (double b : head_breaks) if (b > pts.back()) pts.push_back(b);
  double mass = pts.size() >= 2 ? integrate_adaptive(pdf_x, std::span<const double>(pts), opts).value : 0.0;

  cumulative_.resize(n_nodes);
  cumulative_[0] = mass;
  for (int i = 1; i < n_nodes; ++i) {
    auto g = [&](double y) { return std::exp(interp_log_pdf_y(y)); };
    mass += integrate_adaptive(g, y_[i - 1], y_[i], tight(1e-12)).value;
    cumulative_[i] = mass;
  }
}

double CrossoverTable::interp_log_pdf_y(double y) const {
  const int n = static_cast<int>(y_.size());
  double pos = (y - y_.front()) / h_;
  int i = static_cast<int>(std::floor(pos));
  i = std::clamp(i, 0, n - 2);
  const double t = pos - i;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * log_density_y_[i] + h10 * h_ * slope_[i] + h01 * log_density_y_[i + 1] +
         h11 * h_ * slope_[i + 1];
}

double CrossoverTable::log_pdf(double x) const {
  detail::require_domain(x > 0.0, "CrossoverTable::log_pdf: require x > 0");
  const double y = std::log(x);
  // Small slack for rounding at the range ends.
  if (y < y_.front() - 1e-9 || y > y_.back() + 1e-9)
    throw DomainError("CrossoverTable::log_pdf: x outside tabulated range");
  return interp_log_pdf_y(y) - y;
}

double CrossoverTable::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double y = std::log(x);
  if (y <= y_.front()) {
    // Below the table the density is close to its x -> 0 form; scale the head mass.
    return cumulative_.front() * std::sqrt(x / std::exp(y_.front()));
  }
  if (y >= y_.back()) return cumulative_.back();
  const double pos = (y - y_.front()) / h_;
  const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, static_cast<int>(y_.size()) - 2);
  if (y <= y_[i]) return cumulative_[i];
  auto g = [&](double s) { return std::exp(interp_log_pdf_y(s)); };
  QuadratureOptions o = tight(1e-12);
  return cumulative_[i] + integrate_adaptive(g, y_[i], y, o).value;
}

double CrossoverTable::quantile(double u) const {
  detail::require_domain(u > 0.0 && u < 1.0, "CrossoverTable::quantile: require 0 < u < 1");
  if (u <= cumulative_.front()) return std::exp(y_.front());
  if (u >= cumulative_.back()) return std::exp(y_.back());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const int i = static_cast<int>(it - cumulative_.begin()) - 1;
  double lo = y_[i], hi = y_[i + 1];
  for (int iter = 0; iter < 60 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(std::exp(mid)) < u) lo = mid; else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace mfd
