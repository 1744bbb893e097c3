#include "mfd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfd/crossover.hpp"

namespace mfd {

namespace detail {

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));  // 0 ln 0 = 0
  return h;
}

double moment(const Eigen::VectorXd& p, double q) {
  if (q == 2.0) return p.squaredNorm();
  if (q == 1.0) return p.sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) s += std::pow(p(i), q);
  return s;
}

}  // namespace detail

namespace {

void check_q_grid(std::span<const double> q_grid) {
  if (q_grid.empty()) throw DomainError("q grid is empty");
  for (double q : q_grid)
    detail::require_domain(q >= 1.0 && std::isfinite(q), "q grid: require q >= 1");
}

double dimension_from(double moment_or_entropy, double q, double ln_n) {
  if (q == 1.0) return moment_or_entropy / ln_n;
  return -std::log(moment_or_entropy) / ((q - 1.0) * ln_n);
}

}  // namespace

StateStatistics state_statistics_from_probabilities(const Eigen::VectorXd& p,
                                                    std::span<const double> q_grid) {
  check_q_grid(q_grid);
  const int n = static_cast<int>(p.size());
  detail::require_domain(n >= 2, "state_statistics: require N >= 2");
  const double ln_n = std::log(static_cast<double>(n));
  StateStatistics st;
  st.n_dim = n;
  st.q_grid.assign(q_grid.begin(), q_grid.end());
  for (double q : q_grid) {
    const double iq = detail::moment(p, q);
    const double d = (q == 1.0) ? detail::entropy(p) / ln_n : dimension_from(iq, q, ln_n);
    st.i_q.push_back(iq);
    st.d_q.push_back(d);
    st.s_q.push_back(ln_n * (1.0 - d));
  }
  return st;
}

// ---------------------------------------------------------------------------

MomentAccumulator::MomentAccumulator(std::vector<double> q_grid, int n_dim)
    : q_grid_(std::move(q_grid)), n_dim_(n_dim) {
  check_q_grid(q_grid_);
  detail::require_domain(n_dim >= 2, "MomentAccumulator: require N >= 2");
  sum_moment_.assign(q_grid_.size(), 0.0);
  sum_state_dq_.assign(q_grid_.size(), 0.0);
}

void MomentAccumulator::check_dim(int n) const {
  if (n != n_dim_) throw DataError("ensemble_avg_dq: systems do not share N");
}

void MomentAccumulator::add_probabilities(const Eigen::VectorXd& p) {
  check_dim(static_cast<int>(p.size()));
  const double ln_n = std::log(static_cast<double>(n_dim_));
  const double h = detail::entropy(p);
  for (size_t k = 0; k < q_grid_.size(); ++k) {
    const double q = q_grid_[k];
    const double value = (q == 1.0) ? h : detail::moment(p, q);
    sum_moment_[k] += value;
    sum_state_dq_[k] += dimension_from(value, q, ln_n);
  }
  ++n_states_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.q_grid_ != q_grid_ || other.n_dim_ != n_dim_)
    throw DataError("MomentAccumulator::merge: incompatible accumulators");
  for (size_t k = 0; k < q_grid_.size(); ++k) {
    sum_moment_[k] += other.sum_moment_[k];
    sum_state_dq_[k] += other.sum_state_dq_[k];
  }
  n_states_ += other.n_states_;
}

std::vector<DqEstimate> MomentAccumulator::result() const {
  if (n_states_ == 0) throw DataError("ensemble_avg_dq: empty selection");
  const double ln_n = std::log(static_cast<double>(n_dim_));
  std::vector<DqEstimate> out;
  for (size_t k = 0; k < q_grid_.size(); ++k) {
    const double mean = sum_moment_[k] / n_states_;
    const double d = dimension_from(mean, q_grid_[k], ln_n);
    out.push_back({q_grid_[k], d, ln_n * (1.0 - d), sum_state_dq_[k] / n_states_, n_states_});
  }
  return out;
}

// ---------------------------------------------------------------------------

ProfileAccumulator::ProfileAccumulator(int n_dim)
    : n_dim_(n_dim),
      sum_e_(Eigen::VectorXd::Zero(n_dim)),
      sum_d1_(Eigen::VectorXd::Zero(n_dim)),
      sum_d2_(Eigen::VectorXd::Zero(n_dim)) {
  detail::require_domain(n_dim >= 2, "ProfileAccumulator: require N >= 2");
}

void ProfileAccumulator::add_state(int index, double eigenvalue, const Eigen::VectorXd& p) {
  const double ln_n = std::log(static_cast<double>(n_dim_));
  sum_e_(index) += eigenvalue;
  sum_d1_(index) += detail::entropy(p) / ln_n;
  sum_d2_(index) += -std::log(p.squaredNorm()) / ln_n;
}

void ProfileAccumulator::merge(const ProfileAccumulator& other) {
  if (other.n_dim_ != n_dim_) throw DataError("ProfileAccumulator::merge: dimension mismatch");
  sum_e_ += other.sum_e_;
  sum_d1_ += other.sum_d1_;
  sum_d2_ += other.sum_d2_;
  n_members_ += other.n_members_;
}

SpectralProfile ProfileAccumulator::result() const {
  if (n_members_ == 0) throw DataError("spectral_profile: no members");
  const double ln_n = std::log(static_cast<double>(n_dim_));
  SpectralProfile out;
  out.n_members = n_members_;
  out.eigenvalue = sum_e_ / n_members_;
  out.d1 = sum_d1_ / n_members_;
  out.d2 = sum_d2_ / n_members_;
  out.s1 = ln_n * (1.0 - out.d1.array());
  out.s2 = ln_n * (1.0 - out.d2.array());
  return out;
}

// ---------------------------------------------------------------------------

HistogramAccumulator::HistogramAccumulator(int n_bins, double y_lo, double y_hi)
    : n_bins_(n_bins), y_lo_(y_lo), y_hi_(y_hi), counts_(static_cast<size_t>(std::max(n_bins, 0)), 0) {
  detail::require_domain(n_bins >= 10, "component_histogram: require n_bins >= 10");
  detail::require_domain(y_lo < y_hi, "component_histogram: require y_lo < y_hi");
}

void HistogramAccumulator::add_components(const Eigen::VectorXd& x) {
  const double width = (y_hi_ - y_lo_) / n_bins_;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0)) {
      ++below_;
      continue;
    }
    const double y = std::log(x(i));
    if (y < y_lo_) {
      ++below_;
    } else if (y >= y_hi_) {
      ++above_;
    } else {
      const int bin = std::min(static_cast<int>((y - y_lo_) / width), n_bins_ - 1);
      ++counts_[bin];
    }
  }
}

void HistogramAccumulator::merge(const HistogramAccumulator& other) {
  if (other.n_bins_ != n_bins_ || other.y_lo_ != y_lo_ || other.y_hi_ != y_hi_)
    throw DataError("HistogramAccumulator::merge: incompatible binning");
  for (int b = 0; b < n_bins_; ++b) counts_[b] += other.counts_[b];
  below_ += other.below_;
  above_ += other.above_;
}

ComponentHistogram HistogramAccumulator::result() const {
  ComponentHistogram h;
  const double width = (y_hi_ - y_lo_) / n_bins_;
  for (int b = 0; b <= n_bins_; ++b) h.edges.push_back(y_lo_ + b * width);
  h.edges.back() = y_hi_;
  for (long c : counts_) h.total += c;
  if (h.total == 0) throw DataError("component_histogram: no samples in range");
  for (long c : counts_) h.density.push_back(static_cast<double>(c) / (h.total * width));
  h.below = below_;
  h.above = above_;
  return h;
}

// ---------------------------------------------------------------------------

ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                             int max_iter) {
  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt 5) / 2
  constexpr double kSqrtEps = 1.4901161193847656e-08;
  double a = lo, b = hi;
  double x = a + kGolden * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int evals = 1;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol1 = kSqrtEps * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) return {x, fx, evals, true};

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // Parabola through (v, fv), (w, fw), (x, fx).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < m) ? b - x : a - x;
      d = kGolden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    ++evals;
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals, false};
}

EpsilonFit fit_epsilon(std::span<const double> x_samples, const FitOptions& opts) {
  detail::require_domain(opts.eps_lo > 0.0 && opts.eps_lo < opts.eps_hi, "fit_epsilon: require 0 < eps_lo < eps_hi");
  const long n = static_cast<long>(x_samples.size());
  if (n < opts.min_samples)
    throw DataError("fit_epsilon: need at least " + std::to_string(opts.min_samples) + " samples");
  double x_min = std::numeric_limits<double>::infinity(), x_max = 0.0;
  for (double x : x_samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DataError("fit_epsilon: samples must be finite and > 0");
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  if (x_max <= x_min * (1.0 + 1e-9)) throw DataError("fit_epsilon: degenerate samples (all equal)");

  const double y_lo = std::log(x_min), y_hi = std::log(x_max);
  auto nll = [&](double log_eps) {
    const CrossoverTable table(CrossoverParam(std::exp(log_eps)), y_lo, y_hi, opts.table_nodes);
    double s = 0.0;
    for (double x : x_samples) s -= table.log_pdf(x);
    return s;
  };
  const double lo = std::log(opts.eps_lo), hi = std::log(opts.eps_hi);
  const ScalarMinimum m = brent_minimize(nll, lo, hi, opts.tol_log_eps);

  EpsilonFit fit;
  fit.eps_hat = std::exp(m.x);
  fit.neg_log_likelihood = m.f;
  fit.n_samples = n;
  fit.converged = m.converged && std::isfinite(m.f);
  fit.boundary_hit = fit.eps_hat <= 1.01 * opts.eps_lo || fit.eps_hat >= 0.99 * opts.eps_hi;
  fit.evaluations = m.evaluations;
  if (!std::isfinite(m.f)) throw ConvergenceError("fit_epsilon: non-finite likelihood");
  return fit;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DataError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical_value(long n, double alpha) {
  detail::require_domain(n >= 1, "ks_critical_value: require n >= 1");
  detail::require_domain(alpha > 0.0 && alpha < 1.0, "ks_critical_value: require 0 < alpha < 1");
  // Kolmogorov distribution quantile: c(alpha) = sqrt(-ln(alpha/2)/2).
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

}  // namespace mfd
