#pragma once

// Multifractal observables of eigenvectors.
//
// Everything here is a pure function of immutable eigen-systems. The
// accumulators exist so that large ensembles can be reduced member by
// member without holding every eigen-system in memory; merging partial
// accumulators in member order gives results that do not depend on how
// members were distributed across workers.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mfd/ensembles.hpp"
#include "mfd/errors.hpp"

namespace mfd {

/// Per-eigenvector moments I_q = sum |c_i|^(2q) and derived dimensions.
struct StateStatistics {
  std::vector<double> q_grid;
  std::vector<double> i_q;
  std::vector<double> d_q;
  std::vector<double> s_q;  // ln N (1 - d_q)
  int n_dim = 0;
};

struct EigenvalueWindow {
  double lo;
  double hi;
  bool contains(double e) const { return e >= lo && e <= hi; }
};

struct DqEstimate {
  double q;
  double d_q;              // -ln <I_q> / ((q-1) ln N); entropy average at q = 1
  double s_q;              // ln N (1 - d_q)
  double mean_state_d_q;   // <D_q> over states, >= d_q by Jensen
  long n_states;
};

struct SpectralProfile {
  Eigen::VectorXd eigenvalue;
  Eigen::VectorXd d1, d2, s1, s2;
  int n_members = 0;
};

struct ComponentHistogram {
  std::vector<double> edges;    // n_bins + 1, in y = ln x
  std::vector<double> density;  // normalized over in-range samples
  long total = 0;               // in-range samples
  long below = 0;               // y < edges.front() (including x = 0)
  long above = 0;
};

struct EpsilonFit {
  double eps_hat = 0.0;
  double neg_log_likelihood = 0.0;
  long n_samples = 0;
  bool converged = false;
  bool boundary_hit = false;
  int evaluations = 0;
};

struct FitOptions {
  double eps_lo = 1e-3;
  double eps_hi = 1e5;
  double tol_log_eps = 1e-3;
  int table_nodes = 160;
  long min_samples = 1000;
};

namespace detail {

template <class Derived>
Eigen::VectorXd probabilities(const Eigen::MatrixBase<Derived>& v) {
  Eigen::VectorXd p = v.cwiseAbs2();
  const double norm2 = p.sum();
  if (!(std::abs(norm2 - 1.0) <= 2e-10))
    throw DomainError("eigenvector norm violation: |v|^2 = " + std::to_string(norm2));
  return p;
}

double entropy(const Eigen::VectorXd& p);
double moment(const Eigen::VectorXd& p, double q);

}  // namespace detail

/// x_i = N |v_i|^2 for a unit vector v.
template <class Derived>
Eigen::VectorXd scaled_components(const Eigen::MatrixBase<Derived>& v) {
  return static_cast<double>(v.size()) * detail::probabilities(v);
}

StateStatistics state_statistics_from_probabilities(const Eigen::VectorXd& p,
                                                    std::span<const double> q_grid);

template <class Derived>
StateStatistics state_statistics(const Eigen::MatrixBase<Derived>& v, std::span<const double> q_grid) {
  return state_statistics_from_probabilities(detail::probabilities(v), q_grid);
}

class MomentAccumulator {
public:
  MomentAccumulator(std::vector<double> q_grid, int n_dim);

  template <class Derived>
  void add_state(const Eigen::MatrixBase<Derived>& v) {
    add_probabilities(detail::probabilities(v));
  }

  template <class Scalar>
  void add(const EigenSystem<Scalar>& system, std::optional<EigenvalueWindow> window = {}) {
    check_dim(system.dim());
    for (int j = 0; j < system.dim(); ++j)
      if (!window || window->contains(system.eigenvalues(j))) add_state(system.eigenvectors.col(j));
  }

  void add_probabilities(const Eigen::VectorXd& p);
  void merge(const MomentAccumulator& other);
  long n_states() const { return n_states_; }
  std::vector<DqEstimate> result() const;

private:
  void check_dim(int n) const;

  std::vector<double> q_grid_;
  int n_dim_;
  std::vector<double> sum_moment_;   // I_q, or the entropy sum at q = 1
  std::vector<double> sum_state_dq_;
  long n_states_ = 0;
};

template <class Scalar>
std::vector<DqEstimate> ensemble_avg_dq(std::span<const EigenSystem<Scalar>> systems,
                                        std::span<const double> q_grid,
                                        std::optional<EigenvalueWindow> window = {}) {
  if (systems.empty()) throw DataError("ensemble_avg_dq: no systems");
  MomentAccumulator acc(std::vector<double>(q_grid.begin(), q_grid.end()), systems.front().dim());
  for (const auto& s : systems) acc.add(s, window);
  return acc.result();
}

class ProfileAccumulator {
public:
  explicit ProfileAccumulator(int n_dim);

  template <class Scalar>
  void add(const EigenSystem<Scalar>& system) {
    if (system.dim() != n_dim_) throw DataError("spectral_profile: dimension mismatch");
    for (int j = 0; j < n_dim_; ++j) add_state(j, system.eigenvalues(j), detail::probabilities(system.eigenvectors.col(j)));
    ++n_members_;
  }

  void merge(const ProfileAccumulator& other);
  SpectralProfile result() const;
  int n_members() const { return n_members_; }

private:
  void add_state(int index, double eigenvalue, const Eigen::VectorXd& p);

  int n_dim_;
  int n_members_ = 0;
  Eigen::VectorXd sum_e_, sum_d1_, sum_d2_;
};

template <class Scalar>
SpectralProfile spectral_profile(std::span<const EigenSystem<Scalar>> systems) {
  if (systems.empty()) throw DataError("spectral_profile: no systems");
  ProfileAccumulator acc(systems.front().dim());
  for (const auto& s : systems) acc.add(s);
  return acc.result();
}

class HistogramAccumulator {
public:
  HistogramAccumulator(int n_bins = 81, double y_lo = -12.0, double y_hi = 3.0);

  template <class Scalar>
  void add(const EigenSystem<Scalar>& system) {
    for (int j = 0; j < system.dim(); ++j) add_components(scaled_components(system.eigenvectors.col(j)));
  }

  void add_components(const Eigen::VectorXd& x);
  void merge(const HistogramAccumulator& other);
  ComponentHistogram result() const;

private:
  int n_bins_;
  double y_lo_, y_hi_;
  std::vector<long> counts_;
  long below_ = 0, above_ = 0;
};

template <class Scalar>
ComponentHistogram component_histogram(std::span<const EigenSystem<Scalar>> systems, int n_bins = 81,
                                       double y_lo = -12.0, double y_hi = 3.0) {
  HistogramAccumulator acc(n_bins, y_lo, y_hi);
  for (const auto& s : systems) acc.add(s);
  return acc.result();
}

/// Maximum-likelihood eps for samples of x under P(eps, x), searched in ln eps.
EpsilonFit fit_epsilon(std::span<const double> x_samples, const FitOptions& opts = {});

/// Kolmogorov-Smirnov distance between the empirical distribution of the
/// samples and a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic one-sample KS critical value at significance level `alpha`
/// (Stephens' small-sample correction included).
double ks_critical_value(long n, double alpha = 0.01);

/// Minimizes f over [lo, hi] by Brent's golden-section / parabolic search.
struct ScalarMinimum {
  double x;
  double f;
  int evaluations;
  bool converged;
};
ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                             int max_iter = 200);

}  // namespace mfd
