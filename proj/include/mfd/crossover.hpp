#pragma once

// Eigenvector-component statistics for the orthogonal (OE), unitary (UE) and
// orthogonal-to-unitary crossover ensembles, in the scaled intensity
// x = N |c|^2.

#include <vector>

#include "mfd/quadrature.hpp"

namespace mfd {

/// Rescaled crossover strength eps = alpha^2 N. 0 is the OE limit, +inf the UE limit.
class CrossoverParam {
public:
  explicit CrossoverParam(double epsilon);
  static CrossoverParam from_alpha(double alpha, int n_dim);
  double epsilon() const { return epsilon_; }

private:
  double epsilon_;
};

struct FractalDimensionPoint {
  double q;
  int n_dim;
  double value;
};

// Finite-N and N -> inf (Porter-Thomas) densities of x.
double pdf_oe_finite(double x, int n_dim);
double pdf_ue_finite(double x, int n_dim);
double pdf_oe_limit(double x);
double pdf_ue_limit(double x);
double cdf_oe_limit(double x);
double cdf_ue_limit(double x);

/// Crossover density P(eps, x), single phi-integral form. Requires eps > 0.
double pdf_crossover(CrossoverParam eps, double x, const QuadratureOptions& opts = {});

/// Density of y = ln x: e^y P(eps, e^y).
double pdf_crossover_log(CrossoverParam eps, double y, const QuadratureOptions& opts = {});

/// <x^q> under P(eps, x) through the Tricomi-U representation; q >= 1 real.
double moment_crossover(CrossoverParam eps, double q);

/// <x ln x> under P(eps, x) by nested quadrature.
double xlogx_crossover(CrossoverParam eps);

/// Crossover fractal dimension 1 - ln<x^q>/((q-1) ln N); q = 1 uses <x ln x>.
FractalDimensionPoint d_q_crossover(CrossoverParam eps, double q, int n_dim);

/// N -> inf shifted-scaled dimension ln<x^q>/(q-1); <x ln x> at q = 1.
double s_q_inf_crossover(CrossoverParam eps, double q);

// Exact finite-N ensemble-averaged dimensions.
FractalDimensionPoint d_q_oe(double q, int n_dim);
FractalDimensionPoint d_q_ue(double q, int n_dim);

// Large-N forms 1 - S_q^(inf)/ln N.
double d_q_oe_asymptotic(double q, int n_dim);
double d_q_ue_asymptotic(double q, int n_dim);

double s_q_inf_oe(double q);
double s_q_inf_ue(double q);

/// Tabulated crossover density on a uniform grid in y = ln x, with cubic
/// interpolation of ln P and a cumulative distribution. Used where the
/// density must be evaluated many times (likelihoods, KS tests, sampling).
class CrossoverTable {
public:
  CrossoverTable(CrossoverParam eps, double y_min, double y_max, int n_nodes);

  double epsilon() const { return epsilon_; }
  double y_min() const { return y_.front(); }
  double y_max() const { return y_.back(); }

  /// ln P(eps, x); x must lie within [e^y_min, e^y_max].
  double log_pdf(double x) const;
  /// P(X <= x), exact mass below e^y_min included.
  double cdf(double x) const;
  /// Inverse of cdf on the tabulated range; u in (0, 1).
  double quantile(double u) const;

private:
  double interp_log_pdf_y(double y) const;

  double epsilon_;
  double h_;
  std::vector<double> y_;
  std::vector<double> log_density_y_;  // ln(e^y P(eps, e^y))
  std::vector<double> slope_;          // d/dy of the above
  std::vector<double> cumulative_;     // CDF at each node
};

}  // namespace mfd
