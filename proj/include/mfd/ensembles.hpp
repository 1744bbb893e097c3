#pragma once

// Pandey-Mehta GOE -> GUE crossover ensemble and Hermitian eigensolvers.

#include <complex>
#include <cstdint>
#include <optional>
#include <type_traits>

#include <Eigen/Dense>

namespace mfd {

using cdouble = std::complex<double>;

/// Eigenvalues (ascending) with the matching unit-norm eigenvectors as
/// columns. For unitary input the eigenvalues are eigen-angles in (-pi, pi].
template <class Scalar>
struct EigenSystem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

using ComplexEigenSystem = EigenSystem<cdouble>;
using RealEigenSystem = EigenSystem<double>;

struct EnsembleSpec {
  int n_dim = 1000;
  double alpha = 0.0;
  double v2 = 0.0;  // element variance; <= 0 means the default [4N(1+alpha^2)]^-1
  int n_members = 1;
  std::uint64_t seed = 0;

  static double default_variance(int n_dim, double alpha) {
    return 1.0 / (4.0 * n_dim * (1.0 + alpha * alpha));
  }
  double variance() const { return v2 > 0.0 ? v2 : default_variance(n_dim, alpha); }
  double epsilon() const { return alpha * alpha * n_dim; }
  void validate() const;
};

/// H = sqrt(1 - alpha^2) H1 + alpha H2 with H1 real symmetric and H2 complex
/// Hermitian; diagonals of both have variance 2v^2, off-diagonal real (and,
/// for H2, imaginary) parts variance v^2. Deterministic in (seed, member).
Eigen::MatrixXcd sample_pandey_mehta(const EnsembleSpec& spec, int member_index);

/// Full eigendecomposition of a Hermitian matrix (tridiagonal QR).
/// Ties keep their solver order; each eigenvector is rotated so its
/// largest-magnitude component is real and positive.
ComplexEigenSystem eigh(const Eigen::MatrixXcd& h);
RealEigenSystem eigh(const Eigen::MatrixXd& h);

/// Eigenvalues only, ascending.
Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& h);
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& h);

/// Wigner semicircle (2 / pi R^2) sqrt(R^2 - E^2), R^2 = 4 N v^2 (1 + alpha^2).
double semicircle_density(double energy, const EnsembleSpec& spec);

/// Sample and diagonalize one member. alpha = 0 takes the real solver.
ComplexEigenSystem generate_member(const EnsembleSpec& spec, int member_index);

/// Members of an ensemble in index order, produced on demand.
class EnsembleStream {
public:
  explicit EnsembleStream(EnsembleSpec spec);
  /// Fills `out` with the next member; false once all members were produced.
  bool next(ComplexEigenSystem& out);
  int position() const { return next_; }
  const EnsembleSpec& spec() const { return spec_; }

private:
  EnsembleSpec spec_;
  int next_ = 0;
};

inline EnsembleStream generate_ensemble(const EnsembleSpec& spec) { return EnsembleStream(spec); }

namespace detail {
/// Phase convention shared by every solver path.
template <class Scalar>
void fix_phases(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs <= 0.0) continue;
    const Scalar phase = v(best, j) / best_abs;
    if constexpr (std::is_same_v<Scalar, double>) {
      if (phase < 0.0) v.col(j) *= -1.0;
    } else {
      v.col(j) *= std::conj(phase);
      v(best, j) = Scalar(std::abs(v(best, j)), 0.0);
    }
  }
}
}  // namespace detail

}  // namespace mfd
