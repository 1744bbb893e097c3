#include "mfd/ensembles.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mfd/errors.hpp"
#include "mfd/rng.hpp"

namespace mfd {

namespace {

template <class Derived>
void check_hermitian(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) throw DomainError("eigh: matrix must be square");
  if (h.rows() == 0) throw DomainError("eigh: empty matrix");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    std::ostringstream msg;
    msg << "eigh: matrix not Hermitian (max |H - H^dagger| = " << asym << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

void EnsembleSpec::validate() const {
  detail::require_domain(n_dim >= 2, "EnsembleSpec: require N >= 2");
  detail::require_domain(alpha >= 0.0 && alpha <= 1.0, "EnsembleSpec: require alpha in [0,1]");
  detail::require_domain(std::isfinite(v2) && v2 >= 0.0, "EnsembleSpec: require v2 > 0 (or 0 for default)");
  detail::require_domain(n_members >= 1, "EnsembleSpec: require n_members >= 1");
}

Eigen::MatrixXcd sample_pandey_mehta(const EnsembleSpec& spec, int member_index) {
  spec.validate();
  detail::require_domain(member_index >= 0 && member_index < spec.n_members,
                         "sample_pandey_mehta: member_index out of range");
  const int n = spec.n_dim;
  const double sigma = std::sqrt(spec.variance());
  const double sigma_diag = std::sqrt(2.0) * sigma;
  const double w1 = std::sqrt(1.0 - spec.alpha * spec.alpha);
  const double w2 = spec.alpha;
  Rng rng(spec.seed, StreamTag::PandeyMehta, static_cast<std::uint64_t>(member_index));

  // Draw order is part of the reproducibility contract: the whole GOE upper
  // triangle row by row, then the GUE upper triangle (re, im per element).
  Eigen::MatrixXd goe(n, n);
  for (int i = 0; i < n; ++i) {
    goe(i, i) = rng.normal(sigma_diag);
    for (int j = i + 1; j < n; ++j) goe(i, j) = goe(j, i) = rng.normal(sigma);
  }
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = cdouble(w1 * goe(i, i) + w2 * rng.normal(sigma_diag), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const double re = rng.normal(sigma);
      const double im = rng.normal(sigma);
      h(i, j) = cdouble(w1 * goe(i, j) + w2 * re, w2 * im);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

namespace {

template <class MatrixType>
auto solve_hermitian(const MatrixType& h, int options) {
  Eigen::SelfAdjointEigenSolver<MatrixType> solver(h, options);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigh: QR iteration did not converge (N = " << h.rows()
        << ", max |H_ij| = " << h.cwiseAbs().maxCoeff() << ")";
    throw ConvergenceError(msg.str());
  }
  return solver;
}

template <class Scalar>
EigenSystem<Scalar> eigh_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& h) {
  check_hermitian(h);
  auto solver = solve_hermitian(h, Eigen::ComputeEigenvectors);
  EigenSystem<Scalar> out{solver.eigenvalues(), solver.eigenvectors()};
  detail::fix_phases(out.eigenvectors);
  return out;
}

}  // namespace

ComplexEigenSystem eigh(const Eigen::MatrixXcd& h) { return eigh_impl(h); }

RealEigenSystem eigh(const Eigen::MatrixXd& h) { return eigh_impl(h); }

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& h) {
  check_hermitian(h);
  return solve_hermitian(h, Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& h) {
  check_hermitian(h);
  return solve_hermitian(h, Eigen::EigenvaluesOnly).eigenvalues();
}

double semicircle_density(double energy, const EnsembleSpec& spec) {
  const double r2 = 4.0 * spec.n_dim * spec.variance() * (1.0 + spec.alpha * spec.alpha);
  const double e2 = energy * energy;
  if (e2 >= r2) return 0.0;
  return 2.0 / (3.14159265358979323846 * r2) * std::sqrt(r2 - e2);
}

ComplexEigenSystem generate_member(const EnsembleSpec& spec, int member_index) {
  Eigen::MatrixXcd h = sample_pandey_mehta(spec, member_index);
  if (spec.alpha == 0.0) {
    RealEigenSystem real = eigh(Eigen::MatrixXd(h.real()));
    return {std::move(real.eigenvalues), real.eigenvectors.cast<cdouble>()};
  }
  return eigh(h);
}

EnsembleStream::EnsembleStream(EnsembleSpec spec) : spec_(spec) { spec_.validate(); }

bool EnsembleStream::next(ComplexEigenSystem& out) {
  if (next_ >= spec_.n_members) return false;
  try {
    out = generate_member(spec_, next_);
  } catch (const std::exception& e) {
    throw ConvergenceError("ensemble member " + std::to_string(next_) + ": " + e.what());
  }
  ++next_;
  return true;
}

}  // namespace mfd
