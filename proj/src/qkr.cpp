#include "mfd/qkr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mfd/errors.hpp"
#include "mfd/rng.hpp"
#include "mfd/specfun.hpp"

namespace mfd {

double QkrSpec::theta() const { return theta0 ? *theta0 : kPi / (2.0 * n_dim); }

double QkrSpec::member_kick(int member_index) const {
  Rng rng(seed, StreamTag::KickedRotor, static_cast<std::uint64_t>(member_index));
  return kick_strength + rng.uniform(-kick_jitter, kick_jitter);
}

void QkrSpec::validate() const {
  detail::require_domain(n_dim >= 3 && n_dim % 2 == 1, "QkrSpec: require odd N >= 3");
  detail::require_domain(std::isfinite(kick_strength), "QkrSpec: kick_strength must be finite");
  detail::require_domain(trs_gamma >= 0.0 && std::isfinite(trs_gamma), "QkrSpec: require gamma >= 0");
  detail::require_domain(kick_jitter >= 0.0, "QkrSpec: require kick_jitter >= 0");
  detail::require_domain(n_members >= 1, "QkrSpec: require n_members >= 1");
  detail::require_domain(std::isfinite(theta()), "QkrSpec: theta0 must be finite");
}

Eigen::MatrixXcd qkr_floquet(int n_dim, double kick, double gamma, double theta0) {
  detail::require_domain(n_dim >= 3 && n_dim % 2 == 1, "qkr_floquet: require odd N >= 3");
  const int n = n_dim;
  const int half = (n - 1) / 2;
  const cdouble I(0.0, 1.0);

  // The l-sum depends only on d = m - n in [-(N-1), N-1].
  std::vector<cdouble> kinetic(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    cdouble s = 0.0;
    for (int l = -half; l <= half; ++l) {
      const double phase = 0.5 * l * l - gamma * l - 2.0 * kPi * l * d / n;
      s += std::exp(-I * std::fmod(phase, 2.0 * kPi));
    }
    kinetic[d + n - 1] = s / static_cast<double>(n);
  }

  Eigen::MatrixXcd u(n, n);
  for (int m = -half; m <= half; ++m) {
    const cdouble kick_phase = std::exp(-I * (kick * std::cos(2.0 * kPi * m / n + theta0)));
    for (int k = -half; k <= half; ++k) u(m + half, k + half) = kick_phase * kinetic[m - k + n - 1];
  }
  return u;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd g = u.adjoint() * u;
  return (g - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd qkr_floquet(const QkrSpec& spec, int member_index) {
  spec.validate();
  detail::require_domain(member_index >= 0 && member_index < spec.n_members,
                         "qkr_floquet: member_index out of range");
  Eigen::MatrixXcd u = qkr_floquet(spec.n_dim, spec.member_kick(member_index), spec.trs_gamma, spec.theta());
  const double err = unitarity_error(u);
  if (!(err <= 1e-10)) {
    std::ostringstream msg;
    msg << "qkr_floquet: unitarity violated for member " << member_index << " (" << err << ")";
    throw DomainError(msg.str());
  }
  return u;
}

ComplexEigenSystem unitary_eigs(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols() || u.rows() == 0) throw DomainError("unitary_eigs: matrix must be square");
  const double err = unitarity_error(u);
  if (!(err <= 1e-8)) {
    std::ostringstream msg;
    msg << "unitary_eigs: input not unitary (" << err << ")";
    throw DomainError(msg.str());
  }
  // The Schur form of a normal matrix is diagonal; Q holds the eigenvectors.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, true);
  if (schur.info() != Eigen::Success) throw ConvergenceError("unitary_eigs: Schur iteration failed");
  const auto& t = schur.matrixT();
  const Eigen::Index n = u.rows();

  std::vector<double> angle(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double a = std::arg(t(k, k));
    if (a <= -kPi) a += 2.0 * kPi;
    angle[k] = a;
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return angle[i] < angle[j]; });

  ComplexEigenSystem out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = angle[order[k]];
    out.eigenvectors.col(k) = schur.matrixU().col(order[k]);
  }
  detail::fix_phases(out.eigenvectors);
  return out;
}

}  // namespace mfd
