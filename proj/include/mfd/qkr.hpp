#pragma once

// Quantum kicked rotor on an N-site torus.
//
// Rows and columns are labeled m, n in {-N', ..., N'}, N' = (N-1)/2, and
// stored at offset m + N'. The phases depend on the signed labels.

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "mfd/ensembles.hpp"

namespace mfd {

struct QkrSpec {
  int n_dim = 201;               // odd
  double kick_strength = 20000;  // stochasticity parameter
  double trs_gamma = 0.0;        // time-reversal breaking shift
  std::optional<double> theta0;  // default pi / (2N)
  int n_members = 100;
  double kick_jitter = 250;      // member kick ~ kick_strength + U(-jitter, jitter)
  std::uint64_t seed = 0;

  double theta() const;
  double member_kick(int member_index) const;
  void validate() const;
};

/// U_mn = (1/N) e^{-i k cos(2 pi m/N + theta0)} sum_l e^{-i(l^2/2 - gamma l - 2 pi l (m-n)/N)}.
Eigen::MatrixXcd qkr_floquet(int n_dim, double kick, double gamma, double theta0);

/// Floquet matrix of one member; throws DomainError if ||U^dagger U - I||_max > 1e-10.
Eigen::MatrixXcd qkr_floquet(const QkrSpec& spec, int member_index);

/// max |U^dagger U - I|.
double unitarity_error(const Eigen::MatrixXcd& u);

/// Eigen-angles in (-pi, pi], ascending, with orthonormal eigenvectors.
ComplexEigenSystem unitary_eigs(const Eigen::MatrixXcd& u);

inline ComplexEigenSystem qkr_member(const QkrSpec& spec, int member_index) {
  return unitary_eigs(qkr_floquet(spec, member_index));
}

}  // namespace mfd
