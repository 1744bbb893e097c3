#pragma once

// Periodic spin-1/2 chain with random fields and scalar chirality:
//   H = sum_j [ J S_j.S_{j+1} + h_j S^z_j + K S_j.(S_{j+1} x S_{j+2}) ].
//
// Basis states are bitstrings, bit j set = spin j up. A fixed-S^z block
// holds the states with L/2 + S^z up spins, in ascending integer order.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfd/ensembles.hpp"

namespace mfd {

struct SpinChainSpec {
  int length = 13;
  double j_coupling = 1.0;
  double h_strength = 0.2;  // std of the per-site Gaussian field
  double k_chirality = 0.0;
  double sz_sector = 0.5;
  std::uint64_t seed = 0;

  /// Up spins in the sector; throws DomainError if the sector is invalid.
  int n_up() const;
  void validate() const;
};

std::vector<std::uint32_t> spin_basis(int length, int n_up);

/// L-bit string, site 0 first, '1' = up.
std::string spin_bitstring(std::uint32_t state, int length);

/// h_j for one disorder realization; independent of J and K.
std::vector<double> spin_chain_fields(const SpinChainSpec& spec, int realization_index);

/// Hamiltonian restricted to the spec's S^z sector.
Eigen::MatrixXcd spin_chain_block(const SpinChainSpec& spec, int realization_index);

/// Hamiltonian on the full 2^L space (L <= 14), same field realization.
Eigen::MatrixXcd spin_chain_full(const SpinChainSpec& spec, int realization_index);

}  // namespace mfd
