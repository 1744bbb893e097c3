#include "mfd/spin_chain.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include "mfd/errors.hpp"
#include "mfd/rng.hpp"

namespace mfd {

namespace {

using State = std::uint32_t;

bool up(State s, int j) { return (s >> j) & 1u; }
double sz(State s, int j) { return up(s, j) ? 0.5 : -0.5; }

/// Adds H |s> to column `col`, with `lookup` mapping states to rows.
template <class Lookup>
void apply_hamiltonian(const SpinChainSpec& spec, const std::vector<double>& h, State s, Eigen::Index col,
                       const Lookup& lookup, Eigen::MatrixXcd& out) {
  const int L = spec.length;
  const double J = spec.j_coupling;
  const double K = spec.k_chirality;
  const cdouble half_i(0.0, 0.5);
  auto add = [&](State target, cdouble amp) {
    const Eigen::Index row = lookup(target);
    out(row, col) += amp;
  };
  // S_a^+ S_b^- |s>: nonzero when a down and b up.
  auto raise_lower = [](State s0, int a, int b, State& t) {
    if (up(s0, a) || !up(s0, b)) return false;
    t = s0 ^ (1u << a) ^ (1u << b);
    return true;
  };

  double diag = 0.0;
  for (int j = 0; j < L; ++j) {
    const int j1 = (j + 1) % L;
    diag += J * sz(s, j) * sz(s, j1) + h[j] * sz(s, j);
    if (up(s, j) != up(s, j1)) add(s ^ (1u << j) ^ (1u << j1), 0.5 * J);
  }
  add(s, diag);

  if (K == 0.0) return;
  // S1.(S2 x S3) = (i/2) sum_cyclic S1^z (S2^+ S3^- - S2^- S3^+).
  for (int j = 0; j < L; ++j) {
    const int site[3] = {j, (j + 1) % L, (j + 2) % L};
    for (int c = 0; c < 3; ++c) {
      const int a = site[c], b = site[(c + 1) % 3], d = site[(c + 2) % 3];
      const cdouble pre = K * half_i * sz(s, a);  // S_a^z is untouched by the flip of b, d
      State t;
      if (raise_lower(s, b, d, t)) add(t, pre);
      if (raise_lower(s, d, b, t)) add(t, -pre);
    }
  }
}

}  // namespace

int SpinChainSpec::n_up() const {
  detail::require_domain(length >= 4 && length <= 30, "SpinChainSpec: require 4 <= L <= 30");
  const double n = 0.5 * length + sz_sector;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-12 || r < 0 || r > length)
    throw DomainError("SpinChainSpec: invalid S^z sector for this chain length");
  return static_cast<int>(r);
}

void SpinChainSpec::validate() const {
  n_up();
  detail::require_domain(h_strength >= 0.0 && std::isfinite(h_strength), "SpinChainSpec: require h >= 0");
  detail::require_domain(std::isfinite(j_coupling) && std::isfinite(k_chirality),
                         "SpinChainSpec: non-finite coupling");
}

std::vector<State> spin_basis(int length, int n_up) {
  detail::require_domain(length >= 1 && length <= 30, "spin_basis: require 1 <= L <= 30");
  detail::require_domain(n_up >= 0 && n_up <= length, "spin_basis: invalid number of up spins");
  std::vector<State> basis;
  for (State s = 0; s < (State(1) << length); ++s)
    if (std::popcount(s) == n_up) basis.push_back(s);
  return basis;
}

std::string spin_bitstring(State state, int length) {
  std::string out(static_cast<size_t>(length), '0');
  for (int j = 0; j < length; ++j)
    if (up(state, j)) out[j] = '1';
  return out;
}

std::vector<double> spin_chain_fields(const SpinChainSpec& spec, int realization_index) {
  spec.validate();
  Rng rng(spec.seed, StreamTag::SpinChain, static_cast<std::uint64_t>(realization_index));
  std::vector<double> h(spec.length);
  for (auto& v : h) v = rng.normal(spec.h_strength);
  return h;
}

Eigen::MatrixXcd spin_chain_block(const SpinChainSpec& spec, int realization_index) {
  const auto basis = spin_basis(spec.length, spec.n_up());
  const auto h = spin_chain_fields(spec, realization_index);
  std::unordered_map<State, Eigen::Index> row;
  row.reserve(basis.size() * 2);
  for (size_t i = 0; i < basis.size(); ++i) row.emplace(basis[i], static_cast<Eigen::Index>(i));
  auto lookup = [&](State t) { return row.at(t); };

  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) apply_hamiltonian(spec, h, basis[c], c, lookup, out);
  return out;
}

Eigen::MatrixXcd spin_chain_full(const SpinChainSpec& spec, int realization_index) {
  detail::require_domain(spec.length <= 14, "spin_chain_full: require L <= 14");
  const auto h = spin_chain_fields(spec, realization_index);
  const Eigen::Index n = Eigen::Index(1) << spec.length;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  auto lookup = [](State t) { return static_cast<Eigen::Index>(t); };
  for (Eigen::Index c = 0; c < n; ++c) apply_hamiltonian(spec, h, static_cast<State>(c), c, lookup, out);
  return out;
}

}  // namespace mfd
