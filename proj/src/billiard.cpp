#include "mfd/billiard.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "mfd/errors.hpp"
#include "mfd/specfun.hpp"

namespace mfd {

void BilliardSpec::validate() const {
  detail::require_domain(rect_width >= 0 && rect_height >= 0, "BilliardSpec: negative rectangle size");
  detail::require_domain(ellipse_a > 0 && ellipse_b > 0, "BilliardSpec: ellipse semi-axes must be positive");
  detail::require_domain(std::isfinite(onsite) && std::isfinite(hopping) && std::isfinite(b_field),
                         "BilliardSpec: non-finite parameter");
  detail::require_domain(b_field >= 0.0, "BilliardSpec: require b_field >= 0");
}

std::vector<LatticeSite> billiard_sites(const BilliardSpec& spec) {
  spec.validate();
  const double a2 = static_cast<double>(spec.ellipse_a) * spec.ellipse_a;
  const double b2 = static_cast<double>(spec.ellipse_b) * spec.ellipse_b;
  std::vector<LatticeSite> sites;
  for (int y = 0; y <= spec.rect_height; ++y) {
    for (int x = 0; x <= spec.rect_width; ++x) {
      // Exact integer comparison: x^2 b^2 + y^2 a^2 <= a^2 b^2.
      if (x * x * b2 + y * y * a2 <= a2 * b2) continue;
      sites.push_back({x, y});
    }
  }
  if (sites.empty()) throw DomainError("billiard_hamiltonian: geometry has no sites");
  return sites;
}

BilliardModel billiard_hamiltonian(const BilliardSpec& spec) {
  BilliardModel model;
  model.sites = billiard_sites(spec);
  const int n = model.dim();
  const int row = spec.rect_width + 1;

  std::unordered_map<long, int> index;
  index.reserve(static_cast<size_t>(n) * 2);
  auto key = [row](int x, int y) { return static_cast<long>(y) * row + x; };
  for (int i = 0; i < n; ++i) index.emplace(key(model.sites[i].x, model.sites[i].y), i);
  auto find = [&](int x, int y) {
    if (x < 0 || y < 0 || x > spec.rect_width || y > spec.rect_height) return -1;
    auto it = index.find(key(x, y));
    return it == index.end() ? -1 : it->second;
  };

  std::vector<Eigen::Triplet<cdouble>> entries;
  entries.reserve(static_cast<size_t>(n) * 5);
  for (int i = 0; i < n; ++i) {
    const auto [x, y] = model.sites[i];
    entries.emplace_back(i, i, cdouble(spec.onsite, 0.0));
    if (int j = find(x + 1, y); j >= 0) {
      entries.emplace_back(j, i, cdouble(spec.hopping, 0.0));
      entries.emplace_back(i, j, cdouble(spec.hopping, 0.0));
    }
    if (int j = find(x, y + 1); j >= 0) {
      const cdouble t = spec.hopping * std::polar(1.0, spec.b_field * x);
      entries.emplace_back(j, i, t);
      entries.emplace_back(i, j, std::conj(t));
    }
  }
  model.hamiltonian.resize(n, n);
  model.hamiltonian.setFromTriplets(entries.begin(), entries.end());
  return model;
}

double billiard_dos_theory(double energy) {
  const double u = (energy - 4.0) / 4.0;
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double kc = std::abs(u);  // complementary modulus
  if (kc == 0.0) return std::numeric_limits<double>::infinity();  // van Hove point
  if (kc < 1e-4) {
    // K ~ L + (kc^2/4)(L - 1), L = ln(4/kc); next term is O(kc^4 L).
    const double L = std::log(4.0 / kc);
    return (L + 0.25 * kc * kc * (L - 1.0)) / (2.0 * kPi * kPi);
  }
  return elliptic_k_modulus(std::sqrt(1.0 - u * u)) / (2.0 * kPi * kPi);
}

}  // namespace mfd
