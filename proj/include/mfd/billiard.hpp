#pragma once

// Tight-binding quarter Sinai billiard: a rectangle of lattice sites with a
// quarter ellipse carved out at the origin corner, in a perpendicular
// magnetic field.
//
// Sites are the integer points 0 <= x <= rect_width, 0 <= y <= rect_height
// minus those with (x/a)^2 + (y/b)^2 <= 1. With the default 80 x 90 box and
// 45 / 35 semi-axes this leaves 6096 sites. Hopping uses the Landau gauge:
// the bond (x,y) -> (x,y+1) carries e^{iBx}, B = flux per plaquette.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mfd/ensembles.hpp"

namespace mfd {

struct BilliardSpec {
  int rect_width = 80;
  int rect_height = 90;
  int ellipse_a = 45;
  int ellipse_b = 35;
  double onsite = 4.0;
  double hopping = -1.0;
  double b_field = 0.0;

  void validate() const;
};

struct LatticeSite {
  int x;
  int y;
};

/// Sites in row-major order (y outer, x inner); the storage index of a site
/// is its position in this list.
std::vector<LatticeSite> billiard_sites(const BilliardSpec& spec);

struct BilliardModel {
  Eigen::SparseMatrix<cdouble> hamiltonian;
  std::vector<LatticeSite> sites;

  int dim() const { return static_cast<int>(sites.size()); }
};

BilliardModel billiard_hamiltonian(const BilliardSpec& spec);

/// Square-lattice density of states (1/2pi^2) K(sqrt(1 - ((E-4)/4)^2)) for
/// |E - 4| < 4, else 0. K takes the modulus. Returns +inf at E = 4.
double billiard_dos_theory(double energy);

}  // namespace mfd
