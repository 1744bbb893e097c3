#pragma once

#include "mfd/quadrature.hpp"

namespace mfd {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// ln Gamma(z) for z > 0.
double ln_gamma(double z);

/// Digamma psi(z) for z > 0: upward recurrence to z >= 6, then the
/// Stirling-type asymptotic series through z^-14.
double digamma(double z);

/// Scaled Tricomi function z^a U(a, b, z), computed from
///   z^a U(a,b,z) = Gamma(a)^-1 Int_0^inf e^-s s^(a-1) (1 + s/z)^(b-a-1) ds,
/// which is O(1) for every z > 0 and never under/overflows for the b used
/// by the crossover moments (b < a + 1).
double tricomi_u_scaled(double a, double b, double z, const QuadratureOptions& opts = {});

/// ln U(a, b, z). Use this when U itself underflows (large z).
double tricomi_u_log(double a, double b, double z, const QuadratureOptions& opts = {});

/// Confluent hypergeometric function of the second kind U(a, b, z), a > 0, z > 0.
double tricomi_u(double a, double b, double z, const QuadratureOptions& opts = {});

/// Complete elliptic integral of the first kind,
///   K(k) = Int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta).
/// NOTE: the argument is the modulus k, not the parameter m = k^2.
double elliptic_k_modulus(double k);

}  // namespace mfd
