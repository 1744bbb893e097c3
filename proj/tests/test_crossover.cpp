#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfd/crossover.hpp"
#include "mfd/errors.hpp"
#include "mfd/specfun.hpp"

using namespace mfd;

namespace {

double integrate_pdf(double eps, double power) {
  auto f = [&](double x) { return std::pow(x, power) * pdf_crossover(CrossoverParam(eps), x); };
  const std::vector<double> breaks{1e-8, 1e-4, 1e-2, 0.1, 1, 3, 10, 30};
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  o.rel_tol = 1e-10;
  return integrate_semi_infinite(f, 0.0, breaks, o).value;
}

std::vector<double> finite_breaks(int n) {
  std::vector<double> pts;
  for (double b : {0.0, 1e-6, 1e-3, 0.1, 1.0, 5.0, 20.0, 60.0})
    if (b < n) pts.push_back(b);
  pts.push_back(n);
  return pts;
}

// <x^q> of the exact finite-N OE / UE component densities, by direct quadrature.
template <class Pdf>
double finite_moment(Pdf pdf, int n, double q) {
  auto f = [&](double x) { return std::pow(x, q) * pdf(x, n); };
  const auto pts = finite_breaks(n);
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-12;
  return integrate_adaptive(f, std::span<const double>(pts), o).value;
}

}  // namespace

TEST_CASE("CrossoverParam validation") {
  CHECK_THROWS_AS(CrossoverParam(-1.0), DomainError);
  CHECK_THROWS_AS(CrossoverParam(std::nan("")), DomainError);
  CHECK(CrossoverParam::from_alpha(0.1, 400).epsilon() == doctest::Approx(4.0));
  CHECK_THROWS_AS(pdf_crossover(CrossoverParam(0.0), 1.0), DomainError);
}

TEST_CASE("limit densities are normalized with unit mean") {
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  const std::vector<double> br{1e-6, 1e-2, 1, 10};
  for (auto pdf : {&pdf_oe_limit, &pdf_ue_limit}) {
    CHECK(integrate_semi_infinite([&](double x) { return pdf(x); }, 0.0, br, o).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integrate_semi_infinite([&](double x) { return x * pdf(x); }, 0.0, br, o).value == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(cdf_oe_limit(1.0) == doctest::Approx(std::erf(std::sqrt(0.5))).epsilon(1e-14));
  CHECK(cdf_ue_limit(2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("finite-N densities: normalization and large-N limits") {
  for (int n : {3, 50, 1000}) {
    CHECK(finite_moment(pdf_oe_finite, n, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(finite_moment(pdf_ue_finite, n, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(finite_moment(pdf_oe_finite, n, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(finite_moment(pdf_ue_finite, n, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(pdf_ue_finite(0.0, 1000) == doctest::Approx(0.999).epsilon(1e-14));
  CHECK(pdf_oe_finite(1.0, 1000000) == doctest::Approx(pdf_oe_limit(1.0)).epsilon(1e-5));
  CHECK(pdf_ue_finite(1.0, 1000000) == doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
  CHECK(pdf_oe_finite(40.0, 40) == 0.0);
  CHECK_THROWS_AS(pdf_ue_finite(41.0, 40), DomainError);
}

TEST_CASE("finite-N closed forms match direct moments of the finite-N densities") {
  for (int n : {6, 40, 300}) {
    for (double q : {2.0, 3.0, 4.5}) {
      const double m_oe = finite_moment(pdf_oe_finite, n, q);
      const double m_ue = finite_moment(pdf_ue_finite, n, q);
      const double ln_n = std::log(static_cast<double>(n));
      // I_q averaged = N * <(x/N)^q>.
      const double d_oe = -std::log(n * m_oe * std::pow(n, -q)) / ((q - 1) * ln_n);
      const double d_ue = -std::log(n * m_ue * std::pow(n, -q)) / ((q - 1) * ln_n);
      CHECK(d_q_oe(q, n).value == doctest::Approx(d_oe).epsilon(1e-9));
      CHECK(d_q_ue(q, n).value == doctest::Approx(d_ue).epsilon(1e-9));
    }
    // q = 1: averaged entropy -N <(x/N) ln(x/N)> / ln N.
    auto ent = [&](auto pdf) {
      auto f = [&](double x) { return x == 0.0 ? 0.0 : (x / n) * std::log(x / n) * pdf(x, n); };
      const auto pts = finite_breaks(n);
      QuadratureOptions o;
      o.abs_tol = 1e-13;
      return -n * integrate_adaptive(f, std::span<const double>(pts), o).value / std::log(static_cast<double>(n));
    };
    CHECK(d_q_oe(1.0, n).value == doctest::Approx(ent(pdf_oe_finite)).epsilon(1e-9));
    CHECK(d_q_ue(1.0, n).value == doctest::Approx(ent(pdf_ue_finite)).epsilon(1e-9));
  }
}

TEST_CASE("closed-form examples") {
  CHECK(d_q_oe(2, 1000).value == doctest::Approx(0.8412488).epsilon(1e-6));
  CHECK(d_q_ue(1, 1000).value == doctest::Approx(0.93887).epsilon(1e-5));
  CHECK(s_q_inf_oe(2) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(s_q_inf_ue(2) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // Shifted-scaled finite-N values converge to the limits.
  for (double q : {1.0, 2.0, 3.0}) {
    const int n = 1000000;
    const double s_oe = std::log(double(n)) * (1 - d_q_oe(q, n).value);
    const double s_ue = std::log(double(n)) * (1 - d_q_ue(q, n).value);
    CHECK(std::abs(s_oe - s_q_inf_oe(q)) < 1e-4);
    CHECK(std::abs(s_ue - s_q_inf_ue(q)) < 1e-4);
    CHECK(d_q_oe_asymptotic(q, n) == doctest::Approx(1 - s_q_inf_oe(q) / std::log(double(n))).epsilon(1e-15));
    CHECK(d_q_ue_asymptotic(q, n) == doctest::Approx(1 - s_q_inf_ue(q) / std::log(double(n))).epsilon(1e-15));
  }
  CHECK_THROWS_AS(d_q_oe(0.5, 10), DomainError);
}

TEST_CASE("crossover density: normalization, mean, and agreement with the Tricomi moments") {
  for (double eps : {0.3, 2.0, 30.0}) {
    CHECK(integrate_pdf(eps, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(integrate_pdf(eps, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    for (double q : {2.0, 3.0, 4.0})
      CHECK(moment_crossover(CrossoverParam(eps), q) == doctest::Approx(integrate_pdf(eps, q)).epsilon(1e-7));
  }
}

TEST_CASE("<x ln x> equals d<x^q>/dq at q = 1") {
  for (double eps : {0.1, 1.0, 10.0}) {
    const CrossoverParam p(eps);
    const double h = 1e-3;
    const double f1 = moment_crossover(p, 1.0), f2 = moment_crossover(p, 1.0 + h), f3 = moment_crossover(p, 1.0 + 2 * h);
    CHECK(f1 == doctest::Approx(1.0).epsilon(1e-9));
    const double deriv = (-3 * f1 + 4 * f2 - f3) / (2 * h);
    CHECK(xlogx_crossover(p) == doctest::Approx(deriv).epsilon(2e-5));
  }
}

TEST_CASE("crossover limits") {
  for (double x : {0.05, 0.5, 1.0, 3.0, 8.0}) {
    CHECK(std::abs(pdf_crossover(CrossoverParam(1e-6), x) - pdf_oe_limit(x)) < 2e-3);
    CHECK(std::abs(pdf_crossover(CrossoverParam(1e4), x) - pdf_ue_limit(x)) < 2e-3);
  }
  // The approach to the orthogonal limit is slow at small x. Reference gaps
  // from a 30-digit evaluation of the same phi integral.
  CHECK(pdf_crossover(CrossoverParam(1e-4), 0.05) - pdf_oe_limit(0.05) ==
        doctest::Approx(0.0033422134090784917).epsilon(1e-6));
  CHECK(pdf_crossover(CrossoverParam(1e-3), 0.5) - pdf_oe_limit(0.5) ==
        doctest::Approx(0.0014195662323608991).epsilon(1e-6));
  for (double q : {1.0, 2.0, 4.0}) {
    CHECK(std::abs(s_q_inf_crossover(CrossoverParam(1e-6), q) - s_q_inf_oe(q)) < 1e-2);
    CHECK(std::abs(s_q_inf_crossover(CrossoverParam(1e6), q) - s_q_inf_ue(q)) < 1e-3);
  }
  // d_q_crossover is 1 - S_q^inf / ln N.
  const auto pt = d_q_crossover(CrossoverParam(4.0), 2.0, 1000);
  CHECK(pt.value == doctest::Approx(1 - s_q_inf_crossover(CrossoverParam(4.0), 2.0) / std::log(1000.0)).epsilon(1e-14));
  CHECK(pt.n_dim == 1000);
  CHECK(pt.q == 2.0);
}

TEST_CASE("log-density form") {
  const CrossoverParam p(3.0);
  for (double y : {-8.0, -1.0, 0.0, 2.0})
    CHECK(pdf_crossover_log(p, y) == doctest::Approx(std::exp(y) * pdf_crossover(p, std::exp(y))).epsilon(1e-12));
}

TEST_CASE("CrossoverTable interpolation, cdf and quantile") {
  const CrossoverParam p(3.6);
  const CrossoverTable t(p, -14.0, 3.5, 160);
  for (double x : {1e-5, 0.01, 0.3, 1.0, 4.0, 20.0})
    CHECK(t.log_pdf(x) == doctest::Approx(std::log(pdf_crossover(p, x))).epsilon(1e-5));
  double prev = 0.0;
  for (double x = 1e-6; x < 30.0; x *= 1.7) {
    const double c = t.cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(t.cdf(std::exp(3.5)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t.cdf(1.0) == doctest::Approx(integrate_semi_infinite(
                                          [&](double x) { return x < 1.0 ? pdf_crossover(p, x) : 0.0; }, 0.0,
                                          std::vector<double>{1e-6, 1e-3, 0.1, 1.0})
                                          .value)
                          .epsilon(1e-6));
  for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) CHECK(t.cdf(t.quantile(u)) == doctest::Approx(u).epsilon(1e-8));
  CHECK_THROWS_AS(t.log_pdf(1e-9), DomainError);
}
