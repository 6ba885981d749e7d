#include <doctest.h>

#include <cmath>
#include <random>

#include "cwlab/errors.hpp"
#include "cwlab/geometry.hpp"
#include "cwlab/hamiltonian.hpp"
#include "oracles.hpp"

using namespace cwlab;
using namespace cwlab::hamiltonian;
using oracle::kPi;

namespace {

PhasePoint covector(double tau, double x, double y, double z = 0.0) {
  PhasePoint p;
  p.tau = tau;
  p.xi = Vec3(x, y, z);
  return p;
}

}  // namespace

TEST_CASE("characteristic residual") {
  CHECK(char_residual(covector(1, 1, 0)) == 0.0);
  CHECK(std::abs(char_residual(covector(1, 0.6, 0.8))) <= 1e-15);
  CHECK(char_residual(covector(2, 1, 0)) == doctest::Approx(0.75));
  CHECK(char_residual(covector(-2, 1, 0)) == doctest::Approx(0.75));
}

TEST_CASE("corner classification examples") {
  const auto c = geometry::make_sector(0.7 * kPi).corner(0);
  CornerCovector h{0.6, {}, {0.0}, {}};
  auto r = classify_at_corner(c, h, 1e-9);
  CHECK(r.kind == CovectorClass::Hyperbolic);
  CHECK(r.mu == doctest::Approx(1.0));
  CornerCovector g{1.0, {}, {0.0}, {}};
  CHECK(classify_at_corner(c, g, 1e-9).kind == CovectorClass::Glancing);
  CornerCovector e{0.6, {}, {0.5}, {}};
  CHECK(classify_at_corner(c, e, 1e-9).kind == CovectorClass::Elliptic);
  CornerCovector big{1.2, {}, {0.0}, {}};
  CHECK(classify_at_corner(c, big, 1e-9).kind == CovectorClass::Elliptic);
  CornerCovector axial{0.0, {0.6}, {0.0}, {}};
  auto a = classify_at_corner(c, axial, 1e-9);
  CHECK(a.kind == CovectorClass::Hyperbolic);
  CHECK(a.mu == doctest::Approx(0.8));
}

TEST_CASE("hyperbolic corner data") {
  auto s = geometry::make_sector(0.7 * kPi);
  auto d2 = corner_hyperbolic_data(s, covector(1, -1, 0), 1e-9);
  CHECK(!d2.eta_hat.has_value());
  CHECK(d2.mu == 1.0);
  CHECK(d2.sgn_tau == 1);
  auto w = geometry::make_wedge3d(0.7 * kPi);
  auto d3 = corner_hyperbolic_data(w, covector(1, -0.8, 0, 0.6), 1e-9);
  REQUIRE(d3.eta_hat.has_value());
  CHECK(*d3.eta_hat == doctest::Approx(0.6));
  CHECK(d3.mu == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(corner_hyperbolic_data(w, covector(1, 0, 0, 1.0), 1e-9), GlancingCornerError);
  CHECK(corner_hyperbolic_data(w, covector(-1, 0.8, 0, 0.6), 1e-9).sgn_tau == -1);
}

TEST_SUITE("prop-classifier") {
  TEST_CASE("classifier partitions a dense grid and glancing separates the other classes") {
    const auto c = geometry::make_sector(0.7 * kPi).corner(0);
    const double tol = 1e-9;
    const int n = 41;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double xi = -1.25 + 2.5 * i / (n - 1);
          const double zb = -0.6 + 1.2 * j / (n - 1);
          const double eta = -1.25 + 2.5 * k / (n - 1);
          const auto r = classify_at_corner(c, CornerCovector{xi, {eta}, {zb}, {}}, tol);
          const double q = xi * xi + eta * eta + zb * zb;
          // Exactly one class, decided by an independent reading of the three regions.
          int expect;
          if (std::abs(zb) > tol || q > 1.0 + tol) expect = 0;
          else if (q >= 1.0 - tol) expect = 1;
          else expect = 2;
          const int got = r.kind == CovectorClass::Elliptic ? 0 : r.kind == CovectorClass::Glancing ? 1 : 2;
          CHECK(got == expect);
          ++counts[got];
          if (got != 0) {
            CHECK(r.mu >= 0.0);
            CHECK(r.mu <= 1.0);
          }
          if (got == 2) CHECK(r.mu > 0.0);
        }
    CHECK(counts[0] + counts[1] + counts[2] == n * n * n);
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);
    // Walking from a hyperbolic to an elliptic point crosses the glancing band.
    for (int k = 0; k < 200; ++k) {
      const double a = 2.0 * kPi * k / 200;
      bool seen_glancing = false;
      CovectorClass prev = CovectorClass::Hyperbolic;
      for (int s = 0; s <= 4000; ++s) {
        const double rho = 1.2 * s / 4000;
        const auto r = classify_at_corner(c, CornerCovector{rho * std::cos(a), {rho * std::sin(a)}, {0.0}, {}}, 1e-3);
        if (r.kind == CovectorClass::Glancing) seen_glancing = true;
        if (r.kind == CovectorClass::Elliptic) CHECK(prev != CovectorClass::Hyperbolic);
        prev = r.kind;
      }
      CHECK(seen_glancing);
    }
  }

  TEST_CASE("classifier is invariant under positive rescaling of all duals") {
    const auto c = geometry::make_sector(0.7 * kPi).corner(0);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.3, 1.3), lam(0.01, 100.0);
    for (int k = 0; k < 20000; ++k) {
      const double tau = 1.0;
      const double xi = u(gen), eta = u(gen);
      const double zb = (k % 3 == 0) ? 0.0 : 0.3 * u(gen);
      const double zo = 0.5 * u(gen);
      const auto base = classify_at_corner(c, tau, xi, {eta}, {zb}, {zo}, 1e-9);
      const double l = lam(gen);
      const auto scaled = classify_at_corner(c, l * tau, l * xi, {l * eta}, {l * zb}, {l * zo}, 1e-9);
      const auto neg = classify_at_corner(c, -l * tau, l * xi, {l * eta}, {l * zb}, {l * zo}, 1e-9);
      const double q = xi * xi + eta * eta + zb * zb + zo * zo;
      if (std::abs(q - 1.0) < 1e-6) continue;  // rounding at the band edge
      CHECK(scaled.kind == base.kind);
      CHECK(neg.kind == base.kind);
    }
  }
}
