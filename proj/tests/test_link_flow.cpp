#include <doctest.h>

#include <cmath>
#include <random>

#include "cwlab/errors.hpp"
#include "cwlab/gbb_tracer.hpp"
#include "oracles.hpp"

using namespace cwlab;
using namespace cwlab::gbb;
using oracle::kPi;

namespace {

LinkTrajectory run(double L, double z, Side side, double eps, double step = kDefaultLinkStep) {
  FlowOptions o;
  o.eps_kick = eps;
  o.side = side;
  return egbb_link_flow(geometry::Link::arc(L), LinkState{z, -1.0, 0.0, {}, 1}, step, o);
}

// Arc length is pi - c sqrt(eps) + O(eps^1.5); eliminate the leading term.
double extrapolated_arc(double L, double z, Side side) {
  const double e1 = 1e-5, e2 = 1e-7;
  const double a1 = run(L, z, side, e1).arc_length, a2 = run(L, z, side, e2).arc_length;
  const double r1 = std::sqrt(e1), r2 = std::sqrt(e2);
  return (r1 * a2 - r2 * a1) / (r1 - r2);
}

}  // namespace

TEST_CASE("link flow from 0.2pi in the 0.7pi link") {
  const double L = 0.7 * kPi;
  auto pos = run(L, 0.2 * kPi, Side::Positive, 1e-9);
  CHECK(pos.exit.z == doctest::Approx(0.2 * kPi).epsilon(1e-4));
  CHECK(pos.reflections == oracle::unfold_bounces(L, 0.2 * kPi, +1));
  auto neg = run(L, 0.2 * kPi, Side::Negative, 1e-9);
  CHECK(neg.exit.z == doctest::Approx(0.6 * kPi).epsilon(1e-4));
  CHECK(neg.reflections == oracle::unfold_bounces(L, 0.2 * kPi, -1));
  CHECK(pos.exit.xi_hat == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(extrapolated_arc(L, 0.2 * kPi, Side::Positive) - kPi) <= 1e-6);
  CHECK(std::abs(extrapolated_arc(L, 0.2 * kPi, Side::Negative) - kPi) <= 1e-6);
}

TEST_CASE("half-plane link: the straight continuation") {
  for (double a : {0.2, 1.0, 2.5}) {
    auto t = run(kPi, a, Side::Negative, 1e-10);
    CHECK(t.exit.z == doctest::Approx(kPi - a).epsilon(1e-4));
  }
}

TEST_CASE("arc length approaches pi at the square-root rate") {
  const double L = 0.7 * kPi;
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.05, L - 0.05);
  for (int k = 0; k < 20; ++k) {
    const double z = u(gen);
    const Side side = k % 2 ? Side::Positive : Side::Negative;
    const double d3 = std::abs(run(L, z, side, 1e-3).arc_length - kPi);
    const double d5 = std::abs(run(L, z, side, 1e-5).arc_length - kPi);
    CHECK(d3 <= 5.0 * std::sqrt(1e-3));
    CHECK(d5 <= 5.0 * std::sqrt(1e-5));
    CHECK(d5 < d3);
  }
}

TEST_CASE("flow rejects bad input") {
  auto link = geometry::Link::arc(1.0);
  CHECK_THROWS_AS(egbb_link_flow(link, LinkState{0.5, -1.0, 0.0, {}, 1}, 0.0), IntegratorError);
  CHECK_THROWS_AS(egbb_link_flow(link, LinkState{1.5, -1.0, 0.0, {}, 1}, 1e-3), GeometryError);
  CHECK_THROWS_AS(egbb_link_flow(geometry::Link::orthant(), LinkState{}, 1e-3), GeometryError);
  FlowOptions o;
  o.eps_kick = 0.0;
  CHECK_THROWS_AS(egbb_link_flow(link, LinkState{0.5, -1.0, 0.0, {}, 1}, 1e-3, o), ConfigError);
  CHECK_THROWS_AS(egbb_link_flow(link, LinkState{0.5, 0.0, 0.0, 1.0, 1}, 1e-3), GlancingCornerError);
}

TEST_CASE("octant link returns every billiard shot to its start") {
  // Length pi on the sphere reaches the antipode; folding it back into the
  // octant by sign flips gives the start again.
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vec3 z = Vec3(u(gen), u(gen), u(gen)).normalized();
    const auto exits = orthant_geometric_exits(z, 64, 1e-9);
    REQUIRE(exits.size() >= 1);
    for (const auto& e : exits) CHECK((e - z).norm() <= 1e-9);
  }
  CHECK_THROWS_AS(orthant_geometric_exits(Vec3(0, 0, 1), 8, 1e-9), BilliardUnresolved);
  CHECK_THROWS_AS(orthant_geometric_exits(Vec3(-1, 1, 1), 8, 1e-9), GeometryError);
}

TEST_CASE("octant link flow traverses length pi back to the start") {
  const Vec3 z = Vec3(0.3, 0.5, 0.8).normalized();
  for (const Vec3& dir : {Vec3(1, -0.3, 0.1), Vec3(0, 1, -1), Vec3(-1, 0.2, 0.4)}) {
    FlowOptions o;
    o.eps_kick = 1e-8;
    const auto t = egbb_sphere_flow({z, -1.0, Vec3::Zero()}, dir, kDefaultLinkStep, o);
    CHECK(std::abs(t.arc_length - kPi) <= 5.0 * std::sqrt(1e-8));
    CHECK((t.exit.z - z).norm() <= 1e-3);
    CHECK(t.exit.xi_hat == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK_THROWS_AS(egbb_sphere_flow({Vec3(0, 0, 1), -1.0, Vec3::Zero()}, Vec3(1, 0, 0), 1e-3), CornerOfLinkError);
}

TEST_SUITE("prop-link-flow") {
  TEST_CASE("link flow conserves the fiber radius") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 60; ++k) {
      const double L = (0.2 + 1.7 * u(gen)) * kPi;
      const double z = L * (0.02 + 0.96 * u(gen));
      LinkState e{z, -1.0, 0.0, {}, 1};
      double mu = 1.0;
      if (k % 3 == 1) {
        const double eta = 0.9 * u(gen);
        e.eta_hat = eta;
        mu = std::sqrt(1.0 - eta * eta);
        e.xi_hat = -mu;
      } else if (k % 3 == 2) {
        const double a = kPi * (0.05 + 0.4 * u(gen));
        e.xi_hat = -std::cos(a);
        e.zeta_hat = (u(gen) < 0.5 ? -1.0 : 1.0) * std::sin(a);
      }
      FlowOptions o;
      o.eps_kick = std::pow(10.0, -3.0 - 5.0 * u(gen));
      o.side = k % 2 ? Side::Positive : Side::Negative;
      const auto t = egbb_link_flow(geometry::Link::arc(L), e, kDefaultLinkStep, o);
      double drift = 0.0;
      for (const auto& s : t.samples) {
        drift = std::max(drift, std::abs(std::hypot(s.state.xi_hat, s.state.zeta_hat) - mu));
        CHECK(s.state.z >= 0.0);
        CHECK(s.state.z <= L);
      }
      CHECK(drift < 1e-8);
      const double target = e.zeta_hat == 0.0 ? mu * (1.0 - o.eps_kick) : -e.xi_hat;
      CHECK(t.exit.xi_hat >= target - 1e-12);
    }
  }

  TEST_CASE("octant flow conserves the fiber radius") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(0.05, 1.0), v(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const Vec3 z = Vec3(u(gen), u(gen), u(gen)).normalized();
      const Vec3 dir(v(gen), v(gen), v(gen));
      FlowOptions o;
      o.eps_kick = 1e-6;
      const auto t = egbb_sphere_flow({z, -1.0, Vec3::Zero()}, dir, kDefaultLinkStep, o);
      CHECK(std::abs(std::hypot(t.exit.xi_hat, t.exit.zeta.norm()) - 1.0) < 1e-8);
      CHECK(std::abs(t.exit.z.norm() - 1.0) < 1e-12);
    }
  }
}
