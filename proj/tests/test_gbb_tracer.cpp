#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cwlab/errors.hpp"
#include "cwlab/gbb_tracer.hpp"
#include "oracles.hpp"

using namespace cwlab;
using namespace cwlab::gbb;
using hamiltonian::char_residual;
using oracle::kPi;

namespace {

PhasePoint ray(Vec2 from, double angle, double eta = 0.0) {
  PhasePoint p;
  p.base = Vec3(from.x(), from.y(), 0.0);
  const double c = std::sqrt(1.0 - eta * eta);
  p.xi = Vec3(c * std::cos(angle), c * std::sin(angle), eta);
  return p;
}

Vec2 polar(double r, double a) { return {r * std::cos(a), r * std::sin(a)}; }

PhasePoint at_corner_from(double z, double eta = 0.0) { return ray(Vec2::Zero(), z + kPi, eta); }

geometry::Hypersurface x_axis() {
  geometry::Hypersurface h;
  h.direction = Vec2::UnitX();
  h.inward_normal = Vec2::UnitY();
  return h;
}

}  // namespace

TEST_CASE("mirror reflection examples") {
  PhasePoint p;
  p.xi = Vec3(1, -1, 0);
  auto q = reflect(x_axis(), p, 1e-9);
  CHECK(q.xi.x() == 1.0);
  CHECK(q.xi.y() == 1.0);
  p.xi = Vec3(0, -1, 0);
  CHECK(reflect(x_axis(), p, 1e-9).xi.y() == 1.0);
  p.xi = Vec3(1, -1e-12, 0);
  CHECK_THROWS_AS(reflect(x_axis(), p, 1e-9), GlancingReflect);
}

TEST_CASE("trace reflects off the lower wall with equal angles") {
  auto d = geometry::make_sector(0.7 * kPi);
  auto path = trace(d, ray(polar(2.0, 0.35 * kPi), -0.25 * kPi), 6.0, CornerPolicy::stop());
  int reflections = 0;
  for (const auto& e : path.events)
    if (const auto* r = std::get_if<Reflection>(&e)) {
      ++reflections;
      const double in = std::atan2(r->incoming.xi.y(), r->incoming.xi.x());
      const double out = std::atan2(r->outgoing.xi.y(), r->outgoing.xi.x());
      CHECK(out == doctest::Approx(-in).epsilon(1e-14));
      CHECK(std::abs(r->incoming.base.y()) <= 1e-12);
    }
  CHECK(reflections == 1);
  CHECK(path.events.back().index() == 0);  // ends on time with a segment
}

TEST_CASE("radial ray into the vertex stops with a normal corner hit") {
  auto d = geometry::make_sector(0.7 * kPi);
  auto path = trace(d, ray(polar(2.0, 0.2 * kPi), 1.2 * kPi), 5.0, CornerPolicy::stop());
  REQUIRE(path.events.size() == 2);
  const auto* hit = std::get_if<CornerHit>(&path.events.back());
  REQUIRE(hit);
  CHECK(hit->corner == 0);
  CHECK(hit->normal);
  CHECK(hit->entry.z == doctest::Approx(0.2 * kPi).epsilon(1e-12));
  CHECK(hit->entry.zeta_hat == 0.0);
  CHECK(hit->entry.xi_hat == -1.0);
  CHECK(hit->incoming.t == doctest::Approx(2.0));
}

TEST_CASE("a ray tangent to a wall stops without choosing a continuation") {
  auto d = geometry::make_sector(0.7 * kPi);
  auto path = trace(d, ray({1.0, 0.0}, 0.0), 3.0, CornerPolicy::stop());
  REQUIRE(path.events.size() == 1);
  const auto* g = std::get_if<GlancingStop>(&path.events[0]);
  REQUIRE(g);
  CHECK(g->surface == 0);
}

TEST_CASE("trace preconditions") {
  auto d = geometry::make_sector(0.7 * kPi);
  PhasePoint off = ray(polar(1.0, 0.3 * kPi), kPi);
  off.tau = 2.0;
  CHECK_THROWS_AS(trace(d, off, 1.0, CornerPolicy::stop()), OffCharacteristic);
  CHECK_THROWS_AS(trace(d, ray(polar(1.0, -0.3), kPi), 1.0, CornerPolicy::stop()), DomainError);
  CHECK_THROWS_AS(trace(d, ray(polar(1.0, 0.3), kPi), 0.0, CornerPolicy::stop()), ConfigError);
}

TEST_CASE("following a geometric branch leaves along the exit direction") {
  auto d = geometry::make_sector(0.7 * kPi);
  for (Side side : {Side::Positive, Side::Negative}) {
    auto path = trace(d, ray(polar(1.0, 0.2 * kPi), 1.2 * kPi), 3.0, CornerPolicy::follow(side));
    const auto* last = std::get_if<Segment>(&path.events.back());
    REQUIRE(last);
    const double a = std::atan2(last->end.xi.y(), last->end.xi.x());
    const auto want = oracle::unfold_exits(0.7 * kPi, 0.2 * kPi);
    const double target = side == Side::Positive ? 0.2 * kPi : 0.6 * kPi;
    CHECK(std::find_if(want.begin(), want.end(), [&](double z) { return std::abs(z - target) < 1e-12; }) != want.end());
    CHECK(a == doctest::Approx(target).epsilon(1e-12));
    CHECK(last->end.t == doctest::Approx(3.0));
  }
}

TEST_CASE("path invariants along a long billiard") {
  auto d = geometry::make_polygon({{0, 0}, {3, 0}, {3, 2}, {1.5, 0.7}, {0, 2}});
  auto path = trace(d, ray({0.4, 0.3}, 0.37), 40.0, CornerPolicy::stop());
  CHECK(path.events.size() > 10);
  const PhasePoint* prev = nullptr;
  for (const auto& e : path.events) {
    const auto& p = event_point(e);
    CHECK(std::abs(char_residual(p)) < 1e-10);
    if (const auto* s = std::get_if<Segment>(&e)) {
      if (prev) CHECK((s->start.base - prev->base).norm() < 1e-9);
      CHECK(s->end.t > s->start.t);
      prev = &s->end;
    }
  }
}

TEST_CASE("corner lift") {
  auto s = geometry::make_sector(0.7 * kPi);
  Tolerances tol;
  auto e = lift_entry(s, s.corner(0), at_corner_from(0.2 * kPi), tol);
  CHECK(e.normal);
  CHECK(e.state.z == doctest::Approx(0.2 * kPi));
  CHECK(e.state.xi_hat == -1.0);
  CHECK(e.state.zeta_hat == 0.0);
  CHECK(!e.state.eta_hat);
  auto w = geometry::make_wedge3d(0.7 * kPi);
  auto f = lift_entry(w, w.corner(0), at_corner_from(0.3 * kPi, 0.6), tol);
  CHECK(f.state.z == doctest::Approx(0.3 * kPi));
  CHECK(f.state.xi_hat == doctest::Approx(-0.8));
  REQUIRE(f.state.eta_hat);
  CHECK(*f.state.eta_hat == doctest::Approx(0.6));
  auto g = lift_entry(s, s.corner(0), at_corner_from(0.0), tol);
  CHECK(!g.normal);
  CHECK(g.state.z == 0.0);
  CHECK_THROWS_AS(lift_entry(w, w.corner(0), at_corner_from(0.3 * kPi, 1.0), tol), GlancingCornerError);
  CHECK_THROWS_AS(lift_entry(s, s.corner(0), at_corner_from(1.2 * kPi), tol), GeometryError);
}

TEST_CASE("fold is a triangle wave onto the link") {
  const double L = 0.7 * kPi;
  CHECK(fold(1.2 * kPi, L) == doctest::Approx(0.2 * kPi));
  CHECK(fold(-0.8 * kPi, L) == doctest::Approx(0.6 * kPi));
  CHECK(fold(-0.4 * kPi, L) == doctest::Approx(0.4 * kPi));
  for (int k = -50; k <= 50; ++k) {
    const double s = 0.173 * k;
    CHECK(fold(s, L) >= 0.0);
    CHECK(fold(s, L) <= L);
    CHECK(fold(s + 2 * L, L) == doctest::Approx(fold(s, L)).epsilon(1e-12));
    CHECK(fold(-s, L) == doctest::Approx(fold(s, L)).epsilon(1e-12));
  }
}

TEST_CASE("geometric exits agree with the bouncing-walk oracle") {
  const double L = 0.7 * kPi;
  auto ex = geometric_exits(geometry::Link::arc(L), 0.2 * kPi, 1e-9);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].z == doctest::Approx(0.2 * kPi).epsilon(1e-14));
  CHECK(ex[1].z == doctest::Approx(0.6 * kPi).epsilon(1e-14));
  CHECK(!ex[0].glancing);

  auto flat = geometric_exits(geometry::Link::arc(kPi), 0.3, 1e-9);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].z == doctest::Approx(kPi - 0.3));
  CHECK(flat[0].sides.size() == 2);

  auto edge = geometric_exits(geometry::Link::arc(L), 0.3 * kPi, 1e-9);
  bool glancing_at_end = false;
  for (const auto& e : edge)
    if (e.glancing && std::abs(e.z - L) < 1e-12) glancing_at_end = true;
  CHECK(glancing_at_end);

  std::mt19937_64 gen(5);
  for (double open : {0.3 * kPi, 0.7 * kPi, 1.3 * kPi, 1.9 * kPi}) {
    std::uniform_real_distribution<double> u(0.0, open);
    for (int k = 0; k < 200; ++k) {
      const double z = u(gen);
      const auto want = oracle::unfold_exits(open, z);
      const auto got = geometric_exits(geometry::Link::arc(open), z, 1e-9);
      bool near_end = false;
      for (double w : want) near_end |= w < 1e-9 || w > open - 1e-9;
      if (near_end) continue;
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i].z - want[i]) <= 1e-12);
    }
  }
}

TEST_CASE("diffracted fan over the sector") {
  auto d = geometry::make_sector(0.7 * kPi);
  Tolerances tol;
  auto fan = diffracted_fan(d, 0, at_corner_from(0.2 * kPi), 8, tol);
  std::vector<double> geometric;
  for (const auto& m : fan.members) {
    CHECK(m.z_out >= 0.0);
    CHECK(m.z_out <= 0.7 * kPi);
    CHECK(std::abs(char_residual(m.outgoing)) < 1e-12);
    CHECK(m.outgoing.tau == 1.0);
    CHECK(m.state.xi_hat == 1.0);
    if (m.tag == FanTag::Geometric) geometric.push_back(m.z_out);
  }
  REQUIRE(geometric.size() == 2);
  CHECK(geometric[0] == doctest::Approx(0.2 * kPi).epsilon(1e-14));
  CHECK(geometric[1] == doctest::Approx(0.6 * kPi).epsilon(1e-14));
  CHECK(fan.members.size() == 10);

  auto one = diffracted_fan(d, 0, at_corner_from(0.2 * kPi), 1, tol);
  int diffractive = 0;
  for (const auto& m : one.members)
    if (m.tag == FanTag::Diffractive) {
      ++diffractive;
      CHECK(m.z_out == doctest::Approx(0.35 * kPi));
    }
  CHECK(diffractive == 1);
}

TEST_CASE("wedge fan members lie on the Keller cone") {
  auto w = geometry::make_wedge3d(0.7 * kPi);
  auto fan = diffracted_fan(w, 0, at_corner_from(0.2 * kPi, 0.6), 16, Tolerances{});
  for (const auto& m : fan.members) {
    CHECK(m.outgoing.xi.z() == 0.6);
    CHECK(std::abs(m.outgoing.xi.head<2>().norm() - 0.8) <= 1e-12);
    CHECK(std::abs(char_residual(m.outgoing)) < 1e-12);
    REQUIRE(m.state.eta_hat);
    CHECK(*m.state.eta_hat == 0.6);
  }
}

TEST_CASE("fan tags are stable under refinement") {
  auto d = geometry::make_sector(0.7 * kPi);
  for (double z : {0.1 * kPi, 0.2 * kPi, 0.45 * kPi}) {
    const auto exits = geometric_exits(d.corner(0).link, z, 1e-9);
    for (int n : {4, 16, 64, 256}) {
      auto fan = diffracted_fan(d, 0, at_corner_from(z), n, Tolerances{});
      std::vector<double> tagged;
      for (const auto& m : fan.members)
        if (m.tag == FanTag::Geometric) tagged.push_back(m.z_out);
      REQUIRE(tagged.size() == exits.size());
      for (std::size_t i = 0; i < exits.size(); ++i) CHECK(std::abs(tagged[i] - exits[i].z) <= 1e-12);
    }
  }
}

TEST_CASE("fan members traced backward return to the corner at their exit direction") {
  auto d = geometry::make_sector(0.7 * kPi);
  auto fan = diffracted_fan(d, 0, at_corner_from(0.2 * kPi), 12, Tolerances{});
  for (const auto& m : fan.members) {
    if (m.tag == FanTag::GlancingExit) continue;
    PhasePoint p = m.outgoing;
    p.base += 0.8 * p.velocity();
    p.xi = -p.xi;
    auto path = trace(d, p, 2.0, CornerPolicy::stop());
    const auto* hit = std::get_if<CornerHit>(&path.events.back());
    REQUIRE(hit);
    CHECK(hit->entry.z == doctest::Approx(m.z_out).epsilon(1e-12));
  }
}

TEST_CASE("near misses in the plane sweep the straight-line angle") {
  auto plane = geometry::make_plane();
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  auto s = near_miss_family(plane, {0, 0.3, 2.0}, eps);
  for (const auto& m : s) {
    CHECK(std::abs(m.swept + std::asin(m.eps / 2.0) + std::atan(m.eps / 2.0) - kPi) <= 1e-12);
    CHECK(m.reflections == 0);
  }
}

TEST_CASE("near misses in the sector follow the mirror-unfolding oracle") {
  auto d = geometry::make_sector(0.7 * kPi);
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, -1e-1, -1e-2, -1e-3, -1e-4};
  for (double z : {0.1 * kPi, 0.2 * kPi, 0.3 * kPi}) {
    auto s = near_miss_family(d, {0, z, 2.0}, eps);
    REQUIRE(s.size() == eps.size());
    for (const auto& m : s) {
      CHECK(m.swept == doctest::Approx(oracle::straight_swept(std::abs(m.eps), 2.0)).epsilon(1e-12));
      const auto want = oracle::mirror_exit(0.7 * kPi, z, m.eps, 2.0);
      CHECK(m.exit_direction == doctest::Approx(want.direction).epsilon(1e-12));
      CHECK(m.reflections == want.reflections);
    }
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(s[i].swept - kPi) < std::abs(s[i - 1].swept - kPi));
  }
}

TEST_SUITE("prop-reflection") {
  TEST_CASE("reflection preserves energy and is an involution") {
    std::mt19937_64 gen(20261016);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * kPi);
    int done = 0;
    for (int k = 0; k < 20000; ++k) {
      const double a = ang(gen);
      geometry::Hypersurface h;
      h.direction = Vec2(std::cos(a), std::sin(a));
      h.inward_normal = Vec2(-std::sin(a), std::cos(a));
      PhasePoint p;
      p.base = Vec3(u(gen), u(gen), u(gen));
      p.tau = 0.5 + std::abs(u(gen));
      p.xi = Vec3(u(gen), u(gen), u(gen)) * p.tau;
      const Vec3 n(h.inward_normal.x(), h.inward_normal.y(), 0.0);
      if (std::abs(p.xi.dot(n)) < 1e-6 * p.xi.norm()) continue;
      const auto q = reflect(h, p, 1e-9);
      CHECK(std::abs(q.xi.norm() - p.xi.norm()) <= 1e-12 * p.xi.norm());
      CHECK(q.tau == p.tau);
      CHECK(q.base == p.base);
      CHECK(std::abs(q.xi.dot(n) + p.xi.dot(n)) <= 1e-12 * p.xi.norm());
      CHECK(std::abs(q.xi.dot(Vec3(h.direction.x(), h.direction.y(), 0.0)) -
                     p.xi.dot(Vec3(h.direction.x(), h.direction.y(), 0.0))) <= 1e-12 * p.xi.norm());
      CHECK(q.xi.z() == p.xi.z());
      const auto back = reflect(h, q, 1e-9);
      CHECK((back.xi - p.xi).norm() <= 1e-12 * p.xi.norm());
      ++done;
    }
    CHECK(done > 19000);
  }
}
