#include "cwlab/gbb_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "cwlab/errors.hpp"

namespace cwlab::gbb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

PhasePoint advance(const PhasePoint& p, double dt) {
  PhasePoint q = p;
  q.base = p.base + dt * p.velocity();
  q.t = p.t + dt;
  return q;
}

void check_characteristic(const PhasePoint& p, const Tolerances& tol) {
  if (p.tau == 0.0) throw OffCharacteristic("tau must be nonzero");
  const double res = hamiltonian::char_residual(p);
  if (std::abs(res) > tol.characteristic)
    throw OffCharacteristic("phase point is off the characteristic set (residual " + std::to_string(res) + ")");
}

// Corner frame used by near-miss runs; the plane has no corner so it uses the origin.
struct Frame {
  Vec2 center = Vec2::Zero();
  Vec2 reference = Vec2::UnitX();
  double opening = 2.0 * kPi;
};

Frame frame_for(const geometry::Domain& d, int corner) {
  if (d.kind() == geometry::DomainKind::Plane2D) return {};
  const auto& c = d.corner(corner);
  return {c.point, c.reference, c.opening()};
}

}  // namespace

const char* to_string(Side s) { return s == Side::Positive ? "positive" : "negative"; }

const char* to_string(FanTag t) {
  switch (t) {
    case FanTag::Geometric: return "Geometric";
    case FanTag::Diffractive: return "Diffractive";
    case FanTag::GlancingExit: return "GlancingExit";
  }
  return "?";
}

const char* event_name(const Event& e) {
  static constexpr const char* names[] = {"Segment", "Reflection", "CornerHit", "GlancingStop", "Exit"};
  return names[e.index()];
}

const PhasePoint& event_point(const Event& e) {
  return std::visit(
      [](const auto& v) -> const PhasePoint& {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Segment>) return v.end;
        else if constexpr (std::is_same_v<T, Reflection>) return v.outgoing;
        else if constexpr (std::is_same_v<T, CornerHit>) return v.incoming;
        else return v.point;
      },
      e);
}

PhasePoint reflect(const geometry::Hypersurface& h, const PhasePoint& p, double tol_glance) {
  const Vec3 n(h.inward_normal.x(), h.inward_normal.y(), 0.0);
  const double xn = p.xi.dot(n);
  if (std::abs(xn) < tol_glance * p.xi.norm())
    throw GlancingReflect("covector is tangent to hypersurface " + std::to_string(h.id));
  PhasePoint q = p;
  q.xi = p.xi - 2.0 * xn * n;
  return q;
}

LinkEntry lift_entry(const geometry::Domain& d, const geometry::Corner& c, const PhasePoint& p,
                     const Tolerances& tol) {
  const auto hyp = hamiltonian::corner_hyperbolic_data(d, p, tol.classify);
  const Vec2 v = p.velocity().head<2>();
  const double speed = v.norm();
  if (speed == 0.0) throw GlancingCornerError("ray has no motion transverse to the corner");
  const Vec2 back = -v / speed;
  double z = geometry::ccw_angle(c.reference, back);
  const double L = c.opening();
  if (z > L) {
    if (2.0 * kPi - z <= tol.geo) z = 0.0;
    else if (z - L <= tol.geo) z = L;
    else throw GeometryError("ray approaches the corner from outside the domain");
  }
  LinkEntry e;
  e.state.z = z;
  e.state.xi_hat = -hyp.mu;
  e.state.zeta_hat = 0.0;
  e.state.eta_hat = hyp.eta_hat;
  e.state.sgn_tau = hyp.sgn_tau;
  e.normal = z > tol.geo && z < L - tol.geo;
  return e;
}

double fold(double s, double opening) {
  const double period = 2.0 * opening;
  double m = std::fmod(s + opening, period);
  if (m < 0.0) m += period;
  return std::abs(m - opening);
}

std::vector<GeometricExit> geometric_exits(const geometry::Link& link, double z_in, double tol_geo) {
  if (link.kind != geometry::LinkKind::Arc)
    throw GeometryError("closed-form geometric exits need an arc link; use orthant_geometric_exits");
  const double L = link.length;
  std::vector<GeometricExit> out;
  auto add = [&](double z, Side side) {
    if (std::abs(z) <= tol_geo) z = 0.0;
    if (std::abs(z - L) <= tol_geo) z = L;
    for (auto& e : out)
      if (std::abs(e.z - z) <= tol_geo) {
        e.sides.push_back(side);
        return;
      }
    out.push_back({z, z == 0.0 || z == L, {side}});
  };
  add(fold(z_in + kPi, L), Side::Positive);
  add(fold(z_in - kPi, L), Side::Negative);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.z < b.z; });
  return out;
}

std::vector<Vec3> orthant_geometric_exits(const Vec3& z_in_raw, int shots, double tol) {
  if (shots < 1) throw ConfigError("need at least one shot");
  if ((z_in_raw.array() < -tol).any()) throw GeometryError("entry point lies outside the octant");
  const Vec3 z_in = z_in_raw.normalized();
  auto is_link_corner = [&](const Vec3& z) {
    int zeros = 0;
    for (int i = 0; i < 3; ++i) zeros += std::abs(z[i]) <= tol;
    return zeros >= 2;
  };
  if (is_link_corner(z_in)) throw BilliardUnresolved("entry point is a corner of the link");
  // Orthonormal tangent frame at z_in.
  Vec3 a = std::abs(z_in.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (a - a.dot(z_in) * z_in).normalized();
  const Vec3 e2 = z_in.cross(e1);
  std::vector<Vec3> exits;
  int unresolved = 0;
  for (int k = 0; k < shots; ++k) {
    const double phi = 2.0 * kPi * (k + 0.5) / shots;
    Vec3 z = z_in, d = std::cos(phi) * e1 + std::sin(phi) * e2;
    bool leaves = false;
    for (int i = 0; i < 3; ++i)
      if (std::abs(z[i]) <= tol && d[i] < 0.0) leaves = true;
    if (leaves) continue;
    double remaining = kPi;
    bool bad = false;
    for (int bounce = 0; bounce < 64 && remaining > 0.0; ++bounce) {
      // z(s) = cos s z + sin s d; first s in (0, remaining] with a coordinate hitting zero.
      double s_hit = kInf;
      int which = -1;
      for (int i = 0; i < 3; ++i) {
        const double A = z[i], B = d[i];
        const double R = std::hypot(A, B);
        if (R == 0.0) continue;
        const double phase = std::atan2(B, A);  // z_i(s) = R cos(s - phase)
        double s = phase + 0.5 * kPi;
        while (s <= 1e-12) s += kPi;
        while (s - kPi > 1e-12) s -= kPi;
        if (std::abs(A) <= tol && B >= 0.0 && s < 1e-9) s += kPi;
        if (s < s_hit) {
          s_hit = s;
          which = i;
        }
      }
      if (s_hit >= remaining) {
        z = std::cos(remaining) * z + std::sin(remaining) * d;
        remaining = 0.0;
        break;
      }
      const Vec3 zn = std::cos(s_hit) * z + std::sin(s_hit) * d;
      Vec3 dn = -std::sin(s_hit) * z + std::cos(s_hit) * d;
      z = zn;
      z[which] = 0.0;
      if (is_link_corner(z)) {
        bad = true;
        break;
      }
      dn[which] = -dn[which];
      d = (dn - dn.dot(z) * z).normalized();
      remaining -= s_hit;
    }
    if (bad) {
      ++unresolved;
      continue;
    }
    z = z.cwiseMax(0.0).normalized();
    if (is_link_corner(z)) throw BilliardUnresolved("billiard shot ends in a corner of the link");
    bool merged = false;
    for (const auto& e : exits)
      if ((e - z).norm() <= std::sqrt(tol)) merged = true;
    if (!merged) exits.push_back(z);
  }
  if (exits.empty()) throw BilliardUnresolved("no billiard shot resolved (" + std::to_string(unresolved) + " hit link corners)");
  return exits;
}

DiffractionFan diffracted_fan(const geometry::Domain& d, int corner_id, const PhasePoint& incoming,
                              int n, const Tolerances& tol) {
  if (n < 1) throw ConfigError("fan size must be at least 1");
  const double L = d.corner(corner_id).opening();
  std::vector<double> zs;
  for (int k = 0; k < n; ++k) zs.push_back((k + 0.5) * L / n);
  return diffracted_fan(d, corner_id, incoming, std::move(zs), tol);
}

DiffractionFan diffracted_fan(const geometry::Domain& d, int corner_id, const PhasePoint& incoming,
                              std::vector<double> zs, const Tolerances& tol) {
  if (zs.empty()) throw ConfigError("fan needs at least one direction");
  const auto& c = d.corner(corner_id);
  if (c.link.kind != geometry::LinkKind::Arc) throw GeometryError("fans need an arc link");
  const auto entry = lift_entry(d, c, incoming, tol);
  DiffractionFan fan;
  fan.corner = corner_id;
  fan.incoming = incoming;
  fan.entry = entry.state;
  fan.exits = geometric_exits(c.link, entry.state.z, tol.geo);
  const double L = c.opening();
  const double mu = -entry.state.xi_hat;
  for (double z : zs)
    if (!(z >= 0.0 && z <= L)) throw ConfigError("fan direction outside the link");
  for (const auto& e : fan.exits) {
    bool present = false;
    for (double& z : zs)
      if (std::abs(z - e.z) <= tol.geo) {
        z = e.z;
        present = true;
      }
    if (!present) zs.push_back(e.z);
  }
  std::sort(zs.begin(), zs.end());
  for (double z : zs) {
    FanMember m;
    m.z_out = z;
    const Vec2 dir = c.direction(z);
    m.outgoing = incoming;
    m.outgoing.base = Vec3(c.point.x(), c.point.y(), incoming.base.z());
    m.outgoing.xi.x() = incoming.tau * mu * dir.x();
    m.outgoing.xi.y() = incoming.tau * mu * dir.y();
    m.state = LinkState{z, mu, 0.0, entry.state.eta_hat, entry.state.sgn_tau};
    m.tag = FanTag::Diffractive;
    for (const auto& e : fan.exits)
      if (std::abs(e.z - z) <= tol.geo) m.tag = e.glancing ? FanTag::GlancingExit : FanTag::Geometric;
    if (z == 0.0 || z == L) m.tag = FanTag::GlancingExit;
    fan.members.push_back(m);
  }
  return fan;
}

RayPath trace(const geometry::Domain& d, const PhasePoint& p0, double duration,
              const CornerPolicy& policy, const TraceOptions& opt) {
  validate(opt.tol);
  if (!(duration > 0.0)) throw ConfigError("trace duration must be positive");
  check_characteristic(p0, opt.tol);
  if (!d.contains(p0.base, opt.tol.geo)) throw DomainError("start point lies outside the domain");
  const auto& tol = opt.tol;
  const double t_end = p0.t + duration;
  RayPath path;
  PhasePoint p = p0;

  // A start on a wall moving along it is the tangency the tracer refuses to continue.
  for (const auto& h : d.hypersurfaces()) {
    const Vec2 v = p.velocity().head<2>();
    if (h.distance(p.base.head<2>()) <= tol.geo && v.norm() > 0.0 &&
        std::abs(h.inward_normal.dot(v)) < tol.glance * v.norm()) {
      bool at_corner = false;
      for (const auto& c : d.corners())
        if ((p.base.head<2>() - c.point).norm() <= tol.geo) at_corner = true;
      if (!at_corner) {
        path.events.push_back(GlancingStop{p, h.id});
        return path;
      }
    }
  }

  for (int guard = 0;; ++guard) {
    if (guard > opt.max_events) throw StepSizeUnderflow("event limit reached; the path cannot be resolved");
    const Vec2 x = p.base.head<2>();
    const Vec2 v = p.velocity().head<2>();
    const double v2 = v.squaredNorm();

    enum class Kind { Time, Wall, Corner, Box } kind = Kind::Time;
    double dt = t_end - p.t;
    int which = -1;

    if (v2 > 0.0) {
      for (const auto& h : d.hypersurfaces()) {
        const double dist = h.inward_normal.dot(x - h.origin);
        const double rate = h.inward_normal.dot(v);
        if (rate >= 0.0) continue;
        double tau_hit = std::max(0.0, dist) / (-rate);
        const Vec2 q = x + tau_hit * v;
        const double along = (q - h.origin).dot(h.direction);
        if (along < -tol.geo || along > h.extent + tol.geo) continue;
        if (tau_hit <= 0.0 && dist < -tol.geo) continue;
        if (tau_hit < dt) {
          dt = tau_hit;
          kind = Kind::Wall;
          which = h.id;
        }
      }
      for (const auto& c : d.corners()) {
        const double tc = (c.point - x).dot(v) / v2;
        if (tc <= tol.geo / std::sqrt(v2)) continue;
        const double miss = (x + tc * v - c.point).norm();
        if (miss <= tol.geo && tc <= dt + tol.geo / std::sqrt(v2)) {
          dt = tc;
          kind = Kind::Corner;
          which = c.id;
        }
      }
      if (std::isfinite(opt.box_radius)) {
        const Vec2 rel = x - opt.box_center;
        const double b = rel.dot(v), cc = rel.squaredNorm() - opt.box_radius * opt.box_radius;
        const double disc = b * b - v2 * cc;
        if (disc >= 0.0) {
          const double tb = std::max(0.0, (-b + std::sqrt(disc)) / v2);
          if (tb < dt) {
            dt = tb;
            kind = Kind::Box;
          }
        } else if (cc > 0.0) {
          dt = 0.0;
          kind = Kind::Box;
        }
      }
    }

    // Snap a wall hit that lands on a corner to the corner.
    if (kind == Kind::Wall) {
      const Vec2 q = x + dt * v;
      for (const auto& c : d.corners())
        if ((q - c.point).norm() <= tol.geo) {
          kind = Kind::Corner;
          which = c.id;
        }
    }

    PhasePoint end = advance(p, dt);
    if (kind == Kind::Corner) {
      const auto& c = d.corner(which);
      end.base.x() = c.point.x();
      end.base.y() = c.point.y();
    }
    if (dt > 0.0) path.events.push_back(Segment{p, end});

    switch (kind) {
      case Kind::Time:
        return path;
      case Kind::Box:
        path.events.push_back(Exit{end});
        return path;
      case Kind::Wall: {
        PhasePoint out;
        try {
          out = reflect(d.surface(which), end, tol.glance);
        } catch (const GlancingReflect&) {
          path.events.push_back(GlancingStop{end, which});
          return path;
        }
        path.events.push_back(Reflection{which, end, out});
        p = out;
        break;
      }
      case Kind::Corner: {
        const auto& c = d.corner(which);
        const auto entry = lift_entry(d, c, end, tol);
        path.events.push_back(CornerHit{which, end, entry.state, entry.normal});
        if (policy.kind == CornerPolicy::Kind::Stop) return path;
        if (policy.kind == CornerPolicy::Kind::EmitFan) {
          path.fan = diffracted_fan(d, which, end, policy.fan_size, tol);
          return path;
        }
        const auto exits = geometric_exits(c.link, entry.state.z, tol.geo);
        const GeometricExit* chosen = nullptr;
        for (const auto& e : exits)
          for (Side s : e.sides)
            if (s == policy.side) chosen = &e;
        if (chosen->glancing) {
          const int wall = chosen->z == 0.0 ? c.adjacent[0] : c.adjacent[1];
          path.events.push_back(GlancingStop{end, wall});
          return path;
        }
        const double mu = -entry.state.xi_hat;
        const Vec2 dir = c.direction(chosen->z);
        p = end;
        p.xi.x() = end.tau * mu * dir.x();
        p.xi.y() = end.tau * mu * dir.y();
        break;
      }
    }
    if (p.t >= t_end) return path;
  }
}

std::vector<NearMissSample> near_miss_family(const geometry::Domain& d, const Aim& aim,
                                             const std::vector<double>& eps_list,
                                             const TraceOptions& opt) {
  const Frame f = frame_for(d, aim.corner);
  const double R = aim.start_distance;
  if (!(R > 0.0)) throw ConfigError("start distance must be positive");
  auto dir = [&](double z) {
    const double c = std::cos(z), s = std::sin(z);
    return Vec2(c * f.reference.x() - s * f.reference.y(), s * f.reference.x() + c * f.reference.y());
  };
  std::vector<NearMissSample> out;
  for (double eps : eps_list) {
    const Vec2 start = f.center + R * dir(aim.z_in) + eps * dir(aim.z_in + 0.5 * kPi);
    PhasePoint p;
    p.base = Vec3(start.x(), start.y(), 0.0);
    p.tau = 1.0;
    const Vec2 v = -dir(aim.z_in);
    p.xi = Vec3(v.x(), v.y(), 0.0);
    TraceOptions o = opt;
    o.box_center = f.center;
    o.box_radius = R;
    const auto path = trace(d, p, 1e3 * R, CornerPolicy::stop(), o);
    NearMissSample s;
    s.eps = eps;
    bool exited = false;
    for (const auto& e : path.events) {
      if (const auto* seg = std::get_if<Segment>(&e)) {
        const Vec2 a = seg->start.base.head<2>() - f.center, b = seg->end.base.head<2>() - f.center;
        s.swept += std::abs(std::atan2(cross2(a, b), a.dot(b)));
      } else if (std::holds_alternative<Reflection>(e)) {
        ++s.reflections;
      } else if (const auto* ex = std::get_if<Exit>(&e)) {
        exited = true;
        s.exit_direction = geometry::ccw_angle(f.reference, ex->point.velocity().head<2>());
      } else if (std::holds_alternative<CornerHit>(e)) {
        throw GeometryError("near-miss ray hit the corner; eps is below the geometric tolerance");
      } else if (const auto* g = std::get_if<GlancingStop>(&e)) {
        throw GlancingReflect("near-miss ray glanced off hypersurface " + std::to_string(g->surface));
      }
    }
    if (!exited) throw StepSizeUnderflow("near-miss ray did not leave the start ball");
    out.push_back(s);
  }
  return out;
}

}  // namespace cwlab::gbb
