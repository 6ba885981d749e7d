#include "cwlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cwlab/errors.hpp"

namespace cwlab {

void validate(const Tolerances& tol) {
  const double vals[] = {tol.geo, tol.characteristic, tol.classify, tol.glance, tol.eps_kick};
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerances must be positive and finite");
  if (tol.eps_kick >= 1.0) throw ConfigError("eps_kick must be below 1");
}

}  // namespace cwlab

namespace cwlab::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 rotate(const Vec2& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Vec2 left_normal(const Vec2& d) { return {-d.y(), d.x()}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_opening(double opening) {
  if (!(opening > 0.0 && opening < kTwoPi))
    throw DomainError("opening angle must lie in (0, 2*pi), got " + std::to_string(opening));
}

// Two walls meeting at the origin: id 0 along +x, id 1 at angle `opening`.
std::vector<Hypersurface> sector_walls(double opening) {
  Hypersurface w0;
  w0.id = 0;
  w0.direction = Vec2::UnitX();
  w0.inward_normal = Vec2::UnitY();
  Hypersurface w1;
  w1.id = 1;
  w1.direction = rotate(Vec2::UnitX(), opening);
  w1.inward_normal = -left_normal(w1.direction);
  return {w0, w1};
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::abs(cross(q - p, r - p)) == 0.0 && std::min(p.x(), q.x()) <= r.x() &&
           r.x() <= std::max(p.x(), q.x()) && std::min(p.y(), q.y()) <= r.y() &&
           r.y() <= std::max(p.y(), q.y());
  };
  return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Sector2D: return "sector2d";
    case DomainKind::Polygon2D: return "polygon2d";
    case DomainKind::Wedge3D: return "wedge3d";
    case DomainKind::Plane2D: return "plane2d";
  }
  return "unknown";
}

double ccw_angle(const Vec2& reference, const Vec2& v) {
  double a = std::atan2(cross(reference, v), reference.dot(v));
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

double Hypersurface::distance(const Vec2& p) const {
  double s = (p - origin).dot(direction);
  s = std::clamp(s, 0.0, extent);
  return (p - (origin + s * direction)).norm();
}

Vec2 Corner::direction(double z) const { return rotate(reference, z); }

Domain::Domain(DomainKind kind, double opening, std::vector<Vec2> vertices,
               std::vector<Hypersurface> surfaces, std::vector<Corner> corners)
    : kind_(kind),
      opening_(opening),
      vertices_(std::move(vertices)),
      surfaces_(std::move(surfaces)),
      corners_(std::move(corners)) {}

const Hypersurface& Domain::surface(int id) const {
  if (id < 0 || id >= static_cast<int>(surfaces_.size()))
    throw DomainError("no hypersurface with id " + std::to_string(id));
  return surfaces_[id];
}

const Corner& Domain::corner(int id) const {
  if (id < 0 || id >= static_cast<int>(corners_.size()))
    throw DomainError("no corner with id " + std::to_string(id));
  return corners_[id];
}

bool Domain::contains(const Vec3& p3, double tol) const {
  const Vec2 p = p3.head<2>();
  switch (kind_) {
    case DomainKind::Plane2D:
      return true;
    case DomainKind::Sector2D:
    case DomainKind::Wedge3D: {
      if (p.norm() <= tol) return true;
      const double a = ccw_angle(Vec2::UnitX(), p);
      if (a <= opening_) return true;
      for (const auto& s : surfaces_)
        if (s.distance(p) <= tol) return true;
      return false;
    }
    case DomainKind::Polygon2D: {
      for (const auto& s : surfaces_)
        if (s.distance(p) <= tol) return true;
      bool inside = false;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[j];
        if ((a.y() > p.y()) != (b.y() > p.y()) &&
            p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
          inside = !inside;
      }
      return inside;
    }
  }
  return false;
}

Domain make_sector(double opening) {
  check_opening(opening);
  Corner c;
  c.link = Link::arc(opening);
  return Domain(DomainKind::Sector2D, opening, {Vec2::Zero()}, sector_walls(opening), {c});
}

Domain make_wedge3d(double opening) {
  check_opening(opening);
  Corner c;
  c.link = Link::arc(opening);
  return Domain(DomainKind::Wedge3D, opening, {Vec2::Zero()}, sector_walls(opening), {c});
}

Domain make_plane() { return Domain(DomainKind::Plane2D, kTwoPi, {}, {}, {}); }

Domain make_polygon(std::vector<Vec2> v) {
  const std::size_t n = v.size();
  if (n < 3) throw DomainError("polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
  if (std::abs(area2) == 0.0) throw DomainError("degenerate polygon");
  if (area2 < 0.0) std::reverse(v.begin(), v.end());
  for (std::size_t i = 0; i < n; ++i) {
    if ((v[(i + 1) % n] - v[i]).norm() == 0.0) throw DomainError("repeated polygon vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw DomainError("polygon is not simple");
    }
  }
  std::vector<Hypersurface> edges;
  for (std::size_t i = 0; i < n; ++i) {
    Hypersurface e;
    e.id = static_cast<int>(i);
    e.origin = v[i];
    const Vec2 d = v[(i + 1) % n] - v[i];
    e.extent = d.norm();
    e.direction = d / e.extent;
    e.inward_normal = left_normal(e.direction);
    edges.push_back(e);
  }
  std::vector<Corner> corners;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    Corner c;
    c.id = static_cast<int>(i);
    c.point = v[i];
    c.adjacent = {static_cast<int>(i), static_cast<int>(prev)};
    c.reference = edges[i].direction;
    const double angle = ccw_angle(edges[i].direction, -edges[prev].direction);
    if (!(angle > 0.0 && angle < kTwoPi)) throw DomainError("degenerate polygon corner");
    c.link = Link::arc(angle);
    corners.push_back(c);
  }
  return Domain(DomainKind::Polygon2D, 0.0, std::move(v), std::move(edges), std::move(corners));
}

BlowupChart::BlowupChart(const Corner& corner, double validity_radius, bool axial)
    : corner_id_(corner.id),
      apex_(corner.point),
      reference_(corner.reference),
      opening_(corner.opening()),
      radius_(validity_radius),
      axial_(axial) {}

PolarPoint BlowupChart::to_polar(const Vec3& p, double tol) const {
  const Vec2 d = p.head<2>() - apex_;
  PolarPoint q;
  q.x = d.norm();
  q.y = axial_ ? p.z() : 0.0;
  if (q.x > radius_) throw ChartError("point lies outside the chart radius");
  if (q.x == 0.0) return q;
  double z = ccw_angle(reference_, d);
  if (z > opening_) {
    // Points a hair clockwise of the reference edge come back near 2*pi.
    if (kTwoPi - z <= tol / q.x + tol)
      z -= kTwoPi;
    else if (z - opening_ > tol / q.x + tol)
      throw ChartError("point lies outside the corner's wedge");
  }
  q.z = z;
  return q;
}

Vec3 BlowupChart::from_polar(const PolarPoint& q) const {
  const Vec2 p = apex_ + q.x * rotate(reference_, q.z);
  return {p.x(), p.y(), axial_ ? q.y : 0.0};
}

BlowupChart chart_for(const Domain& d, int corner_id) {
  const Corner& c = d.corner(corner_id);
  double radius = std::numeric_limits<double>::infinity();
  if (d.kind() == DomainKind::Polygon2D) {
    for (const auto& s : d.hypersurfaces())
      if (s.id != c.adjacent[0] && s.id != c.adjacent[1]) radius = std::min(radius, s.distance(c.point));
  }
  return BlowupChart(c, radius, d.kind() == DomainKind::Wedge3D);
}

PolarPoint to_polar(const BlowupChart& chart, const Vec3& p, double tol) {
  return chart.to_polar(p, tol);
}

BaseLocation classify_base_point(const Domain& d, const Vec3& p3, double tol_geo) {
  const Vec2 p = p3.head<2>();
  for (const auto& c : d.corners())
    if ((p - c.point).norm() <= tol_geo) return {BaseLocation::Kind::Corner, c.id};
  int best = -1;
  double best_dist = tol_geo;
  for (const auto& s : d.hypersurfaces()) {
    const double dist = s.distance(p);
    if (dist <= best_dist) {
      best = s.id;
      best_dist = dist;
    }
  }
  if (best >= 0) return {BaseLocation::Kind::Hypersurface, best};
  return {};
}

}  // namespace cwlab::geometry
