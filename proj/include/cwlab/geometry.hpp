#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cwlab/tolerances.hpp"

namespace cwlab::geometry {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class DomainKind { Sector2D, Polygon2D, Wedge3D, Plane2D };
enum class LinkKind { Arc, SphericalOrthant };

std::string to_string(DomainKind kind);

/// Inward-direction set of a corner. An Arc of length L carries the flat
/// metric dz^2 on [0, L]; the orthant is the unit-sphere octant with its
/// round metric, bounded by the three coordinate great circles.
struct Link {
  LinkKind kind = LinkKind::Arc;
  double length = 0.0;  // arc length; unused for the orthant

  static Link arc(double length) { return {LinkKind::Arc, length}; }
  static Link orthant() { return {LinkKind::SphericalOrthant, 0.0}; }
  int dimension() const { return kind == LinkKind::Arc ? 1 : 2; }
};

/// Boundary hypersurface, stored by its cross-sectional trace: a segment
/// (polygon edge) or a ray (sector wall) starting at `origin`.
struct Hypersurface {
  int id = 0;
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::UnitX();   // unit
  double extent = std::numeric_limits<double>::infinity();
  Vec2 inward_normal = Vec2::UnitY();  // unit

  double distance(const Vec2& p) const;
};

struct Corner {
  int id = 0;
  Vec2 point = Vec2::Zero();        // vertex, or the edge's trace for a wedge
  Vec3 axis = Vec3::UnitZ();        // edge direction (meaningful for Wedge3D)
  int codimension = 2;
  std::array<int, 2> adjacent{0, 1};  // {surface at z = 0, surface at z = opening}
  Vec2 reference = Vec2::UnitX();   // unit direction of the z = 0 surface
  Link link;

  double opening() const { return link.length; }
  /// Cross-sectional unit direction with link coordinate z.
  Vec2 direction(double z) const;
};

class Domain {
 public:
  Domain(DomainKind kind, double opening, std::vector<Vec2> vertices,
         std::vector<Hypersurface> surfaces, std::vector<Corner> corners);

  DomainKind kind() const { return kind_; }
  int dimension() const { return kind_ == DomainKind::Wedge3D ? 3 : 2; }
  double opening() const { return opening_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Hypersurface>& hypersurfaces() const { return surfaces_; }
  const std::vector<Corner>& corners() const { return corners_; }
  const Hypersurface& surface(int id) const;
  const Corner& corner(int id) const;

  /// Closure membership of the cross-section, with slack `tol`.
  bool contains(const Vec3& p, double tol) const;

 private:
  DomainKind kind_;
  double opening_;
  std::vector<Vec2> vertices_;
  std::vector<Hypersurface> surfaces_;
  std::vector<Corner> corners_;
};

Domain make_sector(double opening);
Domain make_wedge3d(double opening);
/// Simple polygon; vertices may be given in either orientation.
Domain make_polygon(std::vector<Vec2> vertices);
/// Unbounded plane with no boundary; reference domain for near-miss checks.
Domain make_plane();

struct PolarPoint {
  double x = 0.0;  // distance to the corner
  double z = 0.0;  // link coordinate
  double y = 0.0;  // coordinate along the corner (axial; zero in 2D)
};

class BlowupChart {
 public:
  BlowupChart(const Corner& corner, double validity_radius, bool axial);

  int corner_id() const { return corner_id_; }
  double validity_radius() const { return radius_; }
  PolarPoint to_polar(const Vec3& p, double tol) const;
  Vec3 from_polar(const PolarPoint& q) const;

 private:
  int corner_id_;
  Vec2 apex_;
  Vec2 reference_;
  double opening_;
  double radius_;
  bool axial_;
};

BlowupChart chart_for(const Domain& d, int corner_id);
PolarPoint to_polar(const BlowupChart& chart, const Vec3& p, double tol = 1e-9);

struct BaseLocation {
  enum class Kind { Interior, Hypersurface, Corner };
  Kind kind = Kind::Interior;
  int id = -1;

  bool operator==(const BaseLocation&) const = default;
};

BaseLocation classify_base_point(const Domain& d, const Vec3& p, double tol_geo);

/// Counter-clockwise angle of `v` relative to `reference`, in [0, 2*pi).
double ccw_angle(const Vec2& reference, const Vec2& v);

}  // namespace cwlab::geometry
