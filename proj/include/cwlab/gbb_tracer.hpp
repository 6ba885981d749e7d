#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "cwlab/geometry.hpp"
#include "cwlab/hamiltonian.hpp"
#include "cwlab/tolerances.hpp"

namespace cwlab::gbb {

using geometry::Vec2;
using geometry::Vec3;
using hamiltonian::LinkState;
using hamiltonian::PhasePoint;

/// Branch of the link flow: zeta_hat > 0 (towards increasing z) or < 0.
enum class Side { Positive, Negative };

const char* to_string(Side s);

struct CornerPolicy {
  enum class Kind { Stop, FollowGeometric, EmitFan };
  Kind kind = Kind::Stop;
  Side side = Side::Positive;
  int fan_size = 0;

  static CornerPolicy stop() { return {}; }
  static CornerPolicy follow(Side s) { return {Kind::FollowGeometric, s, 0}; }
  static CornerPolicy emit_fan(int n) { return {Kind::EmitFan, Side::Positive, n}; }
};

struct Segment {
  PhasePoint start, end;
};
struct Reflection {
  int surface;
  PhasePoint incoming, outgoing;
};
struct CornerHit {
  int corner;
  PhasePoint incoming;
  LinkState entry;
  bool normal;
};
struct GlancingStop {
  PhasePoint point;
  int surface;
};
struct Exit {
  PhasePoint point;
};
using Event = std::variant<Segment, Reflection, CornerHit, GlancingStop, Exit>;

const char* event_name(const Event& e);
/// Base point where the event ends (Segment: its end).
const PhasePoint& event_point(const Event& e);

struct GeometricExit {
  double z = 0.0;
  bool glancing = false;
  std::vector<Side> sides;
};

enum class FanTag { Geometric, Diffractive, GlancingExit };
const char* to_string(FanTag t);

struct FanMember {
  double z_out = 0.0;
  PhasePoint outgoing;
  LinkState state;
  FanTag tag = FanTag::Diffractive;
};

struct DiffractionFan {
  int corner = 0;
  PhasePoint incoming;
  LinkState entry;
  std::vector<GeometricExit> exits;
  std::vector<FanMember> members;
};

struct RayPath {
  std::vector<Event> events;
  std::optional<DiffractionFan> fan;
};

struct TraceOptions {
  Tolerances tol;
  /// Leaving the ball of this radius about box_center (moving outward) ends
  /// the path with an Exit event.
  double box_radius = 1e3;
  Vec2 box_center = Vec2::Zero();
  int max_events = 100000;
};

RayPath trace(const geometry::Domain& d, const PhasePoint& p0, double duration,
              const CornerPolicy& policy, const TraceOptions& opt = {});

/// Specular reflection off a hypersurface; GlancingReflect when the normal
/// component is below tol_glance * |xi|.
PhasePoint reflect(const geometry::Hypersurface& h, const PhasePoint& p, double tol_glance);

struct LinkEntry {
  LinkState state;
  bool normal = true;  // false when the entry point lies on the link boundary
};

LinkEntry lift_entry(const geometry::Domain& d, const geometry::Corner& c, const PhasePoint& p,
                     const Tolerances& tol);

struct LinkSample {
  double s;
  LinkState state;
};

struct LinkTrajectory {
  std::vector<LinkSample> samples;
  double arc_length = 0.0;
  int reflections = 0;
  double mu = 1.0;
  LinkState entry, exit;
};

struct FlowOptions {
  double eps_kick = 1e-6;
  Side side = Side::Positive;
  double tol_geo = 1e-9;
  long max_steps = 10'000'000;
  bool record = true;
};

/// Integrator step used when none is chosen; keeps |(xi, zeta)| drift near 1e-13.
inline constexpr double kDefaultLinkStep = 1e-3;

/// Rescaled link flow dz = 2 zeta, dxi = 2 zeta^2, dzeta = -2 xi zeta, with
/// specular reflection at the ends of an arc link, from an incoming state
/// to the outgoing radial set. A radial entry is first kicked by eps_kick.
LinkTrajectory egbb_link_flow(const geometry::Link& link, const LinkState& entry, double step,
                              const FlowOptions& opt = {});

/// Same flow on the octant link; z is a unit vector, zeta tangent to it.
struct SphereLinkState {
  Vec3 z = Vec3::Zero();
  double xi_hat = 0.0;
  Vec3 zeta = Vec3::Zero();
};

struct SphereTrajectory {
  double arc_length = 0.0;
  int reflections = 0;
  SphereLinkState entry, exit;
};

/// `direction` picks the initial tangent of a kicked radial entry.
SphereTrajectory egbb_sphere_flow(const SphereLinkState& entry, const Vec3& direction, double step,
                                  const FlowOptions& opt = {});

/// Triangle wave of period 2 * opening mapping the line onto [0, opening].
double fold(double s, double opening);

/// Endpoints of length-pi broken geodesics from z_in on an arc link.
std::vector<GeometricExit> geometric_exits(const geometry::Link& link, double z_in, double tol_geo);

/// Octant link: endpoints of length-pi billiard shots from z_in, merged
/// within tol. Throws BilliardUnresolved if an endpoint is a link corner.
std::vector<Vec3> orthant_geometric_exits(const Vec3& z_in, int shots, double tol);

/// n outgoing rays at z = (k + 1/2) opening / n plus the geometric exits.
DiffractionFan diffracted_fan(const geometry::Domain& d, int corner_id, const PhasePoint& incoming,
                              int n, const Tolerances& tol);
/// Same with explicit outgoing directions in [0, opening].
DiffractionFan diffracted_fan(const geometry::Domain& d, int corner_id, const PhasePoint& incoming,
                              std::vector<double> z_out, const Tolerances& tol);

/// Ray aimed at a corner from distance `start_distance` along link direction z_in.
struct Aim {
  int corner = 0;
  double z_in = 0.0;
  double start_distance = 2.0;
};

struct NearMissSample {
  double eps = 0.0;
  double swept = 0.0;           // total polar angle swept about the corner
  double exit_direction = 0.0;  // outgoing velocity angle in link coordinates
  int reflections = 0;
};

/// Shifts the aimed ray laterally by each eps (positive towards increasing z)
/// and traces it with reflections until it leaves the start ball.
std::vector<NearMissSample> near_miss_family(const geometry::Domain& d, const Aim& aim,
                                             const std::vector<double>& eps_list,
                                             const TraceOptions& opt = {});

}  // namespace cwlab::gbb
