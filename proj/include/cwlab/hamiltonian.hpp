#pragma once

#include <optional>
#include <vector>

#include "cwlab/geometry.hpp"

namespace cwlab::hamiltonian {

using geometry::Vec3;

/// Cotangent data over a base point. In 2D the third components are zero;
/// xi.z() is the axial dual for a wedge.
struct PhasePoint {
  Vec3 base = Vec3::Zero();
  double t = 0.0;
  double tau = 1.0;
  Vec3 xi = Vec3::Zero();

  Vec3 velocity() const { return xi / tau; }
};

/// (tau^2 - |xi|^2) / tau^2.
double char_residual(const PhasePoint& p);

/// Rescaled fiber coordinates over a corner with an arc link.
struct LinkState {
  double z = 0.0;
  double xi_hat = 0.0;
  double zeta_hat = 0.0;
  std::optional<double> eta_hat;  // axial; absent in 2D
  int sgn_tau = 1;
};

enum class CovectorClass { Elliptic, Glancing, Hyperbolic };

const char* to_string(CovectorClass c);

struct CornerCovectorClass {
  CovectorClass kind = CovectorClass::Hyperbolic;
  double mu = 0.0;  // sqrt(1 - h(eta_hat)); set for non-elliptic classes
};

/// Rescaled covector at a point of the link boundary. `zeta_boundary` holds
/// the duals to the boundary-defining link coordinates, `zeta_other` the
/// remaining link duals (unit link metric).
struct CornerCovector {
  double xi_hat = 0.0;
  std::vector<double> eta_hat;
  std::vector<double> zeta_boundary;
  std::vector<double> zeta_other;
};

CornerCovectorClass classify_at_corner(const geometry::Corner& corner, const CornerCovector& c,
                                       double tol_class);

/// Unscaled form: every dual is divided by |tau| first.
CornerCovectorClass classify_at_corner(const geometry::Corner& corner, double tau, double xi,
                                       const std::vector<double>& eta,
                                       const std::vector<double>& zeta_boundary,
                                       const std::vector<double>& zeta_other, double tol_class);

struct HyperbolicData {
  std::optional<double> eta_hat;
  double mu = 1.0;
  int sgn_tau = 1;
};

/// Throws GlancingCornerError when mu <= tol.
HyperbolicData corner_hyperbolic_data(const geometry::Domain& d, const PhasePoint& p, double tol);

}  // namespace cwlab::hamiltonian
