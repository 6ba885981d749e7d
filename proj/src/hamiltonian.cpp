#include "cwlab/hamiltonian.hpp"

#include <cmath>

#include "cwlab/errors.hpp"

namespace cwlab::hamiltonian {

double char_residual(const PhasePoint& p) {
  return (p.tau * p.tau - p.xi.squaredNorm()) / (p.tau * p.tau);
}

const char* to_string(CovectorClass c) {
  switch (c) {
    case CovectorClass::Elliptic: return "Elliptic";
    case CovectorClass::Glancing: return "Glancing";
    case CovectorClass::Hyperbolic: return "Hyperbolic";
  }
  return "?";
}

CornerCovectorClass classify_at_corner(const geometry::Corner&, const CornerCovector& c,
                                       double tol_class) {
  double h = 0.0;
  for (double e : c.eta_hat) h += e * e;
  double k = 0.0;
  for (double z : c.zeta_other) k += z * z;
  double kb = 0.0;
  bool transverse = false;
  for (double z : c.zeta_boundary) {
    kb += z * z;
    if (std::abs(z) > tol_class) transverse = true;
  }
  const double q = c.xi_hat * c.xi_hat + h + k + kb;
  CornerCovectorClass out;
  if (transverse || q > 1.0 + tol_class) {
    out.kind = CovectorClass::Elliptic;
    return out;
  }
  out.mu = std::sqrt(std::max(0.0, 1.0 - h));
  out.kind = q >= 1.0 - tol_class ? CovectorClass::Glancing : CovectorClass::Hyperbolic;
  return out;
}

CornerCovectorClass classify_at_corner(const geometry::Corner& corner, double tau, double xi,
                                       const std::vector<double>& eta,
                                       const std::vector<double>& zeta_boundary,
                                       const std::vector<double>& zeta_other, double tol_class) {
  const double s = 1.0 / std::abs(tau);
  CornerCovector c;
  c.xi_hat = xi * s;
  for (double e : eta) c.eta_hat.push_back(e * s);
  for (double z : zeta_boundary) c.zeta_boundary.push_back(z * s);
  for (double z : zeta_other) c.zeta_other.push_back(z * s);
  return classify_at_corner(corner, c, tol_class);
}

HyperbolicData corner_hyperbolic_data(const geometry::Domain& d, const PhasePoint& p, double tol) {
  if (p.tau == 0.0) throw OffCharacteristic("tau must be nonzero");
  HyperbolicData out;
  out.sgn_tau = p.tau > 0 ? 1 : -1;
  if (d.dimension() == 3) {
    const double eta = p.xi.z() / std::abs(p.tau);
    out.eta_hat = eta;
    out.mu = std::sqrt(std::max(0.0, 1.0 - eta * eta));
  }
  if (out.mu <= tol) throw GlancingCornerError("ray is tangent to the corner (mu = 0)");
  return out;
}

}  // namespace cwlab::hamiltonian
