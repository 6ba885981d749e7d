#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cwlab/bessel.hpp"

namespace cwlab::spectral {

enum class BoundaryCondition { Dirichlet, Neumann };

const char* to_string(BoundaryCondition bc);

struct ModeSpec {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double opening = 0.0;
  int n = 1;
  double nu = 0.0;

  /// L2-normalized angular eigenfunction on [0, opening].
  double angular(double theta) const;
  double angular_derivative(double theta) const;
};

/// Orders n*pi/opening for n = 1..N (Dirichlet) or n = 0..N (Neumann).
std::vector<ModeSpec> mode_frequencies(BoundaryCondition bc, double opening, int n_modes);

enum class SourceKind { PointLike, Ring };

/// Initial velocity; u(0) = 0. Radial profile exp(-((r - r0)/sigma)^2).
/// PointLike adds the angular factor exp(-((theta - theta_src) r0 / sigma)^2).
/// A Ring carries its angular profile as coefficients in the eigenbasis,
/// ring_coeffs[i] belonging to the i-th mode of mode_frequencies.
struct Source {
  SourceKind kind = SourceKind::PointLike;
  double r0 = 1.0;
  double theta_src = 0.0;
  double sigma = 0.05;
  std::vector<double> ring_coeffs;
};

Source point_source(double r0, double theta_src, double sigma);

/// Band-limited ring profile concentrated near theta_c using the first
/// `n_coeffs` modes, scaled so that max |phi| = 1.
Source ring_source(BoundaryCondition bc, double opening, double r0, double theta_c, double sigma,
                   int n_coeffs = 8);

double source_angular_profile(const Source& src, BoundaryCondition bc, double opening, double theta);
double source_radial_profile(const Source& src, double r);

/// Projection of the source's angular profile onto each mode.
std::vector<double> angular_coefficients(const Source& src, const std::vector<ModeSpec>& modes);

/// \hat f_n(lambda) = int f_n(r) J_nu(lambda r) r dr, adaptive to 1e-8 relative.
std::vector<double> hankel_coeff(const Source& src, const ModeSpec& mode,
                                 const std::vector<double>& lambda_nodes);

struct SpectralParams {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double opening = 0.0;
  int n_modes = 64;
  double lambda_max = 200.0;  // mollifier scale and upper integration limit
  int q_nodes = 4096;
  int panel_nodes = 32;
};

/// Spectral content of a field: quadrature nodes lambda_q with weights w_q
/// and coefficients c[q][n] = m(lambda_q) \hat f_n(lambda_q), so that
/// u(t, r, theta) = sum_q w_q sin(lambda_q t) sum_n c[q][n] Theta_n(theta) J_n(lambda_q r).
class SpectralModel {
 public:
  SpectralModel(std::vector<ModeSpec> modes, std::vector<double> lambda, std::vector<double> node_weights,
                std::vector<double> coeffs);

  const std::vector<ModeSpec>& modes() const { return modes_; }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& node_weights() const { return node_weights_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t n_modes() const { return modes_.size(); }
  std::size_t n_nodes() const { return lambda_.size(); }

  /// Half the squared spectral norm; the exact energy of the synthesized field.
  double spectral_energy() const;

  // Radial extent of the initial data and the finest feature width, used to
  // lay out grid quadrature.
  double support_lo = 0.0;
  double support_hi = 0.0;
  double feature_width = 0.0;

 private:
  std::vector<ModeSpec> modes_;
  std::vector<double> lambda_;
  std::vector<double> node_weights_;
  std::vector<double> coeffs_;
};

SpectralModel build_model(const Source& src, const SpectralParams& p);

enum Quantity : unsigned { kValue = 1u, kTimeDerivative = 2u, kRadialDerivative = 4u };

/// Per-mode radial functions at radii r and times t:
/// out[((ti * n_r) + ri) * n_modes + n].
struct RadialModes {
  std::vector<double> value, time_derivative, radial_derivative;
  std::size_t n_times = 0, n_r = 0, n_modes = 0;

  double at(const std::vector<double>& v, std::size_t ti, std::size_t ri, std::size_t n) const {
    return v[(ti * n_r + ri) * n_modes + n];
  }
};

/// `order_cap_radius` > 0 zeroes orders negligible at lambda * min(r, cap radius).
RadialModes radial_modes(const SpectralModel& m, const std::vector<double>& r,
                         const std::vector<double>& times, unsigned quantities,
                         double order_cap_radius = 0.0);

/// u at arbitrary polar points (r_i, theta_i) and one time.
std::vector<double> evaluate_points(const SpectralModel& m, const std::vector<double>& r,
                                    const std::vector<double>& theta, double t,
                                    double order_cap_radius = 0.0);

struct FieldGrid {
  double t = 0.0;
  std::vector<double> r, theta;
  std::vector<double> u;  // row-major, r outer
  int n_modes = 0;
  double lambda_max = 0.0;
  int q_nodes = 0;
  double probe_change = -1.0;  // relative change under doubled N and Q; < 0 if not probed
  bool truncation_warning = false;

  double at(std::size_t i, std::size_t j) const { return u[i * theta.size() + j]; }
};

FieldGrid propagate(const Source& src, double t, const std::vector<double>& r,
                    const std::vector<double>& theta, const SpectralParams& p, bool probe);

FieldGrid propagate(const SpectralModel& m, const SpectralParams& p, double t,
                    const std::vector<double>& r, const std::vector<double>& theta);

/// Relative change of u on a 16-point subgrid when N and Q are doubled.
double convergence_probe(const Source& src, double t, const FieldGrid& g, const SpectralParams& p);

struct EnergySample {
  double t;
  double grid_energy;
  double spectral_energy;
};

/// Energy from synthesized fields on a polar quadrature grid.
std::vector<EnergySample> energy(const Source& src, const std::vector<double>& times,
                                 const SpectralParams& p);
std::vector<EnergySample> energy(const SpectralModel& m, const std::vector<double>& times);

}  // namespace cwlab::spectral
