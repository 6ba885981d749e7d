#pragma once

#include <string>
#include <vector>

#include "cwlab/geometry.hpp"

namespace cwlab::regularity {

using geometry::Vec2;

enum class FrontKind { Incident, Reflected, Diffracted };

struct FrontId {
  FrontKind kind = FrontKind::Incident;
  double theta = 0.0;  // anchor angle
  std::string label() const;
};

/// Straight sampling line through a front: s_k = -L + 2 L k / S, k < S.
struct Transect {
  Vec2 anchor = Vec2::Zero();     // Cartesian
  Vec2 direction = Vec2::UnitX();  // unit, normal to the front
  double half_length = 0.0;
  int samples = 512;
  FrontId front;

  double spacing() const { return 2.0 * half_length / samples; }
  double offset(int k) const { return -half_length + spacing() * k; }
  Vec2 point(int k) const { return anchor + offset(k) * direction; }
};

inline constexpr double kDefaultBeta = 4.0;

/// Smooth bump supported on |s| < L/2: exp(-beta x^2 / (1 - x^2)), x = 2s/L.
double window(double s, double half_length, double beta = kDefaultBeta);
std::vector<double> window_samples(const Transect& t, double beta = kDefaultBeta);

struct BandEnergies {
  std::vector<double> energy;  // energy[j] for the band [2^j, 2^{j+1})
  double total = 0.0;          // over all frequencies
  double spacing = 0.0;
};

/// Windowed samples are transformed with the continuous-transform scaling
/// U(w) = h sum_k u_k e^{-i w s_k}; E_j sums |U|^2 dw over both signs of w.
BandEnergies band_energies(const std::vector<double>& samples, const std::vector<double>& window,
                           double spacing);

struct Fit {
  double s_hat = 0.0;
  double residual = 0.0;
  int j_min = 0;
  int j_max = 0;
  int bands_used = 0;
  bool above_range = false;  // s_hat > 4: smooth at this resolution
};

inline constexpr double kNoiseFloor = 1e-24;

/// Least-squares slope of log2 E_j over [j_min, j_max]; s_hat = -slope / 2.
/// Bands below kNoiseFloor * total are dropped; fewer than 4 left throws
/// InsufficientBands.
Fit fit_exponent(const BandEnergies& e, int j_min, int j_max);

struct BandRange {
  int j_min;
  int j_max;
};

/// Smallest j with 2^j >= 16/L and largest with 2^j <= lambda_max / 4.
BandRange band_range(double half_length, double lambda_max);

struct RegularityReport {
  FrontId front;
  Fit fit;
  BandEnergies bands;
};

/// Windowed band energies of transect samples and the exponent fit over `bands`.
RegularityReport measure(const Transect& t, const std::vector<double>& samples, BandRange bands,
                         double beta = kDefaultBeta);

enum class Profile { Step, Kink, Gaussian };
const char* to_string(Profile p);

/// Synthetic profile centred on the transect anchor: H(s), s H(s), or
/// exp(-s^2 / (2 w^2)).
std::vector<double> synthetic_profile(Profile p, const Transect& t, double gaussian_width);

struct CalibrationSetup {
  double half_length = 0.9;
  int samples = 4096;
  double beta = kDefaultBeta;
  double gaussian_width = 0.025;
};

struct CalibrationRow {
  Profile profile = Profile::Step;
  double expected = 0.0;  // lower bound for the Gaussian
  Fit fit;
};

/// Step, kink and Gaussian fits. The upper band edge plays the role of the
/// mollifier scale with the sampling Nyquist frequency in its place.
std::vector<CalibrationRow> calibrate(const CalibrationSetup& setup);

struct FrontRequest {
  double opening = 0.0;
  double r0 = 1.0;
  double theta_src = 0.0;
  std::vector<double> diffracted_angles;
  bool incident = true;
  double half_length = 0.19;
  int samples = 512;
  double geo_margin = 0.05 * 3.141592653589793;
};

/// Transects normal to the requested fronts at time t: the diffracted circle
/// r = t - r0 at each requested angle, and the outgoing incident front
/// r = r0 + t along the source direction.
std::vector<Transect> front_transects(const FrontRequest& req, double t);

/// s_hat difference invariant under positive rescaling; convenience for reports.
double exponent_difference(const RegularityReport& a, const RegularityReport& b);

}  // namespace cwlab::regularity
