#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cwlab/gbb_tracer.hpp"
#include "cwlab/geometry.hpp"
#include "cwlab/regularity.hpp"
#include "cwlab/sector_spectral.hpp"
#include "cwlab/tolerances.hpp"

namespace cwlab::scenario {

enum class Subcommand { Trace, Fan, Limit, SectorWave, Measure, Calibrate };

Subcommand parse_subcommand(const std::string& s);
const char* to_string(Subcommand c);

struct DomainSpec {
  geometry::DomainKind kind = geometry::DomainKind::Sector2D;
  double opening = 0.7 * 3.141592653589793;
  std::vector<geometry::Vec2> vertices;  // polygon only
};

geometry::Domain build_domain(const DomainSpec& spec);

struct TraceParams {
  geometry::Vec3 start = geometry::Vec3(2.0, 0.0, 0.0);
  double direction = 3.141592653589793;  // cross-sectional velocity angle
  double axial_dual = 0.0;               // wedge only
  double duration = 10.0;
  gbb::CornerPolicy policy;
  double box_radius = 1e3;
};

struct FanParams {
  int corner = 0;
  double z_in = 0.2 * 3.141592653589793;
  int size = 32;
  double axial_dual = 0.0;
  bool random = false;  // draw directions from the seeded generator instead of the midpoint grid
};

struct LimitParams {
  int corner = 0;
  double z_in = 0.2 * 3.141592653589793;
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
  double start_distance = 2.0;
};

struct WaveParams {
  spectral::BoundaryCondition bc = spectral::BoundaryCondition::Dirichlet;
  spectral::SourceKind source = spectral::SourceKind::PointLike;
  double r0 = 1.0;
  double theta_src = 0.2 * 3.141592653589793;
  double sigma = 0.05;
  int ring_modes = 8;
  int n_modes = 64;
  double lambda_max = 200.0;
  int q_nodes = 4096;
  int panel_nodes = 32;
  double t_star = 1.4;
  double r_min = 0.0;
  double r_max = 3.0;
  int n_r = 121;
  int n_theta = 57;
  bool probe = true;
};

struct MeasureParams {
  std::vector<double> diffracted_angles{0.45 * 3.141592653589793};
  bool incident = true;
  double half_length = 0.19;
  int samples = 512;
  double geo_margin = 0.05 * 3.141592653589793;
  double beta = regularity::kDefaultBeta;
};

struct Scenario {
  DomainSpec domain;
  TraceParams trace;
  FanParams fan;
  LimitParams limit;
  WaveParams wave;
  MeasureParams measure;
  regularity::CalibrationSetup calibrate;
  Tolerances tol;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
};

/// Flat "section.key" -> raw value map.
using KeyValues = std::map<std::string, std::string>;

/// INI text with [domain], [experiment], [tolerances] and [output] sections.
KeyValues parse_ini(const std::string& text);
KeyValues read_ini(const std::filesystem::path& path);
/// "section.key=value"; the key must already be a known key.
void apply_override(KeyValues& kv, const std::string& assignment);

/// Every key must be known; unknown keys are ConfigErrors.
Scenario from_key_values(const KeyValues& kv);
Scenario load(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Checks the parameters the subcommand will use against its preconditions.
void validate(const Scenario& s, Subcommand c);

/// Numbers may carry a pi factor: "0.7pi", "pi/2", "3pi/4", "-pi".
double parse_number(const std::string& s);
/// Comma- or space-separated numbers.
std::vector<double> parse_list(const std::string& s);

spectral::Source make_source(const Scenario& s);
spectral::SpectralParams spectral_params(const Scenario& s);

}  // namespace cwlab::scenario
