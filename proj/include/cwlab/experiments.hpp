#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cwlab/gbb_tracer.hpp"
#include "cwlab/regularity.hpp"
#include "cwlab/scenario.hpp"
#include "cwlab/sector_spectral.hpp"

namespace cwlab::experiments {

using scenario::Scenario;
using scenario::Subcommand;

/// Characteristic start of a trace: unit speed along `direction`, axial dual
/// carried in xi.z() for a wedge.
gbb::PhasePoint initial_ray(const Scenario& s);
/// Ray sitting at the corner, arriving from link direction z_in.
gbb::PhasePoint arriving_ray(const geometry::Domain& d, int corner, double z_in, double axial_dual);

gbb::RayPath run_trace(const Scenario& s);
/// Midpoint grid, or `size` draws from the seeded generator when random.
std::vector<double> fan_directions(const Scenario& s, double opening);
gbb::DiffractionFan run_fan(const Scenario& s);
std::vector<gbb::NearMissSample> run_limit(const Scenario& s);
spectral::FieldGrid run_sector_wave(const Scenario& s);

/// Samples u(t) on each transect, evaluating only inside the window support,
/// and fits the exponent over `bands`. Points outside [0, opening] read zero.
std::vector<regularity::RegularityReport> measure_fronts(const spectral::SpectralModel& m,
                                                         const std::vector<regularity::Transect>& transects,
                                                         double t, regularity::BandRange bands, double beta,
                                                         double order_cap_radius);
regularity::FrontRequest front_request(const Scenario& s);
std::vector<regularity::RegularityReport> run_measure(const Scenario& s);

/// Fixed-width summary tables printed by the CLI.
std::string measure_table(const std::vector<regularity::RegularityReport>& reports);
std::string calibration_table(const std::vector<regularity::CalibrationRow>& rows);

struct Outcome {
  std::vector<std::filesystem::path> files;
  std::string summary;  // for stdout
};

/// Validates, runs the subcommand and writes its artifacts into s.out_dir.
Outcome run(const Scenario& s, Subcommand c);

}  // namespace cwlab::experiments
