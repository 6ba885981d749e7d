#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwlab/gbb_tracer.hpp"
#include "cwlab/regularity.hpp"
#include "cwlab/sector_spectral.hpp"

namespace cwlab::io {

using json = nlohmann::json;

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Plain comma-separated text with a header line; no quoting. Throws IoError
/// on a row whose width differs from the header.
CsvTable read_csv(std::istream& in);
/// Throws IoError unless the header is exactly `expected`.
void expect_header(const CsvTable& t, const std::vector<std::string>& expected);

// raypath.csv: event_index, event_type, t, x, y(, z_axial), tau, xi1, xi2(, xi3), surface_id.
// One row per event at the point where it ends; reflections carry the
// outgoing covector. surface_id is -1 for events not on a hypersurface.
struct RaypathRow {
  int event_index = 0;
  std::string event_type;
  double t = 0.0, x = 0.0, y = 0.0;
  std::optional<double> z_axial;
  double tau = 0.0, xi1 = 0.0, xi2 = 0.0;
  std::optional<double> xi3;
  int surface_id = -1;
};

std::vector<std::string> raypath_header(bool axial);
std::vector<RaypathRow> raypath_rows(const gbb::RayPath& path, bool axial);
void write_raypath_csv(std::ostream& out, const std::vector<RaypathRow>& rows, bool axial);
std::vector<RaypathRow> read_raypath_csv(std::istream& in);
/// {"axial": bool, "events": [row objects keyed by the CSV column names]}.
json to_json(const std::vector<RaypathRow>& rows, bool axial);
std::vector<RaypathRow> raypath_from_json(const json& j);

// fan.csv: corner_id, z_out, xi_hat, zeta_hat, eta_hat, tau, tag. eta_hat is
// empty in 2D.
struct FanRow {
  int corner_id = 0;
  double z_out = 0.0, xi_hat = 0.0, zeta_hat = 0.0;
  std::optional<double> eta_hat;
  double tau = 0.0;
  std::string tag;
};

std::vector<FanRow> fan_rows(const gbb::DiffractionFan& fan);
void write_fan_csv(std::ostream& out, const std::vector<FanRow>& rows);
std::vector<FanRow> read_fan_csv(std::istream& in);
/// {"members": [row objects keyed by the CSV column names]}; eta_hat is null in 2D.
json to_json(const std::vector<FanRow>& rows);
std::vector<FanRow> fan_from_json(const json& j);

// nearmiss.csv: eps, swept, swept_error (= |swept - pi|), exit, reflections.
void write_nearmiss_csv(std::ostream& out, const std::vector<gbb::NearMissSample>& samples);
std::vector<gbb::NearMissSample> read_nearmiss_csv(std::istream& in);

// field.csv: r, theta, u in row-major order (r outer).
void write_field_csv(std::ostream& out, const spectral::FieldGrid& g);
spectral::FieldGrid read_field_csv(std::istream& in);

// Binary field: "CWLF", u32 version (1), u32 n_r, u32 n_theta, f64 t,
// f64 r[n_r], f64 theta[n_theta], f64 u[n_r * n_theta] row-major.
// Little-endian throughout.
inline constexpr std::uint32_t kFieldVersion = 1;
void write_field_binary(std::ostream& out, const spectral::FieldGrid& g);
spectral::FieldGrid read_field_binary(std::istream& in);

// regularity.csv: front, s_hat, residual, j_min, j_max.
struct RegularityRow {
  std::string front;
  double s_hat = 0.0, residual = 0.0;
  int j_min = 0, j_max = 0;
};

void write_regularity_csv(std::ostream& out, const std::vector<regularity::RegularityReport>& reports);
std::vector<RegularityRow> read_regularity_csv(std::istream& in);

json to_json(const regularity::RegularityReport& r);
regularity::RegularityReport report_from_json(const json& j);

// calibration.csv: profile, expected, s_hat, residual, j_min, j_max, bands_used, above_range.
void write_calibration_csv(std::ostream& out, const std::vector<regularity::CalibrationRow>& rows);
std::vector<regularity::CalibrationRow> read_calibration_csv(std::istream& in);

/// Writes through a temporary stream; IoError if the file cannot be written.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body,
                bool binary = false);
std::string read_text(const std::filesystem::path& path);

}  // namespace cwlab::io
