#include "cwlab/regularity.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "cwlab/errors.hpp"
#include "cwlab/gbb_tracer.hpp"

namespace cwlab::regularity {

namespace {
std::mutex fftw_planner;
constexpr double kPi = std::numbers::pi;
}  // namespace

std::string FrontId::label() const {
  std::ostringstream os;
  switch (kind) {
    case FrontKind::Incident: os << "incident"; break;
    case FrontKind::Reflected: os << "reflected"; break;
    case FrontKind::Diffracted: os << "diffracted"; break;
  }
  os.precision(6);
  os << "@" << theta / kPi << "pi";
  return os.str();
}

double window(double s, double half_length, double beta) {
  const double x = 2.0 * s / half_length;
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-beta * x * x / (1.0 - x * x));
}

std::vector<double> window_samples(const Transect& t, double beta) {
  std::vector<double> w(t.samples);
  for (int k = 0; k < t.samples; ++k) w[k] = window(t.offset(k), t.half_length, beta);
  return w;
}

BandEnergies band_energies(const std::vector<double>& samples, const std::vector<double>& win,
                           double spacing) {
  const int S = static_cast<int>(samples.size());
  if (S < 2 || win.size() != samples.size()) throw std::invalid_argument("sample/window size mismatch");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  std::vector<double> in(S);
  for (int k = 0; k < S; ++k) in[k] = samples[k] * win[k];
  std::vector<std::complex<double>> out(S / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner);
    plan = fftw_plan_dft_r2c_1d(S, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner);
    fftw_destroy_plan(plan);
  }
  BandEnergies e;
  e.spacing = spacing;
  const double dw = 2.0 * kPi / (S * spacing);
  for (int k = 0; k <= S / 2; ++k) {
    const double mult = (k == 0 || 2 * k == S) ? 1.0 : 2.0;
    const double p = mult * std::norm(out[k]) * spacing * spacing * dw;
    e.total += p;
    if (k == 0) continue;
    const int j = static_cast<int>(std::floor(std::log2(k * dw)));
    if (j < 0) continue;
    if (static_cast<int>(e.energy.size()) <= j) e.energy.resize(j + 1, 0.0);
    e.energy[j] += p;
  }
  return e;
}

Fit fit_exponent(const BandEnergies& e, int j_min, int j_max) {
  Fit f;
  f.j_min = j_min;
  f.j_max = j_max;
  std::vector<double> js, ys;
  for (int j = std::max(0, j_min); j <= j_max && j < static_cast<int>(e.energy.size()); ++j) {
    if (e.energy[j] > 0.0 && e.energy[j] >= kNoiseFloor * e.total) {
      js.push_back(j);
      ys.push_back(std::log2(e.energy[j]));
    }
  }
  f.bands_used = static_cast<int>(js.size());
  if (f.bands_used < 4)
    throw InsufficientBands("only " + std::to_string(f.bands_used) + " bands above the noise floor in [" +
                            std::to_string(j_min) + ", " + std::to_string(j_max) + "]");
  double mj = 0.0, my = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    mj += js[i];
    my += ys[i];
  }
  mj /= js.size();
  my /= js.size();
  double sjj = 0.0, sjy = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    sjj += (js[i] - mj) * (js[i] - mj);
    sjy += (js[i] - mj) * (ys[i] - my);
  }
  const double slope = sjy / sjj;
  double rss = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const double d = ys[i] - (my + slope * (js[i] - mj));
    rss += d * d;
  }
  f.s_hat = -0.5 * slope;
  f.residual = std::sqrt(rss / js.size());
  f.above_range = f.s_hat > 4.0;
  return f;
}

BandRange band_range(double half_length, double lambda_max) {
  if (!(half_length > 0.0) || !(lambda_max > 0.0)) throw std::invalid_argument("band range needs positive inputs");
  const int j_min = static_cast<int>(std::ceil(std::log2(16.0 / half_length) - 1e-12));
  const int j_max = static_cast<int>(std::floor(std::log2(lambda_max / 4.0) + 1e-12));
  return {j_min, j_max};
}

RegularityReport measure(const Transect& t, const std::vector<double>& samples, BandRange bands,
                         double beta) {
  if (static_cast<int>(samples.size()) != t.samples) throw std::invalid_argument("sample count mismatch");
  RegularityReport r;
  r.front = t.front;
  r.bands = band_energies(samples, window_samples(t, beta), t.spacing());
  r.fit = fit_exponent(r.bands, bands.j_min, bands.j_max);
  return r;
}

const char* to_string(Profile p) {
  switch (p) {
    case Profile::Step: return "step";
    case Profile::Kink: return "kink";
    case Profile::Gaussian: return "gaussian";
  }
  return "?";
}

std::vector<double> synthetic_profile(Profile p, const Transect& t, double gaussian_width) {
  std::vector<double> u(t.samples);
  for (int k = 0; k < t.samples; ++k) {
    const double s = t.offset(k);
    switch (p) {
      case Profile::Step: u[k] = s > 0.0 ? 1.0 : (s == 0.0 ? 0.5 : 0.0); break;
      case Profile::Kink: u[k] = s > 0.0 ? s : 0.0; break;
      case Profile::Gaussian: u[k] = std::exp(-s * s / (2.0 * gaussian_width * gaussian_width)); break;
    }
  }
  return u;
}

std::vector<CalibrationRow> calibrate(const CalibrationSetup& setup) {
  if (setup.samples < 512 || (setup.samples & (setup.samples - 1)) != 0)
    throw ConfigError("calibration samples must be a power of two >= 512");
  if (!(setup.half_length > 0.0) || !(setup.gaussian_width > 0.0) || !(setup.beta > 0.0))
    throw ConfigError("calibration lengths and beta must be positive");
  Transect t;
  t.half_length = setup.half_length;
  t.samples = setup.samples;
  const BandRange bands = band_range(t.half_length, kPi / t.spacing());
  std::vector<CalibrationRow> rows;
  for (auto [p, expected] : {std::pair{Profile::Step, 0.5}, {Profile::Kink, 1.5}, {Profile::Gaussian, 4.0}}) {
    CalibrationRow row;
    row.profile = p;
    row.expected = expected;
    row.fit = measure(t, synthetic_profile(p, t, setup.gaussian_width), bands, setup.beta).fit;
    rows.push_back(row);
  }
  return rows;
}


std::vector<Transect> front_transects(const FrontRequest& req, double t) {
  if (req.samples < 512 || (req.samples & (req.samples - 1)) != 0)
    throw ConfigError("transect samples must be a power of two >= 512");
  if (!(req.half_length > 0.0)) throw ConfigError("transect half length must be positive");
  const auto sector = geometry::make_sector(req.opening);
  const auto exits = gbb::geometric_exits(sector.corner(0).link, req.theta_src, 1e-9);
  std::vector<Transect> out;
  auto radial = [&](double r, double theta, FrontId id) {
    if (r - req.half_length <= 0.0)
      throw GeometryError("transect for " + id.label() + " reaches the vertex");
    if (theta <= 0.0 || theta >= req.opening)
      throw GeometryError("transect angle for " + id.label() + " lies outside the sector");
    Transect tr;
    tr.direction = Vec2(std::cos(theta), std::sin(theta));
    tr.anchor = r * tr.direction;
    tr.half_length = req.half_length;
    tr.samples = req.samples;
    tr.front = id;
    return tr;
  };
  if (req.incident) out.push_back(radial(req.r0 + t, req.theta_src, {FrontKind::Incident, req.theta_src}));
  for (double th : req.diffracted_angles) {
    const FrontId id{FrontKind::Diffracted, th};
    if (t <= req.r0) throw GeometryError("diffracted front not yet emitted at t = " + std::to_string(t));
    for (const auto& e : exits)
      if (std::abs(e.z - th) < req.geo_margin)
        throw GeometryError("diffracted anchor " + id.label() + " is within the margin of a geometric exit");
    out.push_back(radial(t - req.r0, th, id));
  }
  return out;
}

double exponent_difference(const RegularityReport& a, const RegularityReport& b) {
  return a.fit.s_hat - b.fit.s_hat;
}

}  // namespace cwlab::regularity
