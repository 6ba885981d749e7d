#include "cwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "cwlab/errors.hpp"
#include "cwlab/serialize.hpp"

namespace cwlab::experiments {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::string line(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

gbb::PhasePoint initial_ray(const Scenario& s) {
  const auto& t = s.trace;
  const double eta = t.axial_dual;
  const double c = std::sqrt(std::max(0.0, 1.0 - eta * eta));
  gbb::PhasePoint p;
  p.base = t.start;
  p.tau = 1.0;
  p.xi = gbb::Vec3(c * std::cos(t.direction), c * std::sin(t.direction), eta);
  if (s.domain.kind != geometry::DomainKind::Wedge3D) {
    p.base.z() = 0.0;
    p.xi = gbb::Vec3(std::cos(t.direction), std::sin(t.direction), 0.0);
  }
  return p;
}

gbb::PhasePoint arriving_ray(const geometry::Domain& d, int corner, double z_in, double axial_dual) {
  const auto& c = d.corner(corner);
  const bool wedge = d.dimension() == 3;
  const double eta = wedge ? axial_dual : 0.0;
  const double mu = std::sqrt(std::max(0.0, 1.0 - eta * eta));
  const gbb::Vec2 v = -c.direction(z_in);
  gbb::PhasePoint p;
  p.base = gbb::Vec3(c.point.x(), c.point.y(), 0.0);
  p.tau = 1.0;
  p.xi = gbb::Vec3(mu * v.x(), mu * v.y(), eta);
  return p;
}

gbb::RayPath run_trace(const Scenario& s) {
  const auto d = scenario::build_domain(s.domain);
  gbb::TraceOptions opt;
  opt.tol = s.tol;
  opt.box_radius = s.trace.box_radius;
  return gbb::trace(d, initial_ray(s), s.trace.duration, s.trace.policy, opt);
}

std::vector<double> fan_directions(const Scenario& s, double opening) {
  std::vector<double> z;
  const int n = s.fan.size;
  if (!s.fan.random) {
    for (int k = 0; k < n; ++k) z.push_back((k + 0.5) * opening / n);
    return z;
  }
  std::mt19937_64 gen(s.seed);
  for (int k = 0; k < n; ++k) z.push_back(static_cast<double>(gen() >> 11) * 0x1.0p-53 * opening);
  std::sort(z.begin(), z.end());
  return z;
}

gbb::DiffractionFan run_fan(const Scenario& s) {
  const auto d = scenario::build_domain(s.domain);
  const auto in = arriving_ray(d, s.fan.corner, s.fan.z_in, s.fan.axial_dual);
  return gbb::diffracted_fan(d, s.fan.corner, in, fan_directions(s, d.corner(s.fan.corner).opening()), s.tol);
}

std::vector<gbb::NearMissSample> run_limit(const Scenario& s) {
  const auto d = scenario::build_domain(s.domain);
  gbb::TraceOptions opt;
  opt.tol = s.tol;
  return gbb::near_miss_family(d, {s.limit.corner, s.limit.z_in, s.limit.start_distance}, s.limit.eps_list, opt);
}

spectral::FieldGrid run_sector_wave(const Scenario& s) {
  const auto& w = s.wave;
  return spectral::propagate(scenario::make_source(s), w.t_star, linspace(w.r_min, w.r_max, w.n_r),
                             linspace(0.0, s.domain.opening, w.n_theta), scenario::spectral_params(s), w.probe);
}

std::vector<regularity::RegularityReport> measure_fronts(const spectral::SpectralModel& m,
                                                         const std::vector<regularity::Transect>& transects,
                                                         double t, regularity::BandRange bands, double beta,
                                                         double order_cap_radius) {
  const double opening = m.modes().empty() ? 0.0 : m.modes().front().opening;
  std::vector<regularity::RegularityReport> out;
  for (const auto& tr : transects) {
    const auto w = regularity::window_samples(tr, beta);
    std::vector<double> r, th;
    std::vector<int> idx;
    for (int k = 0; k < tr.samples; ++k) {
      if (w[k] <= 0.0) continue;
      const auto q = tr.point(k);
      const double a = std::atan2(q.y(), q.x());
      if (a < 0.0 || a > opening) continue;
      r.push_back(q.norm());
      th.push_back(a);
      idx.push_back(k);
    }
    const auto u = spectral::evaluate_points(m, r, th, t, order_cap_radius);
    std::vector<double> samples(tr.samples, 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) samples[idx[k]] = u[k];
    out.push_back(regularity::measure(tr, samples, bands, beta));
  }
  return out;
}

regularity::FrontRequest front_request(const Scenario& s) {
  regularity::FrontRequest req;
  req.opening = s.domain.opening;
  req.r0 = s.wave.r0;
  req.theta_src = s.wave.theta_src;
  req.diffracted_angles = s.measure.diffracted_angles;
  req.incident = s.measure.incident;
  req.half_length = s.measure.half_length;
  req.samples = s.measure.samples;
  req.geo_margin = s.measure.geo_margin;
  return req;
}

std::vector<regularity::RegularityReport> run_measure(const Scenario& s) {
  const auto model = spectral::build_model(scenario::make_source(s), scenario::spectral_params(s));
  const auto transects = regularity::front_transects(front_request(s), s.wave.t_star);
  const auto bands = regularity::band_range(s.measure.half_length, s.wave.lambda_max);
  // Source coefficients vanish for orders negligible at lambda times the
  // outer edge of the source support.
  const double cap = s.wave.r0 + 4.0 * s.wave.sigma;
  return measure_fronts(model, transects, s.wave.t_star, bands, s.measure.beta, cap);
}

std::string measure_table(const std::vector<regularity::RegularityReport>& reports) {
  const regularity::RegularityReport* incident = nullptr;
  for (const auto& r : reports)
    if (r.front.kind == regularity::FrontKind::Incident) incident = &r;
  std::string s = line("%-22s %8s %9s %6s %10s\n", "front", "s_hat", "residual", "bands", "vs_inc");
  for (const auto& r : reports) {
    const std::string diff =
        incident && &r != incident ? line("%+10.3f", regularity::exponent_difference(r, *incident)) : "         -";
    s += line("%-22s %8.3f %9.3f %3d-%-2d %s\n", r.front.label().c_str(), r.fit.s_hat, r.fit.residual, r.fit.j_min,
              r.fit.j_max, diff.c_str());
  }
  return s;
}

std::string calibration_table(const std::vector<regularity::CalibrationRow>& rows) {
  std::string s = line("%-9s %9s %8s %9s %6s\n", "profile", "expected", "s_hat", "residual", "bands");
  for (const auto& r : rows) {
    const std::string expect =
        r.profile == regularity::Profile::Gaussian ? line(">%.2f", r.expected) : line("%.2f", r.expected);
    s += line("%-9s %9s %8.3f %9.3f %3d-%-2d\n", regularity::to_string(r.profile), expect.c_str(), r.fit.s_hat,
              r.fit.residual, r.fit.j_min, r.fit.j_max);
  }
  return s;
}

Outcome run(const Scenario& s, Subcommand c) {
  scenario::validate(s, c);
  Outcome out;
  auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body, bool binary = false) {
    const auto path = s.out_dir / name;
    io::write_file(path, body, binary);
    out.files.push_back(path);
  };
  switch (c) {
    case Subcommand::Trace: {
      const auto path = run_trace(s);
      const bool axial = s.domain.kind == geometry::DomainKind::Wedge3D;
      const auto rows = io::raypath_rows(path, axial);
      emit("raypath.csv", [&](std::ostream& o) { io::write_raypath_csv(o, rows, axial); });
      emit("raypath.json", [&](std::ostream& o) { o << io::to_json(rows, axial).dump(2) << '\n'; });
      if (path.fan) {
        const auto fr = io::fan_rows(*path.fan);
        emit("fan.csv", [&](std::ostream& o) { io::write_fan_csv(o, fr); });
      }
      out.summary = line("%zu events, last: %s\n", rows.size(), rows.empty() ? "-" : rows.back().event_type.c_str());
      break;
    }
    case Subcommand::Fan: {
      const auto rows = io::fan_rows(run_fan(s));
      emit("fan.csv", [&](std::ostream& o) { io::write_fan_csv(o, rows); });
      emit("fan.json", [&](std::ostream& o) { o << io::to_json(rows).dump(2) << '\n'; });
      int geometric = 0;
      for (const auto& r : rows) geometric += r.tag == "Geometric";
      out.summary = line("%zu fan members, %d geometric\n", rows.size(), geometric);
      break;
    }
    case Subcommand::Limit: {
      const auto samples = run_limit(s);
      emit("nearmiss.csv", [&](std::ostream& o) { io::write_nearmiss_csv(o, samples); });
      out.summary = line("%-10s %12s %12s %4s\n", "eps", "|swept-pi|", "exit", "refl");
      for (const auto& m : samples)
        out.summary +=
            line("%-10.3g %12.3e %12.6f %4d\n", m.eps, std::abs(m.swept - std::numbers::pi), m.exit_direction,
                 m.reflections);
      break;
    }
    case Subcommand::SectorWave: {
      const auto g = run_sector_wave(s);
      emit("field.cwlf", [&](std::ostream& o) { io::write_field_binary(o, g); }, true);
      emit("field.csv", [&](std::ostream& o) { io::write_field_csv(o, g); });
      double peak = 0.0;
      for (double v : g.u) peak = std::max(peak, std::abs(v));
      out.summary = line("t=%g grid %zux%zu peak |u|=%.6e", g.t, g.r.size(), g.theta.size(), peak);
      if (g.probe_change >= 0.0) out.summary += line(" probe change %.3e", g.probe_change);
      out.summary += "\n";
      if (g.truncation_warning) out.summary += "warning: truncation may be under-resolved (probe change > 1e-3)\n";
      break;
    }
    case Subcommand::Measure: {
      const auto reports = run_measure(s);
      io::json j{{"t_star", s.wave.t_star},
                 {"lambda_max", s.wave.lambda_max},
                 {"source", s.wave.source == spectral::SourceKind::Ring ? "ring" : "point"},
                 {"fronts", io::json::array()}};
      for (const auto& r : reports) j["fronts"].push_back(io::to_json(r));
      emit("regularity.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      emit("regularity.csv", [&](std::ostream& o) { io::write_regularity_csv(o, reports); });
      out.summary = measure_table(reports);
      break;
    }
    case Subcommand::Calibrate: {
      const auto rows = regularity::calibrate(s.calibrate);
      emit("calibration.csv", [&](std::ostream& o) { io::write_calibration_csv(o, rows); });
      out.summary = calibration_table(rows);
      break;
    }
  }
  return out;
}

}  // namespace cwlab::experiments
