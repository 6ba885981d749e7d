#include "cwlab/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <regex>
#include <sstream>

#include "cwlab/errors.hpp"

namespace cwlab::scenario {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double plain_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

long long integer(const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

int small_int(const std::string& s) {
  const long long v = integer(s);
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError("integer out of range: '" + s + "'");
  return static_cast<int>(v);
}

bool boolean(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<std::string> tokens(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

geometry::Vec3 point(const std::string& s, const std::string& key) {
  const auto v = parse_list(s);
  if (v.size() != 2 && v.size() != 3) throw ConfigError(key + " needs 2 or 3 coordinates");
  return geometry::Vec3(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
}

using Setter = std::function<void(Scenario&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain.kind",
       [](Scenario& s, const std::string& v) {
         const auto k = trim(v);
         if (k == "sector") s.domain.kind = geometry::DomainKind::Sector2D;
         else if (k == "polygon") s.domain.kind = geometry::DomainKind::Polygon2D;
         else if (k == "wedge3d") s.domain.kind = geometry::DomainKind::Wedge3D;
         else if (k == "plane") s.domain.kind = geometry::DomainKind::Plane2D;
         else throw ConfigError("unknown domain kind '" + k + "'");
       }},
      {"domain.opening", [](Scenario& s, const std::string& v) { s.domain.opening = parse_number(v); }},
      {"domain.vertices",
       [](Scenario& s, const std::string& v) {
         s.domain.vertices.clear();
         for (const auto& p : tokens(v, ';')) {
           const auto xy = parse_list(p);
           if (xy.size() != 2) throw ConfigError("polygon vertices are 'x y' pairs separated by ';'");
           s.domain.vertices.emplace_back(xy[0], xy[1]);
         }
       }},

      {"experiment.seed",
       [](Scenario& s, const std::string& v) {
         try {
           std::size_t used = 0;
           const auto t = trim(v);
           s.seed = std::stoull(t, &used);
           if (used != t.size() || t.front() == '-') throw ConfigError("");
         } catch (const std::exception&) {
           throw ConfigError("seed must be an unsigned 64-bit integer");
         }
       }},
      {"experiment.ray_start", [](Scenario& s, const std::string& v) { s.trace.start = point(v, "ray_start"); }},
      {"experiment.ray_direction", [](Scenario& s, const std::string& v) { s.trace.direction = parse_number(v); }},
      {"experiment.axial_dual",
       [](Scenario& s, const std::string& v) { s.trace.axial_dual = s.fan.axial_dual = parse_number(v); }},
      {"experiment.duration", [](Scenario& s, const std::string& v) { s.trace.duration = parse_number(v); }},
      {"experiment.corner_policy",
       [](Scenario& s, const std::string& v) {
         const auto k = trim(v);
         const int n = s.trace.policy.fan_size;
         if (k == "stop") s.trace.policy = gbb::CornerPolicy::stop();
         else if (k == "follow_positive") s.trace.policy = gbb::CornerPolicy::follow(gbb::Side::Positive);
         else if (k == "follow_negative") s.trace.policy = gbb::CornerPolicy::follow(gbb::Side::Negative);
         else if (k == "fan") s.trace.policy = gbb::CornerPolicy::emit_fan(n > 0 ? n : s.fan.size);
         else throw ConfigError("unknown corner policy '" + k + "'");
       }},
      {"experiment.box_radius", [](Scenario& s, const std::string& v) { s.trace.box_radius = parse_number(v); }},
      {"experiment.corner",
       [](Scenario& s, const std::string& v) { s.fan.corner = s.limit.corner = small_int(v); }},
      {"experiment.z_in", [](Scenario& s, const std::string& v) { s.fan.z_in = s.limit.z_in = parse_number(v); }},
      {"experiment.fan_size",
       [](Scenario& s, const std::string& v) {
         s.fan.size = small_int(v);
         if (s.trace.policy.kind == gbb::CornerPolicy::Kind::EmitFan) s.trace.policy.fan_size = s.fan.size;
       }},
      {"experiment.fan_sampling",
       [](Scenario& s, const std::string& v) {
         const auto k = trim(v);
         if (k == "uniform") s.fan.random = false;
         else if (k == "random") s.fan.random = true;
         else throw ConfigError("fan_sampling is 'uniform' or 'random'");
       }},
      {"experiment.eps_list", [](Scenario& s, const std::string& v) { s.limit.eps_list = parse_list(v); }},
      {"experiment.start_distance",
       [](Scenario& s, const std::string& v) { s.limit.start_distance = parse_number(v); }},

      {"experiment.bc",
       [](Scenario& s, const std::string& v) {
         const auto k = trim(v);
         if (k == "dirichlet") s.wave.bc = spectral::BoundaryCondition::Dirichlet;
         else if (k == "neumann") s.wave.bc = spectral::BoundaryCondition::Neumann;
         else throw ConfigError("bc is 'dirichlet' or 'neumann'");
       }},
      {"experiment.source",
       [](Scenario& s, const std::string& v) {
         const auto k = trim(v);
         if (k == "point") s.wave.source = spectral::SourceKind::PointLike;
         else if (k == "ring") s.wave.source = spectral::SourceKind::Ring;
         else throw ConfigError("source is 'point' or 'ring'");
       }},
      {"experiment.r0", [](Scenario& s, const std::string& v) { s.wave.r0 = parse_number(v); }},
      {"experiment.theta_src", [](Scenario& s, const std::string& v) { s.wave.theta_src = parse_number(v); }},
      {"experiment.sigma", [](Scenario& s, const std::string& v) { s.wave.sigma = parse_number(v); }},
      {"experiment.ring_modes", [](Scenario& s, const std::string& v) { s.wave.ring_modes = small_int(v); }},
      {"experiment.n_modes", [](Scenario& s, const std::string& v) { s.wave.n_modes = small_int(v); }},
      {"experiment.lambda_max", [](Scenario& s, const std::string& v) { s.wave.lambda_max = parse_number(v); }},
      {"experiment.q_nodes", [](Scenario& s, const std::string& v) { s.wave.q_nodes = small_int(v); }},
      {"experiment.panel_nodes", [](Scenario& s, const std::string& v) { s.wave.panel_nodes = small_int(v); }},
      {"experiment.t_star", [](Scenario& s, const std::string& v) { s.wave.t_star = parse_number(v); }},
      {"experiment.r_min", [](Scenario& s, const std::string& v) { s.wave.r_min = parse_number(v); }},
      {"experiment.r_max", [](Scenario& s, const std::string& v) { s.wave.r_max = parse_number(v); }},
      {"experiment.n_r", [](Scenario& s, const std::string& v) { s.wave.n_r = small_int(v); }},
      {"experiment.n_theta", [](Scenario& s, const std::string& v) { s.wave.n_theta = small_int(v); }},
      {"experiment.probe", [](Scenario& s, const std::string& v) { s.wave.probe = boolean(v); }},

      {"experiment.diffracted_angles",
       [](Scenario& s, const std::string& v) { s.measure.diffracted_angles = parse_list(v); }},
      {"experiment.incident", [](Scenario& s, const std::string& v) { s.measure.incident = boolean(v); }},
      {"experiment.half_length", [](Scenario& s, const std::string& v) { s.measure.half_length = parse_number(v); }},
      {"experiment.samples", [](Scenario& s, const std::string& v) { s.measure.samples = small_int(v); }},
      {"experiment.geo_margin", [](Scenario& s, const std::string& v) { s.measure.geo_margin = parse_number(v); }},
      {"experiment.beta",
       [](Scenario& s, const std::string& v) { s.measure.beta = s.calibrate.beta = parse_number(v); }},
      {"experiment.calib_half_length",
       [](Scenario& s, const std::string& v) { s.calibrate.half_length = parse_number(v); }},
      {"experiment.calib_samples", [](Scenario& s, const std::string& v) { s.calibrate.samples = small_int(v); }},
      {"experiment.calib_gaussian_width",
       [](Scenario& s, const std::string& v) { s.calibrate.gaussian_width = parse_number(v); }},

      {"tolerances.tol_geo", [](Scenario& s, const std::string& v) { s.tol.geo = parse_number(v); }},
      {"tolerances.tol_char", [](Scenario& s, const std::string& v) { s.tol.characteristic = parse_number(v); }},
      {"tolerances.tol_class", [](Scenario& s, const std::string& v) { s.tol.classify = parse_number(v); }},
      {"tolerances.tol_glance", [](Scenario& s, const std::string& v) { s.tol.glance = parse_number(v); }},
      {"tolerances.eps_kick", [](Scenario& s, const std::string& v) { s.tol.eps_kick = parse_number(v); }},

      {"output.dir", [](Scenario& s, const std::string& v) { s.out_dir = trim(v); }},
  };
  return table;
}

}  // namespace

Subcommand parse_subcommand(const std::string& s) {
  if (s == "trace") return Subcommand::Trace;
  if (s == "fan") return Subcommand::Fan;
  if (s == "limit") return Subcommand::Limit;
  if (s == "sector-wave") return Subcommand::SectorWave;
  if (s == "measure") return Subcommand::Measure;
  if (s == "calibrate") return Subcommand::Calibrate;
  throw ConfigError("unknown subcommand '" + s + "'");
}

const char* to_string(Subcommand c) {
  switch (c) {
    case Subcommand::Trace: return "trace";
    case Subcommand::Fan: return "fan";
    case Subcommand::Limit: return "limit";
    case Subcommand::SectorWave: return "sector-wave";
    case Subcommand::Measure: return "measure";
    case Subcommand::Calibrate: return "calibrate";
  }
  return "?";
}

geometry::Domain build_domain(const DomainSpec& spec) {
  switch (spec.kind) {
    case geometry::DomainKind::Sector2D: return geometry::make_sector(spec.opening);
    case geometry::DomainKind::Wedge3D: return geometry::make_wedge3d(spec.opening);
    case geometry::DomainKind::Polygon2D: return geometry::make_polygon(spec.vertices);
    case geometry::DomainKind::Plane2D: return geometry::make_plane();
  }
  throw ConfigError("unknown domain kind");
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  static const std::regex with_pi(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+\.?\d*))?$)");
  static const std::regex neg_pi(R"(^-\s*pi(?:\s*/\s*(\d+\.?\d*))?$)");
  std::smatch m;
  if (std::regex_match(s, m, neg_pi)) return -kPi / (m[1].matched ? plain_number(m[1].str()) : 1.0);
  if (std::regex_match(s, m, with_pi)) {
    const double a = m[1].matched ? plain_number(m[1].str()) : 1.0;
    const double b = m[2].matched ? plain_number(m[2].str()) : 1.0;
    if (b == 0.0) throw ConfigError("division by zero in '" + s + "'");
    return a * kPi / b;
  }
  if (s.empty()) throw ConfigError("empty number");
  return plain_number(s);
}

std::vector<double> parse_list(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::vector<double> out;
  std::istringstream in(t);
  std::string tok;
  while (in >> tok) out.push_back(parse_number(tok));
  return out;
}

KeyValues parse_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  KeyValues kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' is outside a section");
    for (const auto& [key, value] : body) kv[section + "." + key] = value.get_value<std::string>();
  }
  return kv;
}

KeyValues read_ini(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_ini(ss.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not section.key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (!setters().count(key)) throw ConfigError("unknown config key '" + key + "'");
  kv[key] = trim(assignment.substr(eq + 1));
}

Scenario from_key_values(const KeyValues& kv) {
  Scenario s;
  // corner_policy reads fan_size, so sizes go first.
  for (const char* first : {"experiment.fan_size"}) {
    auto it = kv.find(first);
    if (it != kv.end()) setters().at(first)(s, it->second);
  }
  for (const auto& [key, value] : kv) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(s, value);
  }
  return s;
}

Scenario load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  auto kv = read_ini(path);
  for (const auto& o : overrides) apply_override(kv, o);
  return from_key_values(kv);
}

spectral::Source make_source(const Scenario& s) {
  const auto& w = s.wave;
  if (w.source == spectral::SourceKind::Ring)
    return spectral::ring_source(w.bc, s.domain.opening, w.r0, w.theta_src, w.sigma, w.ring_modes);
  return spectral::point_source(w.r0, w.theta_src, w.sigma);
}

spectral::SpectralParams spectral_params(const Scenario& s) {
  spectral::SpectralParams p;
  p.bc = s.wave.bc;
  p.opening = s.domain.opening;
  p.n_modes = s.wave.source == spectral::SourceKind::Ring ? s.wave.ring_modes : s.wave.n_modes;
  p.lambda_max = s.wave.lambda_max;
  p.q_nodes = s.wave.q_nodes;
  p.panel_nodes = s.wave.panel_nodes;
  return p;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate_wave(const Scenario& s) {
  const auto& w = s.wave;
  require(s.domain.kind == geometry::DomainKind::Sector2D, "spectral experiments need a sector domain");
  require(s.domain.opening > 0.0 && s.domain.opening <= 2.0 * kPi, "sector opening must lie in (0, 2pi]");
  require(w.r0 > 0.0, "r0 must be positive");
  require(w.sigma > 0.0, "sigma must be positive");
  require(w.theta_src > 0.0 && w.theta_src < s.domain.opening, "theta_src must lie inside the sector");
  require(w.n_modes >= 1, "n_modes must be at least 1");
  require(w.ring_modes >= 1, "ring_modes must be at least 1");
  require(w.lambda_max > 0.0, "lambda_max must be positive");
  require(w.panel_nodes >= 2 && w.q_nodes >= w.panel_nodes, "q_nodes must cover at least one panel");
  require(w.t_star > 0.0, "t_star must be positive");
}

}  // namespace

void validate(const Scenario& s, Subcommand c) {
  validate(s.tol);
  switch (c) {
    case Subcommand::Trace: {
      const auto d = build_domain(s.domain);
      require(s.trace.duration > 0.0, "duration must be positive");
      require(std::abs(s.trace.axial_dual) < 1.0, "axial_dual must lie in (-1, 1)");
      require(s.trace.box_radius > 0.0, "box_radius must be positive");
      if (s.trace.policy.kind == gbb::CornerPolicy::Kind::EmitFan)
        require(s.trace.policy.fan_size >= 1, "fan_size must be at least 1");
      break;
    }
    case Subcommand::Fan: {
      const auto d = build_domain(s.domain);
      require(s.fan.corner >= 0 && s.fan.corner < static_cast<int>(d.corners().size()), "corner id out of range");
      require(s.fan.size >= 1, "fan_size must be at least 1");
      require(std::abs(s.fan.axial_dual) < 1.0, "axial_dual must lie in (-1, 1)");
      const double L = d.corner(s.fan.corner).opening();
      require(s.fan.z_in >= 0.0 && s.fan.z_in <= L, "z_in must lie in the link [0, opening]");
      break;
    }
    case Subcommand::Limit: {
      const auto d = build_domain(s.domain);
      require(d.dimension() == 2, "limit runs in 2D domains");
      require(!s.limit.eps_list.empty(), "eps_list is empty");
      for (double e : s.limit.eps_list) require(e > 0.0, "eps values must be positive");
      require(s.limit.start_distance > 0.0, "start_distance must be positive");
      if (d.kind() != geometry::DomainKind::Plane2D) {
        require(s.limit.corner >= 0 && s.limit.corner < static_cast<int>(d.corners().size()),
                "corner id out of range");
        const double L = d.corner(s.limit.corner).opening();
        require(s.limit.z_in > 0.0 && s.limit.z_in < L, "z_in must lie inside the link");
      }
      break;
    }
    case Subcommand::SectorWave: {
      validate_wave(s);
      const auto& w = s.wave;
      require(w.r_min >= 0.0 && w.r_max > w.r_min, "need 0 <= r_min < r_max");
      require(w.n_r >= 2 && w.n_theta >= 2, "grid needs at least 2 points per axis");
      break;
    }
    case Subcommand::Measure: {
      validate_wave(s);
      const auto& m = s.measure;
      require(s.wave.t_star > s.wave.r0, "t_star must exceed r0 so the diffracted front exists");
      require(m.half_length > 0.0, "half_length must be positive");
      require(m.samples >= 512 && (m.samples & (m.samples - 1)) == 0, "samples must be a power of two >= 512");
      require(m.beta > 0.0, "beta must be positive");
      require(m.geo_margin >= 0.0, "geo_margin must be non-negative");
      require(m.incident || !m.diffracted_angles.empty(), "no fronts requested");
      break;
    }
    case Subcommand::Calibrate: {
      const auto& c = s.calibrate;
      require(c.half_length > 0.0 && c.gaussian_width > 0.0 && c.beta > 0.0,
              "calibration lengths and beta must be positive");
      require(c.samples >= 512 && (c.samples & (c.samples - 1)) == 0,
              "calib_samples must be a power of two >= 512");
      break;
    }
  }
}

}  // namespace cwlab::scenario
