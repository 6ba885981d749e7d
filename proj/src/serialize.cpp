#include "cwlab/serialize.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cwlab/errors.hpp"

namespace cwlab::io {

static_assert(std::endian::native == std::endian::little, "binary field format assumes little-endian");

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("not a number: '" + s + "'");
  return v;
}

namespace {

int parse_int(const std::string& s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("not an integer: '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IoError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw IoError("unexpected CSV header; want " + want);
  }
}

std::vector<std::string> raypath_header(bool axial) {
  if (axial) return {"event_index", "event_type", "t", "x", "y", "z_axial", "tau", "xi1", "xi2", "xi3", "surface_id"};
  return {"event_index", "event_type", "t", "x", "y", "tau", "xi1", "xi2", "surface_id"};
}

std::vector<RaypathRow> raypath_rows(const gbb::RayPath& path, bool axial) {
  std::vector<RaypathRow> rows;
  int i = 0;
  for (const auto& e : path.events) {
    const hamiltonian::PhasePoint* p = &gbb::event_point(e);
    int surface = -1;
    if (auto r = std::get_if<gbb::Reflection>(&e)) {
      surface = r->surface;
      p = &r->outgoing;
    } else if (auto g = std::get_if<gbb::GlancingStop>(&e)) {
      surface = g->surface;
    }
    RaypathRow row;
    row.event_index = i++;
    row.event_type = gbb::event_name(e);
    row.t = p->t;
    row.x = p->base.x();
    row.y = p->base.y();
    row.tau = p->tau;
    row.xi1 = p->xi.x();
    row.xi2 = p->xi.y();
    if (axial) {
      row.z_axial = p->base.z();
      row.xi3 = p->xi.z();
    }
    row.surface_id = surface;
    rows.push_back(row);
  }
  return rows;
}

void write_raypath_csv(std::ostream& out, const std::vector<RaypathRow>& rows, bool axial) {
  write_row(out, raypath_header(axial));
  for (const auto& r : rows) {
    std::vector<std::string> c{std::to_string(r.event_index), r.event_type, format_double(r.t),
                               format_double(r.x), format_double(r.y)};
    if (axial) c.push_back(opt(r.z_axial));
    c.push_back(format_double(r.tau));
    c.push_back(format_double(r.xi1));
    c.push_back(format_double(r.xi2));
    if (axial) c.push_back(opt(r.xi3));
    c.push_back(std::to_string(r.surface_id));
    write_row(out, c);
  }
}

std::vector<RaypathRow> read_raypath_csv(std::istream& in) {
  const auto t = read_csv(in);
  const bool axial = t.header.size() == raypath_header(true).size();
  expect_header(t, raypath_header(axial));
  std::vector<RaypathRow> rows;
  for (const auto& c : t.rows) {
    RaypathRow r;
    std::size_t k = 0;
    r.event_index = parse_int(c[k++]);
    r.event_type = c[k++];
    r.t = parse_double(c[k++]);
    r.x = parse_double(c[k++]);
    r.y = parse_double(c[k++]);
    if (axial) r.z_axial = parse_optional(c[k++]);
    r.tau = parse_double(c[k++]);
    r.xi1 = parse_double(c[k++]);
    r.xi2 = parse_double(c[k++]);
    if (axial) r.xi3 = parse_optional(c[k++]);
    r.surface_id = parse_int(c[k++]);
    rows.push_back(r);
  }
  return rows;
}

namespace {
const std::vector<std::string> kFanHeader{"corner_id", "z_out", "xi_hat", "zeta_hat", "eta_hat", "tau", "tag"};
const std::vector<std::string> kNearMissHeader{"eps", "swept", "swept_error", "exit", "reflections"};
const std::vector<std::string> kFieldHeader{"r", "theta", "u"};
const std::vector<std::string> kRegularityHeader{"front", "s_hat", "residual", "j_min", "j_max"};
const std::vector<std::string> kCalibrationHeader{"profile", "expected", "s_hat", "residual",
                                                  "j_min", "j_max", "bands_used", "above_range"};
}  // namespace

std::vector<FanRow> fan_rows(const gbb::DiffractionFan& fan) {
  std::vector<FanRow> rows;
  for (const auto& m : fan.members) {
    FanRow r;
    r.corner_id = fan.corner;
    r.z_out = m.z_out;
    r.xi_hat = m.state.xi_hat;
    r.zeta_hat = m.state.zeta_hat;
    r.eta_hat = m.state.eta_hat;
    r.tau = m.outgoing.tau;
    r.tag = gbb::to_string(m.tag);
    rows.push_back(r);
  }
  return rows;
}

void write_fan_csv(std::ostream& out, const std::vector<FanRow>& rows) {
  write_row(out, kFanHeader);
  for (const auto& r : rows)
    write_row(out, {std::to_string(r.corner_id), format_double(r.z_out), format_double(r.xi_hat),
                    format_double(r.zeta_hat), opt(r.eta_hat), format_double(r.tau), r.tag});
}

std::vector<FanRow> read_fan_csv(std::istream& in) {
  const auto t = read_csv(in);
  expect_header(t, kFanHeader);
  std::vector<FanRow> rows;
  for (const auto& c : t.rows) {
    FanRow r;
    r.corner_id = parse_int(c[0]);
    r.z_out = parse_double(c[1]);
    r.xi_hat = parse_double(c[2]);
    r.zeta_hat = parse_double(c[3]);
    r.eta_hat = parse_optional(c[4]);
    r.tau = parse_double(c[5]);
    r.tag = c[6];
    if (r.tag != "Geometric" && r.tag != "Diffractive" && r.tag != "GlancingExit")
      throw IoError("unknown fan tag '" + r.tag + "'");
    rows.push_back(r);
  }
  return rows;
}

json to_json(const std::vector<RaypathRow>& rows, bool axial) {
  json events = json::array();
  for (const auto& r : rows) {
    json e{{"event_index", r.event_index}, {"event_type", r.event_type}, {"t", r.t}, {"x", r.x}, {"y", r.y},
           {"tau", r.tau}, {"xi1", r.xi1}, {"xi2", r.xi2}, {"surface_id", r.surface_id}};
    if (axial) {
      e["z_axial"] = r.z_axial.value_or(0.0);
      e["xi3"] = r.xi3.value_or(0.0);
    }
    events.push_back(std::move(e));
  }
  return json{{"axial", axial}, {"events", std::move(events)}};
}

std::vector<RaypathRow> raypath_from_json(const json& j) {
  try {
    const bool axial = j.at("axial").get<bool>();
    std::vector<RaypathRow> rows;
    for (const auto& e : j.at("events")) {
      RaypathRow r;
      r.event_index = e.at("event_index").get<int>();
      r.event_type = e.at("event_type").get<std::string>();
      r.t = e.at("t").get<double>();
      r.x = e.at("x").get<double>();
      r.y = e.at("y").get<double>();
      r.tau = e.at("tau").get<double>();
      r.xi1 = e.at("xi1").get<double>();
      r.xi2 = e.at("xi2").get<double>();
      r.surface_id = e.at("surface_id").get<int>();
      if (axial) {
        r.z_axial = e.at("z_axial").get<double>();
        r.xi3 = e.at("xi3").get<double>();
      }
      rows.push_back(r);
    }
    return rows;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed raypath: ") + e.what());
  }
}

json to_json(const std::vector<FanRow>& rows) {
  json members = json::array();
  for (const auto& r : rows)
    members.push_back(json{{"corner_id", r.corner_id}, {"z_out", r.z_out}, {"xi_hat", r.xi_hat},
                           {"zeta_hat", r.zeta_hat},
                           {"eta_hat", r.eta_hat ? json(*r.eta_hat) : json(nullptr)},
                           {"tau", r.tau}, {"tag", r.tag}});
  return json{{"members", std::move(members)}};
}

std::vector<FanRow> fan_from_json(const json& j) {
  try {
    std::vector<FanRow> rows;
    for (const auto& m : j.at("members")) {
      FanRow r;
      r.corner_id = m.at("corner_id").get<int>();
      r.z_out = m.at("z_out").get<double>();
      r.xi_hat = m.at("xi_hat").get<double>();
      r.zeta_hat = m.at("zeta_hat").get<double>();
      if (!m.at("eta_hat").is_null()) r.eta_hat = m.at("eta_hat").get<double>();
      r.tau = m.at("tau").get<double>();
      r.tag = m.at("tag").get<std::string>();
      rows.push_back(r);
    }
    return rows;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed fan: ") + e.what());
  }
}

void write_nearmiss_csv(std::ostream& out, const std::vector<gbb::NearMissSample>& samples) {
  write_row(out, kNearMissHeader);
  for (const auto& s : samples)
    write_row(out, {format_double(s.eps), format_double(s.swept),
                    format_double(std::abs(s.swept - std::numbers::pi)), format_double(s.exit_direction),
                    std::to_string(s.reflections)});
}

std::vector<gbb::NearMissSample> read_nearmiss_csv(std::istream& in) {
  const auto t = read_csv(in);
  expect_header(t, kNearMissHeader);
  std::vector<gbb::NearMissSample> out;
  for (const auto& c : t.rows) {
    gbb::NearMissSample s;
    s.eps = parse_double(c[0]);
    s.swept = parse_double(c[1]);
    s.exit_direction = parse_double(c[3]);
    s.reflections = parse_int(c[4]);
    out.push_back(s);
  }
  return out;
}

void write_field_csv(std::ostream& out, const spectral::FieldGrid& g) {
  write_row(out, kFieldHeader);
  for (std::size_t i = 0; i < g.r.size(); ++i)
    for (std::size_t j = 0; j < g.theta.size(); ++j)
      write_row(out, {format_double(g.r[i]), format_double(g.theta[j]), format_double(g.at(i, j))});
}

spectral::FieldGrid read_field_csv(std::istream& in) {
  const auto t = read_csv(in);
  expect_header(t, kFieldHeader);
  spectral::FieldGrid g;
  for (const auto& c : t.rows) {
    const double r = parse_double(c[0]), th = parse_double(c[1]);
    if (g.r.empty() || g.r.back() != r) g.r.push_back(r);
    if (g.r.size() == 1) g.theta.push_back(th);
    g.u.push_back(parse_double(c[2]));
  }
  if (g.r.size() * g.theta.size() != g.u.size()) throw IoError("field CSV is not a full grid");
  return g;
}

namespace {
template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated field file");
  return v;
}
}  // namespace

void write_field_binary(std::ostream& out, const spectral::FieldGrid& g) {
  out.write("CWLF", 4);
  put<std::uint32_t>(out, kFieldVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.r.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.theta.size()));
  put<double>(out, g.t);
  for (double v : g.r) put(out, v);
  for (double v : g.theta) put(out, v);
  for (double v : g.u) put(out, v);
}

spectral::FieldGrid read_field_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "CWLF") throw IoError("not a CWLF field file");
  const auto version = get<std::uint32_t>(in);
  if (version != kFieldVersion) throw IoError("unsupported CWLF version " + std::to_string(version));
  spectral::FieldGrid g;
  const auto nr = get<std::uint32_t>(in), nt = get<std::uint32_t>(in);
  g.t = get<double>(in);
  g.r.resize(nr);
  g.theta.resize(nt);
  g.u.resize(static_cast<std::size_t>(nr) * nt);
  for (auto& v : g.r) v = get<double>(in);
  for (auto& v : g.theta) v = get<double>(in);
  for (auto& v : g.u) v = get<double>(in);
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in field file");
  return g;
}

void write_regularity_csv(std::ostream& out, const std::vector<regularity::RegularityReport>& reports) {
  write_row(out, kRegularityHeader);
  for (const auto& r : reports)
    write_row(out, {r.front.label(), format_double(r.fit.s_hat), format_double(r.fit.residual),
                    std::to_string(r.fit.j_min), std::to_string(r.fit.j_max)});
}

std::vector<RegularityRow> read_regularity_csv(std::istream& in) {
  const auto t = read_csv(in);
  expect_header(t, kRegularityHeader);
  std::vector<RegularityRow> rows;
  for (const auto& c : t.rows)
    rows.push_back({c[0], parse_double(c[1]), parse_double(c[2]), parse_int(c[3]), parse_int(c[4])});
  return rows;
}

namespace {
const char* kind_name(regularity::FrontKind k) {
  switch (k) {
    case regularity::FrontKind::Incident: return "incident";
    case regularity::FrontKind::Reflected: return "reflected";
    case regularity::FrontKind::Diffracted: return "diffracted";
  }
  return "?";
}
regularity::FrontKind kind_from(const std::string& s) {
  if (s == "incident") return regularity::FrontKind::Incident;
  if (s == "reflected") return regularity::FrontKind::Reflected;
  if (s == "diffracted") return regularity::FrontKind::Diffracted;
  throw IoError("unknown front kind '" + s + "'");
}
}  // namespace

json to_json(const regularity::RegularityReport& r) {
  return json{{"front", {{"kind", kind_name(r.front.kind)}, {"theta", r.front.theta}, {"label", r.front.label()}}},
              {"s_hat", r.fit.s_hat},
              {"residual", r.fit.residual},
              {"j_min", r.fit.j_min},
              {"j_max", r.fit.j_max},
              {"bands_used", r.fit.bands_used},
              {"above_range", r.fit.above_range},
              {"band_energies", r.bands.energy},
              {"total_energy", r.bands.total},
              {"spacing", r.bands.spacing}};
}

regularity::RegularityReport report_from_json(const json& j) {
  try {
    regularity::RegularityReport r;
    r.front.kind = kind_from(j.at("front").at("kind").get<std::string>());
    r.front.theta = j.at("front").at("theta").get<double>();
    r.fit.s_hat = j.at("s_hat").get<double>();
    r.fit.residual = j.at("residual").get<double>();
    r.fit.j_min = j.at("j_min").get<int>();
    r.fit.j_max = j.at("j_max").get<int>();
    r.fit.bands_used = j.at("bands_used").get<int>();
    r.fit.above_range = j.at("above_range").get<bool>();
    r.bands.energy = j.at("band_energies").get<std::vector<double>>();
    r.bands.total = j.at("total_energy").get<double>();
    r.bands.spacing = j.at("spacing").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed regularity report: ") + e.what());
  }
}

void write_calibration_csv(std::ostream& out, const std::vector<regularity::CalibrationRow>& rows) {
  write_row(out, kCalibrationHeader);
  for (const auto& r : rows)
    write_row(out, {regularity::to_string(r.profile), format_double(r.expected), format_double(r.fit.s_hat),
                    format_double(r.fit.residual), std::to_string(r.fit.j_min), std::to_string(r.fit.j_max),
                    std::to_string(r.fit.bands_used), r.fit.above_range ? "1" : "0"});
}

std::vector<regularity::CalibrationRow> read_calibration_csv(std::istream& in) {
  const auto t = read_csv(in);
  expect_header(t, kCalibrationHeader);
  std::vector<regularity::CalibrationRow> rows;
  for (const auto& c : t.rows) {
    regularity::CalibrationRow r;
    if (c[0] == "step") r.profile = regularity::Profile::Step;
    else if (c[0] == "kink") r.profile = regularity::Profile::Kink;
    else if (c[0] == "gaussian") r.profile = regularity::Profile::Gaussian;
    else throw IoError("unknown profile '" + c[0] + "'");
    r.expected = parse_double(c[1]);
    r.fit.s_hat = parse_double(c[2]);
    r.fit.residual = parse_double(c[3]);
    r.fit.j_min = parse_int(c[4]);
    r.fit.j_max = parse_int(c[5]);
    r.fit.bands_used = parse_int(c[6]);
    r.fit.above_range = c[7] == "1";
    rows.push_back(r);
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body, bool binary) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  body(f);
  f.flush();
  if (!f) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace cwlab::io
