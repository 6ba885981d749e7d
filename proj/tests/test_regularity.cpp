#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cwlab/errors.hpp"
#include "cwlab/regularity.hpp"
#include "oracles.hpp"

using namespace cwlab;
using namespace cwlab::regularity;
using oracle::kPi;

namespace {

Transect line(double half_length, int samples) {
  Transect t;
  t.half_length = half_length;
  t.samples = samples;
  return t;
}

}  // namespace

TEST_CASE("window bump") {
  CHECK(window(0.0, 0.4) == 1.0);
  CHECK(window(0.2, 0.4) == 0.0);
  CHECK(window(-0.25, 0.4) == 0.0);
  CHECK(window(0.07, 0.4) == window(-0.07, 0.4));
  CHECK(window(0.05, 0.4) > window(0.1, 0.4));
  CHECK(window(0.1, 0.4, 4.0) == doctest::Approx(std::exp(-4.0 * 0.25 / 0.75)));
}

TEST_CASE("transect sampling") {
  auto t = line(0.5, 512);
  t.anchor = Vec2(1.0, 2.0);
  t.direction = Vec2(0.0, 1.0);
  CHECK(t.offset(0) == -0.5);
  CHECK(t.offset(256) == doctest::Approx(0.0));
  CHECK(t.point(512).y() == doctest::Approx(2.5));
  CHECK(t.spacing() == doctest::Approx(1.0 / 512));
}

TEST_CASE("band range") {
  auto b = band_range(0.19, 4096.0);
  CHECK(b.j_min == 7);
  CHECK(b.j_max == 10);
  b = band_range(1.0, 64.0);
  CHECK(b.j_min == 4);
  CHECK(b.j_max == 4);
  CHECK_THROWS(band_range(0.0, 10.0));
}

TEST_CASE("band energies obey Parseval and bin a pure tone") {
  const auto t = line(1.0, 1024);
  const double h = t.spacing();
  std::vector<double> u(t.samples), w(t.samples, 1.0);
  const double omega = 2.0 * kPi * 40 / (t.samples * h);  // exact grid frequency
  for (int k = 0; k < t.samples; ++k) u[k] = std::cos(omega * t.offset(k)) + 0.3 * std::sin(3.1 * t.offset(k));
  const auto e = band_energies(u, w, h);
  double direct = 0.0;
  for (double v : u) direct += v * v;
  CHECK(e.total == doctest::Approx(2.0 * kPi * h * direct).epsilon(1e-12));
  double sum = std::accumulate(e.energy.begin(), e.energy.end(), 0.0);
  CHECK(sum <= e.total * (1.0 + 1e-12));

  std::vector<double> tone(t.samples);
  for (int k = 0; k < t.samples; ++k) tone[k] = std::cos(omega * t.offset(k));
  const auto f = band_energies(tone, w, h);
  const int j = static_cast<int>(std::floor(std::log2(omega)));
  CHECK(f.energy[j] == doctest::Approx(f.total).epsilon(1e-10));
}

TEST_CASE("calibration profiles") {
  const auto rows = calibrate(CalibrationSetup{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].profile == Profile::Step);
  CHECK(std::abs(rows[0].fit.s_hat - 0.5) <= 0.05);
  CHECK(rows[1].profile == Profile::Kink);
  CHECK(std::abs(rows[1].fit.s_hat - 1.5) <= 0.05);
  CHECK(rows[2].profile == Profile::Gaussian);
  CHECK(rows[2].fit.s_hat > 4.0);
  CHECK(rows[2].fit.above_range);
  for (const auto& r : rows) CHECK(r.fit.bands_used >= 4);

  CalibrationSetup bad;
  bad.samples = 1000;
  CHECK_THROWS_AS(calibrate(bad), ConfigError);
  bad = {};
  bad.gaussian_width = 0.0;
  CHECK_THROWS_AS(calibrate(bad), ConfigError);
}

TEST_CASE("exponent is invariant under rescaling and shifts of the centre") {
  auto t = line(0.9, 4096);
  const auto bands = band_range(t.half_length, kPi / t.spacing());
  const auto step = synthetic_profile(Profile::Step, t, 0.025);
  const auto kink = synthetic_profile(Profile::Kink, t, 0.025);
  const auto a = measure(t, step, bands);
  const auto b = measure(t, kink, bands);
  for (double scale : {1e-6, 0.37, 250.0}) {
    auto s2 = step;
    for (double& v : s2) v *= scale;
    const auto a2 = measure(t, s2, bands);
    CHECK(std::abs(exponent_difference(a2, b) - exponent_difference(a, b)) <= 0.02);
    CHECK(std::abs(a2.fit.s_hat - a.fit.s_hat) <= 1e-9);
  }
  // A step displaced a little from the anchor keeps the same exponent.
  std::vector<double> shifted(t.samples);
  for (int k = 0; k < t.samples; ++k) shifted[k] = t.offset(k) > 0.03 ? 1.0 : 0.0;
  CHECK(std::abs(measure(t, shifted, bands).fit.s_hat - 0.5) <= 0.05);
}

TEST_CASE("too few bands") {
  auto t = line(0.9, 512);
  const auto u = synthetic_profile(Profile::Step, t, 0.025);
  CHECK_THROWS_AS(measure(t, u, {5, 7}), InsufficientBands);
  // Identically zero data leaves nothing above the floor.
  CHECK_THROWS_AS(measure(t, std::vector<double>(512, 0.0), {3, 8}), InsufficientBands);
}

TEST_CASE("front transects") {
  FrontRequest req;
  req.opening = 0.7 * kPi;
  req.r0 = 1.0;
  req.theta_src = 0.2 * kPi;
  req.diffracted_angles = {0.45 * kPi};
  const auto ts = front_transects(req, 1.4);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].front.kind == FrontKind::Incident);
  CHECK(ts[0].anchor.norm() == doctest::Approx(2.4));
  CHECK(std::atan2(ts[0].anchor.y(), ts[0].anchor.x()) == doctest::Approx(0.2 * kPi));
  CHECK(ts[1].front.kind == FrontKind::Diffracted);
  CHECK(ts[1].anchor.norm() == doctest::Approx(0.4));
  CHECK(ts[1].direction.dot(ts[1].anchor.normalized()) == doctest::Approx(1.0));

  CHECK_THROWS_AS(front_transects(req, 0.9), GeometryError);
  auto near = req;
  near.diffracted_angles = {0.6 * kPi};  // geometric exit of the 0.2pi ray
  CHECK_THROWS_AS(front_transects(near, 1.4), GeometryError);
  auto deep = req;
  deep.half_length = 0.5;
  CHECK_THROWS_AS(front_transects(deep, 1.4), GeometryError);
  auto odd = req;
  odd.samples = 600;
  CHECK_THROWS_AS(front_transects(odd, 1.4), ConfigError);
}
