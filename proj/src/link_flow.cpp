#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cwlab/errors.hpp"
#include "cwlab/gbb_tracer.hpp"

namespace cwlab::gbb {

namespace {

using State = std::array<double, 3>;  // z, xi_hat, zeta_hat

State rhs(const State& y) { return {2.0 * y[2], 2.0 * y[2] * y[2], -2.0 * y[1] * y[2]}; }

State rk4(const State& y, double h) {
  auto axpy = [](const State& a, double s, const State& b) {
    return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
  };
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * h, k1));
  const State k3 = rhs(axpy(y, 0.5 * h, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out;
  for (int i = 0; i < 3; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Earliest h in (0, h_max] with g(rk4(y, h)) >= 0, given g(y) < 0 <= g(rk4(y, h_max)).
template <class G>
double locate(const State& y, double h_max, G g) {
  double lo = 0.0, hi = h_max;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, h_max); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(rk4(y, mid)) >= 0.0) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace

LinkTrajectory egbb_link_flow(const geometry::Link& link, const LinkState& entry, double step,
                              const FlowOptions& opt) {
  if (link.kind != geometry::LinkKind::Arc) throw GeometryError("egbb_link_flow needs an arc link");
  if (!(step > 0.0)) throw IntegratorError("step must be positive");
  if (!(opt.eps_kick > 0.0 && opt.eps_kick < 1.0)) throw ConfigError("eps_kick must lie in (0, 1)");
  const double L = link.length;
  if (entry.z < -opt.tol_geo || entry.z > L + opt.tol_geo) throw GeometryError("entry lies outside the link");
  double mu = std::hypot(entry.xi_hat, entry.zeta_hat);
  if (entry.eta_hat) mu = std::sqrt(std::max(0.0, 1.0 - *entry.eta_hat * *entry.eta_hat));
  if (!(mu > opt.tol_geo)) throw GlancingCornerError("mu vanishes; no link flow");

  State y{std::clamp(entry.z, 0.0, L), entry.xi_hat, entry.zeta_hat};
  double threshold = mu * (1.0 - opt.eps_kick);
  const bool radial = std::abs(entry.zeta_hat) <= opt.tol_geo && entry.xi_hat <= -mu * (1.0 - opt.tol_geo);
  if (radial) {
    const double a = 1.0 - opt.eps_kick;
    y[1] = -mu * a;
    y[2] = mu * std::sqrt((1.0 - a) * (1.0 + a)) * (opt.side == Side::Positive ? 1.0 : -1.0);
  } else if (entry.xi_hat < 0.0) {
    threshold = -entry.xi_hat;
  }
  if (!(std::abs(y[1]) < mu) && !radial && y[1] < threshold)
    throw IntegratorError("entry is not on the link fiber of radius mu");

  LinkTrajectory tr;
  tr.mu = mu;
  tr.entry = entry;
  auto to_state = [&](const State& s) { return LinkState{s[0], s[1], s[2], entry.eta_hat, entry.sgn_tau}; };
  double s = 0.0;
  if (opt.record) tr.samples.push_back({s, to_state(y)});

  for (long k = 0;; ++k) {
    if (k > opt.max_steps) throw IntegratorError("link flow did not reach the outgoing radial set");
    if (y[1] >= threshold) break;
    State next = rk4(y, step);
    if (!std::isfinite(next[0]) || !std::isfinite(next[1]) || !std::isfinite(next[2]))
      throw IntegratorError("link flow produced a non-finite state");
    double h = step;
    enum { None, Low, High, Stop } ev = None;
    if (next[1] >= threshold) {
      h = locate(y, step, [&](const State& q) { return q[1] - threshold; });
      ev = Stop;
    }
    if (next[0] < 0.0 && y[2] < 0.0) {
      const double hb = locate(y, step, [](const State& q) { return -q[0]; });
      if (ev == None || hb < h) {
        h = hb;
        ev = Low;
      }
    }
    if (next[0] > L && y[2] > 0.0) {
      const double hb = locate(y, step, [&](const State& q) { return q[0] - L; });
      if (ev == None || hb < h) {
        h = hb;
        ev = High;
      }
    }
    if (ev != None) next = rk4(y, h);
    if (ev == Low || ev == High) {
      next[0] = ev == Low ? 0.0 : L;
      next[2] = -next[2];
      ++tr.reflections;
    }
    if (ev == Stop) next[1] = std::max(next[1], threshold);
    tr.arc_length += std::abs(next[0] - y[0]);
    s += h;
    y = next;
    if (opt.record) tr.samples.push_back({s, to_state(y)});
    if (ev == Stop) break;
  }
  tr.exit = to_state(y);
  return tr;
}

SphereTrajectory egbb_sphere_flow(const SphereLinkState& entry, const Vec3& direction, double step,
                                  const FlowOptions& opt) {
  if (!(step > 0.0)) throw IntegratorError("step must be positive");
  const double tol = opt.tol_geo;
  auto corner_of_link = [&](const Vec3& z) {
    int zeros = 0;
    for (int i = 0; i < 3; ++i) zeros += std::abs(z[i]) <= tol;
    return zeros >= 2;
  };
  Vec3 z = entry.z.normalized();
  if ((z.array() < -tol).any()) throw GeometryError("entry lies outside the octant");
  if (corner_of_link(z)) throw CornerOfLinkError("entry is a corner of the link");
  Vec3 zeta = entry.zeta - entry.zeta.dot(z) * z;
  double xi = entry.xi_hat;
  const double mu = std::sqrt(xi * xi + zeta.squaredNorm());
  if (!(mu > tol)) throw GlancingCornerError("mu vanishes; no link flow");
  double threshold = mu * (1.0 - opt.eps_kick);
  if (zeta.norm() <= tol && xi < 0.0) {
    Vec3 d = direction - direction.dot(z) * z;
    if (d.norm() == 0.0) throw IntegratorError("kick direction is normal to the link");
    d.normalize();
    const double a = 1.0 - opt.eps_kick;
    xi = -mu * a;
    zeta = mu * std::sqrt((1.0 - a) * (1.0 + a)) * d;
  } else if (xi < 0.0) {
    threshold = -xi;
  }

  using S = Eigen::Matrix<double, 7, 1>;
  auto f = [](const S& y) {
    S d;
    const Vec3 zz = y.segment<3>(0), ze = y.segment<3>(3);
    const double q = ze.squaredNorm();
    d.segment<3>(0) = 2.0 * ze;
    d.segment<3>(3) = -2.0 * y[6] * ze - 2.0 * q * zz;
    d[6] = 2.0 * q;
    return d;
  };
  auto rk = [&](const S& y, double h) {
    const S k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
    return S(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  auto bisect = [&](const S& y, double h_max, auto g) {
    double lo = 0.0, hi = h_max;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(rk(y, mid)) >= 0.0) hi = mid;
      else lo = mid;
    }
    return hi;
  };

  S y;
  y << z, zeta, xi;
  SphereTrajectory tr;
  tr.entry = {z, xi, zeta};
  for (long k = 0;; ++k) {
    if (k > opt.max_steps) throw IntegratorError("sphere flow did not reach the outgoing radial set");
    if (y[6] >= threshold) break;
    S next = rk(y, step);
    double h = step;
    int ev = -1;  // 0..2 wall index, 3 stop
    if (next[6] >= threshold) {
      h = bisect(y, step, [&](const S& q) { return q[6] - threshold; });
      ev = 3;
    }
    for (int i = 0; i < 3; ++i) {
      if (next[i] < 0.0 && y[3 + i] < 0.0) {
        const double hb = bisect(y, step, [i](const S& q) { return -q[i]; });
        if (ev < 0 || hb < h) {
          h = hb;
          ev = i;
        }
      }
    }
    if (ev >= 0) next = rk(y, h);
    Vec3 zn = next.segment<3>(0);
    Vec3 ze = next.segment<3>(3);
    if (ev >= 0 && ev < 3) {
      zn[ev] = 0.0;
      if (corner_of_link(zn)) throw CornerOfLinkError("link flow reached a corner of the link");
    }
    zn.normalize();
    ze -= ze.dot(zn) * zn;
    if (ev >= 0 && ev < 3) {
      ze[ev] = -ze[ev];
      ++tr.reflections;
    }
    tr.arc_length += std::acos(std::clamp(zn.dot(y.segment<3>(0).normalized()), -1.0, 1.0));
    y.segment<3>(0) = zn;
    y.segment<3>(3) = ze;
    y[6] = ev == 3 ? std::max(next[6], threshold) : next[6];
    if (ev == 3) break;
  }
  tr.exit = {y.segment<3>(0), y[6], y.segment<3>(3)};
  return tr;
}

}  // namespace cwlab::gbb
