#include "cwlab/sector_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cwlab/errors.hpp"
#include "cwlab/parallel.hpp"
#include "cwlab/quadrature.hpp"

namespace cwlab::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBatch = 8;
constexpr int kRadialPerPanel = 16;

void check_params(const SpectralParams& p) {
  if (!(p.opening > 0.0 && p.opening < 2.0 * kPi)) throw DomainError("opening must lie in (0, 2*pi)");
  if (p.n_modes < 1) throw ConfigError("n_modes must be at least 1");
  if (!(p.lambda_max > 0.0)) throw ConfigError("lambda_max must be positive");
  if (p.q_nodes < 1 || p.panel_nodes < 1) throw ConfigError("q_nodes and panel_nodes must be positive");
}

std::vector<double> orders_of(const std::vector<ModeSpec>& modes) {
  std::vector<double> v;
  v.reserve(modes.size());
  for (const auto& m : modes) v.push_back(m.nu);
  return v;
}

double mollifier(double lambda, double lambda_max) {
  const double s = lambda / lambda_max;
  return std::exp(-s * s);
}

// Radial quadrature over the source support with all orders at once:
// out[q][n] = sum_k w_k g(r_k) r_k J_n(lambda_q r_k).
void radial_transform(const Source& src, const std::vector<double>& orders,
                      const std::vector<double>& lambda, int panels, std::vector<double>& out) {
  const double lo = std::max(0.0, src.r0 - 8.0 * src.sigma), hi = src.r0 + 8.0 * src.sigma;
  const auto rule = quadrature::composite_gauss_legendre(lo, hi, panels, kRadialPerPanel);
  const std::size_t K = rule.size(), N = orders.size();
  std::vector<double> gw(K);
  for (std::size_t k = 0; k < K; ++k)
    gw[k] = rule.weights[k] * source_radial_profile(src, rule.nodes[k]) * rule.nodes[k];
  bessel::Family fam(orders);
  out.assign(lambda.size() * N, 0.0);
  parallel_for(lambda.size(), [&](std::size_t q) {
    std::vector<double> xs(K), J(K * N);
    for (std::size_t k = 0; k < K; ++k) xs[k] = lambda[q] * rule.nodes[k];
    fam.evaluate(xs.data(), static_cast<int>(K), -1.0, J.data());
    double* row = &out[q * N];
    for (std::size_t n = 0; n < N; ++n) {
      const double* Jn = &J[n * K];
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += gw[k] * Jn[k];
      row[n] = acc;
    }
  });
}

int converged_radial_panels(const Source& src, const std::vector<double>& orders, double lambda_top) {
  const std::vector<double> probe{0.5 * lambda_top, lambda_top};
  std::vector<double> a, b;
  int panels = 1;
  radial_transform(src, orders, probe, panels, a);
  for (; panels <= 4096; panels *= 2) {
    radial_transform(src, orders, probe, 2 * panels, b);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      scale = std::max(scale, std::abs(b[i]));
      diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    if (diff <= 1e-8 * scale || scale == 0.0) return 2 * panels;
    a.swap(b);
  }
  throw QuadratureError("radial Hankel quadrature did not converge");
}

}  // namespace

const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

double ModeSpec::angular(double theta) const {
  if (bc == BoundaryCondition::Dirichlet) return std::sqrt(2.0 / opening) * std::sin(nu * theta);
  if (n == 0) return 1.0 / std::sqrt(opening);
  return std::sqrt(2.0 / opening) * std::cos(nu * theta);
}

double ModeSpec::angular_derivative(double theta) const {
  if (bc == BoundaryCondition::Dirichlet) return std::sqrt(2.0 / opening) * nu * std::cos(nu * theta);
  if (n == 0) return 0.0;
  return -std::sqrt(2.0 / opening) * nu * std::sin(nu * theta);
}

std::vector<ModeSpec> mode_frequencies(BoundaryCondition bc, double opening, int n_modes) {
  if (!(opening > 0.0 && opening < 2.0 * kPi)) throw DomainError("opening must lie in (0, 2*pi)");
  if (n_modes < 1) throw ConfigError("need at least one mode");
  std::vector<ModeSpec> out;
  const int first = bc == BoundaryCondition::Dirichlet ? 1 : 0;
  for (int n = first; n <= n_modes; ++n) out.push_back({bc, opening, n, n * kPi / opening});
  return out;
}

Source point_source(double r0, double theta_src, double sigma) {
  if (!(r0 > 0.0) || !(sigma > 0.0)) throw ConfigError("source needs r0 > 0 and sigma > 0");
  return {SourceKind::PointLike, r0, theta_src, sigma, {}};
}

Source ring_source(BoundaryCondition bc, double opening, double r0, double theta_c, double sigma,
                   int n_coeffs) {
  if (!(r0 > 0.0) || !(sigma > 0.0)) throw ConfigError("source needs r0 > 0 and sigma > 0");
  if (n_coeffs < 1) throw ConfigError("ring needs at least one coefficient");
  auto modes = mode_frequencies(bc, opening, n_coeffs);
  modes.resize(n_coeffs);
  Source s{SourceKind::Ring, r0, theta_c, sigma, {}};
  for (int i = 0; i < n_coeffs; ++i) {
    const double c = std::cos(0.5 * kPi * i / n_coeffs);
    s.ring_coeffs.push_back(modes[i].angular(theta_c) * c * c);
  }
  double peak = 0.0;
  for (int j = 0; j <= 4096; ++j)
    peak = std::max(peak, std::abs(source_angular_profile(s, bc, opening, opening * j / 4096.0)));
  if (peak == 0.0) throw ConfigError("ring profile vanishes identically");
  for (double& c : s.ring_coeffs) c /= peak;
  return s;
}

double source_angular_profile(const Source& src, BoundaryCondition bc, double opening, double theta) {
  if (src.kind == SourceKind::PointLike) {
    const double a = (theta - src.theta_src) * src.r0 / src.sigma;
    return std::exp(-a * a);
  }
  const auto modes = mode_frequencies(bc, opening, static_cast<int>(src.ring_coeffs.size()));
  double v = 0.0;
  for (std::size_t i = 0; i < src.ring_coeffs.size(); ++i) v += src.ring_coeffs[i] * modes[i].angular(theta);
  return v;
}

double source_radial_profile(const Source& src, double r) {
  const double a = (r - src.r0) / src.sigma;
  return std::exp(-a * a);
}

std::vector<double> angular_coefficients(const Source& src, const std::vector<ModeSpec>& modes) {
  std::vector<double> c(modes.size(), 0.0);
  if (modes.empty()) return c;
  if (src.kind == SourceKind::Ring) {
    for (std::size_t i = 0; i < modes.size() && i < src.ring_coeffs.size(); ++i) c[i] = src.ring_coeffs[i];
    return c;
  }
  const double opening = modes.front().opening;
  const double w = 8.0 * src.sigma / src.r0;
  const double lo = std::max(0.0, src.theta_src - w), hi = std::min(opening, src.theta_src + w);
  if (!(hi > lo)) return c;
  const double nu_max = modes.back().nu;
  int panels = std::max(4, static_cast<int>(std::ceil(nu_max * (hi - lo) / 4.0)));
  auto project = [&](int p) {
    const auto rule = quadrature::composite_gauss_legendre(lo, hi, p, 16);
    std::vector<double> out(modes.size(), 0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double g = rule.weights[k] * source_angular_profile(src, modes.front().bc, opening, rule.nodes[k]);
      for (std::size_t i = 0; i < modes.size(); ++i) out[i] += g * modes[i].angular(rule.nodes[k]);
    }
    return out;
  };
  c = project(panels);
  const auto check = project(2 * panels);
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    scale = std::max(scale, std::abs(check[i]));
    diff = std::max(diff, std::abs(check[i] - c[i]));
  }
  if (diff > 1e-10 * scale) throw QuadratureError("angular projection did not converge");
  return check;
}

std::vector<double> hankel_coeff(const Source& src, const ModeSpec& mode,
                                 const std::vector<double>& lambda_nodes) {
  const double lo = std::max(0.0, src.r0 - 8.0 * src.sigma), hi = src.r0 + 8.0 * src.sigma;
  auto integrate = [&](int panels) {
    const auto rule = quadrature::composite_gauss_legendre(lo, hi, panels, kRadialPerPanel);
    std::vector<double> out(lambda_nodes.size(), 0.0);
    for (std::size_t q = 0; q < lambda_nodes.size(); ++q)
      for (std::size_t k = 0; k < rule.size(); ++k)
        out[q] += rule.weights[k] * source_radial_profile(src, rule.nodes[k]) * rule.nodes[k] *
                  bessel::bessel_j(mode.nu, lambda_nodes[q] * rule.nodes[k]);
    return out;
  };
  auto a = integrate(1);
  for (int panels = 2; panels <= 4096; panels *= 2) {
    auto b = integrate(panels);
    bool ok = true;
    for (std::size_t q = 0; q < a.size(); ++q)
      if (std::abs(a[q] - b[q]) > 1e-8 * std::abs(b[q]) + 1e-300) ok = false;
    if (ok) return b;
    a.swap(b);
  }
  throw QuadratureError("Hankel coefficient did not converge");
}

SpectralModel::SpectralModel(std::vector<ModeSpec> modes, std::vector<double> lambda,
                             std::vector<double> node_weights, std::vector<double> coeffs)
    : modes_(std::move(modes)),
      lambda_(std::move(lambda)),
      node_weights_(std::move(node_weights)),
      coeffs_(std::move(coeffs)) {
  if (node_weights_.size() != lambda_.size() || coeffs_.size() != modes_.size() * lambda_.size())
    throw std::invalid_argument("spectral table has the wrong shape");
}

double SpectralModel::spectral_energy() const {
  const std::size_t N = modes_.size();
  double e = 0.0;
  for (std::size_t q = 0; q < lambda_.size(); ++q) {
    double row = 0.0;
    for (std::size_t n = 0; n < N; ++n) row += coeffs_[q * N + n] * coeffs_[q * N + n];
    e += node_weights_[q] * lambda_[q] * row;
  }
  return 0.5 * e;
}

SpectralModel build_model(const Source& src, const SpectralParams& p) {
  check_params(p);
  auto modes = mode_frequencies(p.bc, p.opening, p.n_modes);
  const int panels = std::max(1, (p.q_nodes + p.panel_nodes - 1) / p.panel_nodes);
  auto rule = quadrature::composite_gauss_legendre(0.0, p.lambda_max, panels, p.panel_nodes);
  const auto ang = angular_coefficients(src, modes);
  const auto orders = orders_of(modes);
  const int rp = converged_radial_panels(src, orders, p.lambda_max);
  std::vector<double> table;
  radial_transform(src, orders, rule.nodes, rp, table);
  const std::size_t N = modes.size();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double m = mollifier(rule.nodes[q], p.lambda_max);
    for (std::size_t n = 0; n < N; ++n) table[q * N + n] *= m * ang[n];
  }
  SpectralModel model(std::move(modes), rule.nodes, rule.weights, std::move(table));
  model.support_lo = std::max(0.0, src.r0 - 8.0 * src.sigma);
  model.support_hi = src.r0 + 8.0 * src.sigma;
  const double lambda_eff =
      std::min(p.lambda_max, std::sqrt(30.0) / std::sqrt(0.25 * src.sigma * src.sigma +
                                                         1.0 / (p.lambda_max * p.lambda_max)));
  model.feature_width = 2.0 * kPi / lambda_eff;
  return model;
}

RadialModes radial_modes(const SpectralModel& m, const std::vector<double>& r,
                         const std::vector<double>& times, unsigned quantities,
                         double order_cap_radius) {
  const std::size_t N = m.n_modes(), T = times.size(), R = r.size();
  const bool want_v = quantities & kValue, want_t = quantities & kTimeDerivative,
             want_r = quantities & kRadialDerivative;
  RadialModes out;
  out.n_times = T;
  out.n_r = R;
  out.n_modes = N;
  if (want_v) out.value.assign(T * R * N, 0.0);
  if (want_t) out.time_derivative.assign(T * R * N, 0.0);
  if (want_r) out.radial_derivative.assign(T * R * N, 0.0);

  std::vector<double> orders = orders_of(m.modes());
  const std::size_t F = want_r ? 2 * N : N;
  if (want_r)
    for (std::size_t n = 0; n < N; ++n) orders.push_back(orders[n] + 1.0);
  bessel::Family fam(orders);
  const auto& lam = m.lambda();
  const auto& w = m.node_weights();
  const auto& c = m.coeffs();

  const std::size_t batches = (R + kBatch - 1) / kBatch;
  parallel_for(batches, [&](std::size_t bi) {
    const std::size_t r0 = bi * kBatch;
    const int count = static_cast<int>(std::min<std::size_t>(kBatch, R - r0));
    std::vector<double> xs(count), J(count * F), Jb(N), dJb(N), sn(T), cs(T);
    double rmax = 0.0;
    for (int b = 0; b < count; ++b) rmax = std::max(rmax, r[r0 + b]);
    for (std::size_t q = 0; q < lam.size(); ++q) {
      const double lq = lam[q];
      for (int b = 0; b < count; ++b) xs[b] = lq * r[r0 + b];
      double cap = -1.0;
      if (order_cap_radius > 0.0) cap = bessel::negligible_order(lq * order_cap_radius) + 1.0;
      fam.evaluate(xs.data(), count, cap, J.data());
      double top = bessel::negligible_order(lq * rmax);
      if (cap >= 0.0) top = std::min(top, cap);
      const std::size_t active =
          std::upper_bound(orders.begin(), orders.begin() + N, top) - orders.begin();
      if (active == 0) continue;
      for (std::size_t ti = 0; ti < T; ++ti) {
        sn[ti] = w[q] * std::sin(lq * times[ti]);
        cs[ti] = w[q] * lq * std::cos(lq * times[ti]);
      }
      const double* cq = &c[q * N];
      for (int b = 0; b < count; ++b) {
        for (std::size_t n = 0; n < active; ++n) Jb[n] = J[n * count + b];
        if (want_r) {
          const double x = xs[b];
          for (std::size_t n = 0; n < active; ++n)
            dJb[n] = x > 0.0 ? orders[n] / x * Jb[n] - J[(N + n) * count + b]
                             : bessel::bessel_j_prime(orders[n], 0.0);
        }
        for (std::size_t ti = 0; ti < T; ++ti) {
          const std::size_t base = (ti * R + r0 + b) * N;
          if (want_v) {
            double* o = &out.value[base];
            const double s = sn[ti];
            for (std::size_t n = 0; n < active; ++n) o[n] += s * cq[n] * Jb[n];
          }
          if (want_t) {
            double* o = &out.time_derivative[base];
            const double s = cs[ti];
            for (std::size_t n = 0; n < active; ++n) o[n] += s * cq[n] * Jb[n];
          }
          if (want_r) {
            double* o = &out.radial_derivative[base];
            const double s = sn[ti] * lq;
            for (std::size_t n = 0; n < active; ++n) o[n] += s * cq[n] * dJb[n];
          }
        }
      }
    }
  });
  return out;
}

std::vector<double> evaluate_points(const SpectralModel& m, const std::vector<double>& r,
                                    const std::vector<double>& theta, double t,
                                    double order_cap_radius) {
  if (r.size() != theta.size()) throw std::invalid_argument("r and theta lengths differ");
  const std::size_t N = m.n_modes(), R = r.size();
  const std::vector<double> orders = orders_of(m.modes());
  bessel::Family fam(orders);
  const auto& lam = m.lambda();
  const auto& w = m.node_weights();
  const auto& c = m.coeffs();
  std::vector<double> u(R, 0.0);
  constexpr std::size_t kPoints = 16;
  const std::size_t batches = (R + kPoints - 1) / kPoints;
  parallel_for(batches, [&](std::size_t bi) {
    const std::size_t p0 = bi * kPoints;
    const int count = static_cast<int>(std::min(kPoints, R - p0));
    std::vector<double> xs(count), J(N * count), ang(N * count), part(count), acc(count, 0.0);
    double rmax = 0.0;
    for (int b = 0; b < count; ++b) {
      rmax = std::max(rmax, r[p0 + b]);
      for (std::size_t n = 0; n < N; ++n) ang[n * count + b] = m.modes()[n].angular(theta[p0 + b]);
    }
    for (std::size_t q = 0; q < lam.size(); ++q) {
      const double lq = lam[q];
      for (int b = 0; b < count; ++b) xs[b] = lq * r[p0 + b];
      double cap = -1.0;
      if (order_cap_radius > 0.0) cap = bessel::negligible_order(lq * order_cap_radius) + 1.0;
      double top = bessel::negligible_order(lq * rmax);
      if (cap >= 0.0) top = std::min(top, cap);
      const std::size_t active =
          std::upper_bound(orders.begin(), orders.end(), top) - orders.begin();
      if (active == 0) continue;
      fam.evaluate(xs.data(), count, cap, J.data());
      std::fill(part.begin(), part.end(), 0.0);
      const double* cq = &c[q * N];
      for (std::size_t n = 0; n < active; ++n) {
        const double cn = cq[n];
        const double* a = &ang[n * count];
        const double* j = &J[n * count];
        for (int b = 0; b < count; ++b) part[b] += cn * a[b] * j[b];
      }
      const double s = w[q] * std::sin(lq * t);
      for (int b = 0; b < count; ++b) acc[b] += s * part[b];
    }
    for (int b = 0; b < count; ++b) u[p0 + b] = acc[b];
  });
  return u;
}

FieldGrid propagate(const SpectralModel& m, const SpectralParams& p, double t,
                    const std::vector<double>& r, const std::vector<double>& theta) {
  if (!(t > 0.0)) throw ConfigError("t* must be positive");
  FieldGrid g;
  g.t = t;
  g.r = r;
  g.theta = theta;
  g.n_modes = p.n_modes;
  g.lambda_max = p.lambda_max;
  g.q_nodes = static_cast<int>(m.n_nodes());
  const auto rm = radial_modes(m, r, {t}, kValue);
  const std::size_t N = m.n_modes();
  std::vector<double> ang(theta.size() * N);
  for (std::size_t j = 0; j < theta.size(); ++j)
    for (std::size_t n = 0; n < N; ++n) ang[j * N + n] = m.modes()[n].angular(theta[j]);
  g.u.assign(r.size() * theta.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < theta.size(); ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) acc += ang[j * N + n] * rm.at(rm.value, 0, i, n);
      g.u[i * theta.size() + j] = acc;
    }
  return g;
}

double convergence_probe(const Source& src, double t, const FieldGrid& g, const SpectralParams& p) {
  if (g.r.empty() || g.theta.empty()) return 0.0;
  std::vector<double> pr, pt, base;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = (g.r.size() - 1) * a / 3, j = (g.theta.size() - 1) * b / 3;
      pr.push_back(g.r[i]);
      pt.push_back(g.theta[j]);
      base.push_back(g.at(i, j));
    }
  SpectralParams fine = p;
  fine.n_modes *= 2;
  fine.q_nodes *= 2;
  const auto u2 = evaluate_points(build_model(src, fine), pr, pt, t);
  double peak = 0.0, diff = 0.0;
  for (double v : g.u) peak = std::max(peak, std::abs(v));
  for (std::size_t k = 0; k < u2.size(); ++k) diff = std::max(diff, std::abs(u2[k] - base[k]));
  return peak > 0.0 ? diff / peak : diff;
}

FieldGrid propagate(const Source& src, double t, const std::vector<double>& r,
                    const std::vector<double>& theta, const SpectralParams& p, bool probe) {
  const auto m = build_model(src, p);
  FieldGrid g = propagate(m, p, t, r, theta);
  if (probe) {
    g.probe_change = convergence_probe(src, t, g, p);
    g.truncation_warning = g.probe_change > 1e-3;
  }
  return g;
}

std::vector<EnergySample> energy(const SpectralModel& m, const std::vector<double>& times) {
  std::vector<EnergySample> out;
  if (times.empty()) return out;
  const double spectral = m.spectral_energy();
  if (m.n_modes() == 0 || spectral == 0.0) {
    for (double t : times) out.push_back({t, 0.0, 0.0});
    return out;
  }
  const double t_max = *std::max_element(times.begin(), times.end());
  const double width = m.feature_width > 0.0 ? m.feature_width : 0.05;
  const double r_hi = m.support_hi + t_max + 8.0 * width;
  const int panels = std::max(1, static_cast<int>(std::ceil(r_hi / width)));
  const auto rule = quadrature::composite_gauss_legendre(0.0, r_hi, panels, kRadialPerPanel);
  const auto rm = radial_modes(m, rule.nodes, times, kValue | kTimeDerivative | kRadialDerivative);

  const double opening = m.modes().front().opening;
  const std::size_t N = m.n_modes();
  const std::size_t M = std::max<std::size_t>(64, 2 * N + 2);
  const double dtheta = opening / M;
  std::vector<double> ang(M * N), dang(M * N);
  for (std::size_t j = 0; j < M; ++j) {
    const double th = (j + 0.5) * dtheta;
    for (std::size_t n = 0; n < N; ++n) {
      ang[j * N + n] = m.modes()[n].angular(th);
      dang[j * N + n] = m.modes()[n].angular_derivative(th);
    }
  }
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<double> per_r(rule.size(), 0.0);
    parallel_for(rule.size(), [&](std::size_t i) {
      const double r = rule.nodes[i];
      const double* v = &rm.value[(ti * rm.n_r + i) * N];
      const double* vt = &rm.time_derivative[(ti * rm.n_r + i) * N];
      const double* vr = &rm.radial_derivative[(ti * rm.n_r + i) * N];
      double acc = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        double ut = 0.0, ur = 0.0, uth = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          ut += ang[j * N + n] * vt[n];
          ur += ang[j * N + n] * vr[n];
          uth += dang[j * N + n] * v[n];
        }
        acc += ut * ut + ur * ur + uth * uth / (r * r);
      }
      per_r[i] = 0.5 * acc * dtheta * r * rule.weights[i];
    });
    double e = 0.0;
    for (double v : per_r) e += v;
    out.push_back({times[ti], e, spectral});
  }
  return out;
}

std::vector<EnergySample> energy(const Source& src, const std::vector<double>& times,
                                 const SpectralParams& p) {
  return energy(build_model(src, p), times);
}

}  // namespace cwlab::spectral
