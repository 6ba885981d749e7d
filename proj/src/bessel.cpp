#include "cwlab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cwlab/errors.hpp"

namespace cwlab::bessel {

namespace detail {

double series(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const long double h = 0.5L * x;
  const long double q = h * h;
  const long double lead =
      std::exp(static_cast<long double>(nu) * std::log(h) - std::lgamma(static_cast<long double>(nu) + 1.0L));
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (static_cast<long double>(k) * (static_cast<long double>(nu) + k));
    sum += term;
    if (k > h && std::abs(term) < 1e-22L * std::abs(sum)) break;
  }
  return static_cast<double>(lead * sum);
}

double asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0, t = 1.0, prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = t * (mu - odd * odd) / (k * 8.0 * x);
    if (odd * odd > mu && std::abs(next) > std::abs(prev)) break;  // optimal truncation
    t = next;
    prev = std::abs(t);
    const int r = k % 4;
    if (r == 1) q += t;
    else if (r == 2) p -= t;
    else if (r == 3) q -= t;
    else p += t;
    if (std::abs(t) < 1e-17) break;
  }
  const double phase = (0.5 * nu + 0.25) * std::numbers::pi;
  const double c = std::cos(x) * std::cos(phase) + std::sin(x) * std::sin(phase);
  const double s = std::sin(x) * std::cos(phase) - std::cos(x) * std::sin(phase);
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * c - q * s);
}

}  // namespace detail

namespace {

double direct(double nu, double x) {
  return x <= detail::kSwitch ? detail::series(nu, x) : detail::asymptotic(nu, x);
}

// Order nu > kDirectMaxOrder at x > kSwitch, reached from J_alpha, J_{alpha+1}.
double by_recurrence(double nu, double x) {
  const double alpha = nu - std::floor(nu);
  const int m = static_cast<int>(std::floor(nu));
  const double j0 = detail::asymptotic(alpha, x);
  const double j1 = detail::asymptotic(alpha + 1.0, x);
  if (x >= nu) {
    double a = j0, b = j1;
    for (int k = 1; k < m; ++k) {
      const double c = 2.0 * (alpha + k) / x * b - a;
      a = b;
      b = c;
    }
    return b;
  }
  const int start = static_cast<int>(std::ceil(std::max<double>(m, negligible_order(x)))) + 20;
  double hi = 0.0, cur = 1e-30, target = 0.0;
  for (int k = start; k >= 1; --k) {
    const double lo = 2.0 * (alpha + k) / x * cur - hi;
    hi = cur;
    cur = lo;
    if (k == m) target = hi;
    if (k - 1 == m) target = cur;
    if (std::abs(cur) > 1e200) {
      cur *= 1e-200;
      hi *= 1e-200;
      target *= 1e-200;
    }
  }
  // cur = f(alpha), hi = f(alpha + 1)
  const double big = std::max(std::abs(cur), std::abs(hi));
  const double c0 = cur / big, c1 = hi / big;
  return target / big * (c0 * j0 + c1 * j1) / (c0 * c0 + c1 * c1);
}

}  // namespace

double negligible_order(double x) { return x + 18.0 * std::cbrt(x) + 12.0; }

double bessel_j(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0) || !std::isfinite(nu) || !std::isfinite(x))
    throw std::domain_error("bessel_j needs finite nu >= 0 and x >= 0");
  if (x <= detail::kSwitch || nu <= detail::kDirectMaxOrder) return direct(nu, x);
  return by_recurrence(nu, x);
}

double bessel_j_prime(double nu, double x) {
  if (x == 0.0) {
    if (nu == 1.0) return 0.5;
    if (nu == 0.0 || nu > 1.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

void check_branches(double nu, double rel_tol, double abs_tol) {
  if (nu > detail::kDirectMaxOrder) return;  // large orders never use the expansion directly
  constexpr int kProbes = 64;
  for (int i = 0; i <= kProbes; ++i) {
    const double x = detail::kOverlapLo + (detail::kOverlapHi - detail::kOverlapLo) * i / kProbes;
    const double a = detail::series(nu, x), b = detail::asymptotic(nu, x);
    if (std::abs(a - b) > std::max(rel_tol * std::abs(a), abs_tol))
      throw AccuracyError("bessel branches disagree at nu=" + std::to_string(nu) +
                          " x=" + std::to_string(x));
  }
}

Family::Family(const std::vector<double>& orders) : n_orders_(orders.size()) {
  std::map<long long, std::size_t> by_class;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double nu = orders[i];
    if (!(nu >= 0.0)) throw std::domain_error("orders must be non-negative");
    max_order_ = std::max(max_order_, nu);
    double fl = std::floor(nu + 1e-9);
    double alpha = nu - fl;
    if (alpha < 0.0) alpha = 0.0;
    const long long key = std::llround(alpha * 1e9);
    auto it = by_class.find(key);
    if (it == by_class.end()) {
      it = by_class.emplace(key, chains_.size()).first;
      chains_.push_back({alpha, {}, {}});
    }
    Chain& c = chains_[it->second];
    c.offsets.push_back(static_cast<int>(fl));
    c.index.push_back(static_cast<int>(i));
  }
  for (auto& c : chains_) {
    std::vector<std::size_t> perm(c.offsets.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return c.offsets[a] < c.offsets[b]; });
    std::vector<int> off, idx;
    for (auto p : perm) {
      off.push_back(c.offsets[p]);
      idx.push_back(c.index[p]);
    }
    c.offsets = std::move(off);
    c.index = std::move(idx);
  }
}

namespace {
constexpr int kLanes = 8;

// Three-term recurrence f_{k-1} = 2(alpha + k)/x f_k - f_{k+1} from k = from
// down to k = to + 1, leaving cur = f_to, hi = f_{to+1}.
void step_down(double alpha, int from, int to, const double* inv, double* cur_io, double* hi_io) {
  double cur[kLanes], hi[kLanes], iv[kLanes];
  for (int b = 0; b < kLanes; ++b) {
    cur[b] = cur_io[b];
    hi[b] = hi_io[b];
    iv[b] = inv[b];
  }
  for (int k = from; k > to; --k) {
    const double a = alpha + k;
    for (int b = 0; b < kLanes; ++b) {
      const double lo = a * iv[b] * cur[b] - hi[b];
      hi[b] = cur[b];
      cur[b] = lo;
    }
  }
  for (int b = 0; b < kLanes; ++b) {
    cur_io[b] = cur[b];
    hi_io[b] = hi[b];
  }
}

// Forward version: f_{k+1} = 2(alpha + k)/x f_k - f_{k-1} from k = from to k = to - 1,
// leaving f1 = f_to, f0 = f_{to-1}.
void step_up(double alpha, int from, int to, const double* inv, double* f0_io, double* f1_io) {
  double f0[kLanes], f1[kLanes], iv[kLanes];
  for (int b = 0; b < kLanes; ++b) {
    f0[b] = f0_io[b];
    f1[b] = f1_io[b];
    iv[b] = inv[b];
  }
  for (int k = from; k < to; ++k) {
    const double a = alpha + k;
    for (int b = 0; b < kLanes; ++b) {
      const double f2 = a * iv[b] * f1[b] - f0[b];
      f0[b] = f1[b];
      f1[b] = f2;
    }
  }
  for (int b = 0; b < kLanes; ++b) {
    f0_io[b] = f0[b];
    f1_io[b] = f1[b];
  }
}
}  // namespace

void Family::evaluate(const double* xs, int count, double order_cap, double* out) const {
  double cap_all = -1.0;
  for (int b = 0; b < count; ++b) cap_all = std::max(cap_all, negligible_order(xs[b]));
  if (order_cap >= 0.0) cap_all = std::min(cap_all, order_cap);
  for (int b0 = 0; b0 < count; b0 += kLanes) {
    const int n = std::min(kLanes, count - b0);
    for (const auto& c : chains_) run_chain(c, xs + b0, n, order_cap, cap_all, out + b0, count);
  }
}

void Family::run_chain(const Chain& c, const double* xs, int count, double order_cap, double cap_all,
                       double* out, std::size_t stride) const {
  const double alpha = c.alpha;
  const auto& off = c.offsets;
  double x[kLanes], cap[kLanes];
  double xmin = 1e300, capmax = -1.0;
  bool tiny = false;
  for (int b = 0; b < kLanes; ++b) {
    x[b] = xs[std::min(b, count - 1)];
    cap[b] = negligible_order(x[b]);
    if (order_cap >= 0.0) cap[b] = std::min(cap[b], order_cap);
    xmin = std::min(xmin, x[b]);
    capmax = std::max(capmax, cap[b]);
    if (x[b] < 1.0) tiny = true;
  }
  // Number of offsets within a cap.
  auto count_below = [&](double limit) {
    return static_cast<int>(std::upper_bound(off.begin(), off.end(), limit - alpha) - off.begin());
  };
  const int n_used = count_below(capmax);
  const int n_all = count_below(cap_all);
  // Zero between each lane's cap and the batch-wide cap.
  auto zero_rest = [&] {
    for (int b = 0; b < count; ++b)
      for (int i = count_below(cap[b]); i < n_all; ++i) out[c.index[i] * stride + b] = 0.0;
  };
  if (n_used == 0) {
    zero_rest();
    return;
  }
  const int kmax = off[n_used - 1];

  if (tiny) {
    for (int b = 0; b < count; ++b) {
      const int lim = count_below(cap[b]);
      for (int i = 0; i < lim; ++i) out[c.index[i] * stride + b] = bessel_j(alpha + off[i], x[b]);
    }
    zero_rest();
    return;
  }

  double j0[kLanes], j1[kLanes], inv[kLanes];
  for (int b = 0; b < kLanes; ++b) {
    j0[b] = direct(alpha, x[b]);
    j1[b] = direct(alpha + 1.0, x[b]);
    inv[b] = 2.0 / x[b];
  }

  if (alpha + kmax <= xmin) {
    double f0[kLanes], f1[kLanes];
    int next = 0;
    for (int b = 0; b < kLanes; ++b) {
      f0[b] = j0[b];
      f1[b] = j1[b];
    }
    auto store = [&](int k, const double* f) {
      while (next < n_used && off[next] == k) {
        for (int b = 0; b < count; ++b) out[c.index[next] * stride + b] = f[b];
        ++next;
      }
    };
    store(0, f0);
    store(1, f1);
    int k = 1;
    while (next < n_used) {
      const int to = std::max(k + 1, off[next]);
      step_up(alpha, k, to, inv, f0, f1);
      k = to;
      store(k, f1);
    }
    zero_rest();
    return;
  }

  // Miller: backward from above the largest negligible order in the batch.
  double top = 0.0;
  for (int b = 0; b < kLanes; ++b) top = std::max(top, negligible_order(x[b]));
  const int start = std::max(kmax, static_cast<int>(std::ceil(top - alpha))) + 10;
  double hi[kLanes], cur[kLanes];
  for (int b = 0; b < kLanes; ++b) {
    hi[b] = 0.0;
    cur[b] = 1e-30;
  }
  int pos = n_used - 1;
  const int first_stored = pos;
  auto store = [&](int k, const double* f) {
    while (pos >= 0 && off[pos] == k) {
      for (int b = 0; b < count; ++b) out[c.index[pos] * stride + b] = f[b];
      --pos;
    }
  };
  for (int k = start; k >= 1;) {
    int to = std::max(0, k - 16);
    if (pos >= 0) to = std::max(to, std::min(k - 1, off[pos]));
    step_down(alpha, k, to, inv, cur, hi);
    k = to;
    store(k, cur);
    for (int b = 0; b < kLanes; ++b) {
      if (std::abs(cur[b]) > 1e150) {
        cur[b] *= 1e-150;
        hi[b] *= 1e-150;
        if (b < count)
          for (int i = first_stored; i > pos; --i) out[c.index[i] * stride + b] *= 1e-150;
      }
    }
  }
  double scale[kLanes];
  for (int b = 0; b < kLanes; ++b) {
    const double m = std::max(std::abs(cur[b]), std::abs(hi[b]));
    const double c0 = cur[b] / m, c1 = hi[b] / m;
    scale[b] = (c0 * j0[b] + c1 * j1[b]) / (c0 * c0 + c1 * c1) / m;
  }
  for (int i = first_stored; i > pos; --i) {
    double* o = out + c.index[i] * stride;
    for (int b = 0; b < count; ++b) o[b] *= scale[b];
  }
  zero_rest();
}

}  // namespace cwlab::bessel
