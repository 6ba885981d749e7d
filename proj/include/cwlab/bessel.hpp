#pragma once

#include <vector>

namespace cwlab::bessel {

/// J_nu(x) for nu >= 0, x >= 0. Relative accuracy 1e-10 away from zeros,
/// 1e-12 absolute near them.
double bessel_j(double nu, double x);

/// J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
double bessel_j_prime(double nu, double x);

/// Compares the ascending series against the large-argument expansion on the
/// overlap band and throws AccuracyError when they disagree.
void check_branches(double nu, double rel_tol = 1e-10, double abs_tol = 1e-12);

/// Order above which J_nu(x) < 1e-30 for every nu' >= nu.
double negligible_order(double x);

namespace detail {
inline constexpr double kSwitch = 17.0;
inline constexpr double kOverlapLo = 15.0;
inline constexpr double kOverlapHi = 20.0;
inline constexpr double kDirectMaxOrder = 12.0;
double series(double nu, double x);
double asymptotic(double nu, double x);
}  // namespace detail

/// Evaluates J at many orders and many arguments at once. Orders sharing a
/// fractional part are chained by the three-term recurrence, so the cost per
/// argument is roughly one pass over the largest order.
class Family {
 public:
  explicit Family(const std::vector<double>& orders);

  std::size_t size() const { return n_orders_; }
  double max_order() const { return max_order_; }

  /// out[n * count + b] = J_{orders[n]}(xs[b]) for orders up to each lane's
  /// cap, min(order_cap, negligible_order(xs[b])), and zero above it. Orders
  /// above every lane's cap are left unwritten, so callers reading them must
  /// pre-zero `out`. order_cap < 0 means no cap beyond negligible_order.
  void evaluate(const double* xs, int count, double order_cap, double* out) const;

 private:
  struct Chain {
    double alpha;
    std::vector<int> offsets;  // increasing integer steps above alpha
    std::vector<int> index;    // position of each offset in the order list
  };
  void run_chain(const Chain& c, const double* xs, int count, double order_cap, double cap_all,
                 double* out, std::size_t stride) const;

  std::size_t n_orders_;
  double max_order_ = 0.0;
  std::vector<Chain> chains_;
};

}  // namespace cwlab::bessel
