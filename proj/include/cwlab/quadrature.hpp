#pragma once

#include <vector>

namespace cwlab::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);

/// Gauss-Legendre of `per_panel` nodes on each of `panels` equal panels of [a, b].
Rule composite_gauss_legendre(double a, double b, int panels, int per_panel);

}  // namespace cwlab::quadrature
