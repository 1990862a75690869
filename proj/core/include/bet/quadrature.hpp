#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bet/space.hpp"

namespace bet {

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

struct QuadratureNode {
  Vec x;
  double weight;  // coordinate volume element only (no sqrt det g, no phi)
};

/// Tensor-product rule over the sample box: trapezoid with `order` nodes on periodic
/// axes, Gauss-Legendre with `order` nodes on the margin-shrunk non-periodic axes.
std::vector<QuadratureNode> chart_quadrature(const ManifoldSpec& space, int order);

struct IntegralResult {
  double value = 0.0;
  /// True when some axis is non-periodic, so the margin strips were left out.
  bool boundary_truncated = false;
};

/// Integral of f * phi * sqrt(det g) over the chart.
IntegralResult weighted_integral(const ManifoldSpec& space, const Expression& f, int order);
/// Same, for an integrand computed in code.
IntegralResult weighted_integral(const ManifoldSpec& space, const std::function<double(const Vec&)>& f, int order);

}  // namespace bet
