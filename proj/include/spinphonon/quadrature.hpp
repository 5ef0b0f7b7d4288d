#pragma once

#include <cstddef>
#include <vector>

namespace spinphonon {

/// Nodes and weights of a quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Composite rule on [0, t_max]: panel widths start at `first_width` and grow
/// geometrically by `growth`, capped at `max_width`; each panel carries an
/// n_per_panel-point Gauss-Legendre rule.
QuadratureRule graded_composite_rule(double t_max, double first_width, double growth,
                                     double max_width, int n_per_panel);

struct IntegralEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Truncation point for a Lorentzian tail 1/(1+t^2) that has fallen to
/// `relative_floor` of its peak.
double lorentzian_truncation(double relative_floor);

/// integral_0^{t_max} cos(s t) / (1 + t^2) dt on panels no wider than one
/// oscillation period, switching to an integration-by-parts series once
/// s t > 200. The error estimate is the 16- versus 12-point Gauss-Legendre
/// difference plus the last series term kept.
IntegralEstimate lorentzian_cosine_integral(double s, double t_max);

}  // namespace spinphonon
