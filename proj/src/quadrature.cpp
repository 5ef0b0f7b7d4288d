#include "spinphonon/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "spinphonon/error.hpp"
#include "spinphonon/simd/kernels.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double deriv = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      deriv = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / deriv;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * deriv * deriv);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule graded_composite_rule(double t_max, double first_width, double growth,
                                     double max_width, int n_per_panel) {
  if (!(t_max > 0.0) || !(first_width > 0.0) || !(growth >= 1.0) || !(max_width > 0.0)) {
    throw ValidationError("graded_composite_rule: invalid panel parameters");
  }
  const QuadratureRule base = gauss_legendre(n_per_panel);
  QuadratureRule out;
  double left = 0.0;
  double width = std::min(first_width, max_width);
  while (left < t_max) {
    const double right = std::min(t_max, left + width);
    const double half = 0.5 * (right - left);
    const double mid = 0.5 * (right + left);
    for (std::size_t i = 0; i < base.size(); ++i) {
      out.nodes.push_back(mid + half * base.nodes[i]);
      out.weights.push_back(half * base.weights[i]);
    }
    left = right;
    width = std::min(width * growth, max_width);
  }
  return out;
}

double lorentzian_truncation(double relative_floor) {
  if (!(relative_floor > 0.0 && relative_floor < 1.0)) {
    throw ValidationError("lorentzian_truncation: floor must lie in (0, 1)");
  }
  return std::sqrt(1.0 / relative_floor - 1.0);
}

namespace {

// Past s t = kTailOnset the integral is finished in closed form. With
// 1 / (1 + t^2) = (1/2i) (1/(t - i) - 1/(t + i)), each pole term has the
// antiderivative e^{ist} sum_n n! / ((t - p) is)^(n+1) from repeated
// integration by parts, and the n-th term shrinks like n / (s t).
constexpr double kTailOnset = 200.0;

std::complex<double> pole_antiderivative(double s, double t, std::complex<double> pole,
                                         double* last_term) {
  using cd = std::complex<double>;
  const cd step = 1.0 / ((t - pole) * cd(0.0, s));
  cd term = step;
  cd sum = 0.0;
  for (int n = 0; n < 60; ++n) {
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    term *= static_cast<double>(n + 1) * step;
  }
  *last_term = std::abs(term);
  return std::exp(cd(0.0, s * t)) * sum;
}

// Antiderivative of e^{ist} / (1 + t^2); its real part belongs to the cosine.
std::complex<double> lorentzian_antiderivative(double s, double t, double* error) {
  using cd = std::complex<double>;
  double e_minus = 0.0, e_plus = 0.0;
  const cd h = pole_antiderivative(s, t, cd(0.0, 1.0), &e_minus) -
               pole_antiderivative(s, t, cd(0.0, -1.0), &e_plus);
  *error = 0.5 * (e_minus + e_plus);
  return h / cd(0.0, 2.0);
}

}  // namespace

IntegralEstimate lorentzian_cosine_integral(double s, double t_max) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ValidationError("lorentzian_cosine_integral: t_max must be positive");
  }
  s = std::abs(s);
  static const QuadratureRule hi = gauss_legendre(16);
  static const QuadratureRule lo = gauss_legendre(12);
  const double period = s > 0.0 ? kTwoPi / s : std::numeric_limits<double>::infinity();
  // Past s t = kTailOnset the oscillatory tail is summed in closed form.
  const double t_numeric = s > 0.0 ? std::min(t_max, std::max(1.0, kTailOnset / s)) : t_max;
  const double max_width = std::min(period, 0.25 * t_numeric + 1.0);
  const simd::LorentzianCosine params{1.0, 1.0, s};

  constexpr std::size_t kPanelsPerBatch = 256;
  std::vector<double> t_hi, w_hi, t_lo, w_lo;
  t_hi.reserve(kPanelsPerBatch * hi.size());
  w_hi.reserve(kPanelsPerBatch * hi.size());
  t_lo.reserve(kPanelsPerBatch * lo.size());
  w_lo.reserve(kPanelsPerBatch * lo.size());

  IntegralEstimate est;
  double sum_hi = 0.0, sum_lo = 0.0;
  const auto flush = [&] {
    sum_hi += simd::lorentzian_cosine_sum(t_hi, w_hi, params);
    sum_lo += simd::lorentzian_cosine_sum(t_lo, w_lo, params);
    est.evaluations += t_hi.size() + t_lo.size();
    t_hi.clear();
    w_hi.clear();
    t_lo.clear();
    w_lo.clear();
  };

  double left = 0.0;
  double width = std::min(0.125, max_width);
  std::size_t panels = 0;
  while (left < t_numeric) {
    const double right = std::min(t_numeric, left + width);
    const double half = 0.5 * (right - left);
    const double mid = 0.5 * (right + left);
    for (std::size_t i = 0; i < hi.size(); ++i) {
      t_hi.push_back(mid + half * hi.nodes[i]);
      w_hi.push_back(half * hi.weights[i]);
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
      t_lo.push_back(mid + half * lo.nodes[i]);
      w_lo.push_back(half * lo.weights[i]);
    }
    if (++panels % kPanelsPerBatch == 0) flush();
    left = right;
    width = std::min(width * 1.5, max_width);
  }
  flush();
  est.value = sum_hi;
  est.error_estimate = std::abs(sum_hi - sum_lo);
  if (t_numeric < t_max) {
    double err_a = 0.0, err_b = 0.0;
    const auto ga = lorentzian_antiderivative(s, t_numeric, &err_a);
    const auto gb = lorentzian_antiderivative(s, t_max, &err_b);
    est.value += (gb - ga).real();
    est.error_estimate += err_a + err_b;
    est.evaluations += 2;
  }
  return est;
}

}  // namespace spinphonon
