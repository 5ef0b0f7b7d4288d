#include "spinphonon/boundstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinphonon/error.hpp"
#include "spinphonon/quadrature.hpp"
#include "spinphonon/simd/kernels.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {
namespace {

// In units of g_alpha the bound-state condition reads y - D = 2 / sqrt(y).
double scaled_residual(double y, double d) { return y - d - 2.0 / std::sqrt(y); }

struct ScaledRoot {
  double y;
  int iterations;
};

ScaledRoot solve_scaled(double d) {
  double lo = d > 0.0 ? d : std::min(1.0, std::pow(2.0 / (std::abs(d) + 1.0), 2));
  for (int i = 0; i < 2000 && scaled_residual(lo, d) >= 0.0; ++i) lo *= 0.5;
  double hi = std::max(d, 0.0) + std::cbrt(4.0) + 10.0;
  if (!(scaled_residual(lo, d) < 0.0) || !(scaled_residual(hi, d) > 0.0)) {
    std::ostringstream msg;
    msg << "solve_bound_state: no sign change on [" << lo << ", " << hi
        << "] g_alpha for Delta_BE = " << d << " g_alpha";
    throw NumericalError(msg.str());
  }
  double y = d > 0.0 ? d + 2.0 / std::sqrt(d + 1.0) : std::min(hi, std::max(lo, 4.0 / (d * d + 1.0)));
  y = std::clamp(y, lo, hi);
  for (int it = 1; it <= 200; ++it) {
    const double f = scaled_residual(y, d);
    if (f == 0.0) return {y, it};
    if (f < 0.0) lo = y; else hi = y;
    const double slope = 1.0 + std::pow(y, -1.5);
    double next = y - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-15 * std::max(1.0, next)) return {next, it};
    y = next;
  }
  std::ostringstream msg;
  msg << "solve_bound_state: Newton/bisection did not converge within [" << lo << ", " << hi
      << "] g_alpha";
  throw NumericalError(msg.str());
}

const QuadratureRule& panel_rule(int n) {
  static const QuadratureRule r16 = gauss_legendre(16);
  if (n == 16) return r16;
  thread_local QuadratureRule other;
  if (static_cast<int>(other.size()) != n) other = gauss_legendre(n);
  return other;
}

}  // namespace

BandEdgeModel make_band_edge_model(double omega_be, double alpha, double period,
                                   double cross_section, double mode_amplitude) {
  if (!(omega_be > 0.0)) throw ValidationError("band edge: omega_be must be positive");
  if (!(alpha > 0.0)) throw ValidationError("band edge: alpha must be positive");
  if (!(period > 0.0)) throw ValidationError("band edge: period must be positive");
  if (!(cross_section > 0.0)) throw ValidationError("band edge: cross_section must be positive");
  return {omega_be, alpha, period, cross_section, mode_amplitude, kPi / period};
}

double zero_point_amplitude(double density, double volume, double omega) {
  return std::sqrt(kHbar / (2.0 * density * volume * omega));
}

double g_alpha(double g_eff, double alpha) {
  return std::cbrt(std::pow(kPi * g_eff * g_eff / std::sqrt(4.0 * alpha), 2));
}

BoundState solve_bound_state(const BandEdgeModel& m, double g_eff, double detuning_be) {
  if (!(g_eff > 0.0)) throw ValidationError("solve_bound_state: g_eff must be positive");
  if (!std::isfinite(detuning_be)) throw ValidationError("solve_bound_state: Delta_BE not finite");
  if (!(m.alpha > 0.0) || !(m.period > 0.0)) {
    throw ValidationError("solve_bound_state: alpha and period must be positive");
  }

  BoundState bs;
  bs.g_eff = g_eff;
  bs.g_alpha = g_alpha(g_eff, m.alpha);
  bs.omega_be = m.omega_be;
  bs.detuning_be = detuning_be;
  bs.omega_s = m.omega_be + detuning_be;

  const ScaledRoot root = solve_scaled(detuning_be / bs.g_alpha);
  bs.iterations = root.iterations;
  const double x = root.y * bs.g_alpha;
  bs.gap_offset = x;
  bs.omega_b = m.omega_be + x;
  bs.tan2_theta = (x - detuning_be) / (2.0 * x);
  bs.theta = std::atan(std::sqrt(bs.tan2_theta));
  bs.p_e = 1.0 / (1.0 + bs.tan2_theta);
  bs.l_c = m.period * std::sqrt(m.alpha / x);
  bs.g_c = g_eff * std::sqrt(kTwoPi * m.period / bs.l_c);
  bs.v_eff = m.cross_section * bs.l_c;

  const CkSpectrum spectrum = ck_spectrum(bs, m, g_eff, band_edge_k_grid(bs, m));
  const EffectiveCavity cavity = effective_cavity(bs, spectrum);
  bs.delta_b = cavity.delta_b;
  bs.delta_e = cavity.delta_e;
  return bs;
}

double bound_state_residual(const BoundState& bs, const BandEdgeModel& m) {
  const double x = bs.gap_offset;
  const double rhs = kPi * bs.g_eff * bs.g_eff / std::sqrt(m.alpha * x);
  return (x - bs.detuning_be - rhs) / x;
}

double envelope(double x, double x0, const BoundState& bs, const BandEdgeModel& m) {
  return std::sqrt(kTwoPi * m.period / bs.l_c) * std::exp(-std::abs(x - x0) / bs.l_c) *
         m.mode_amplitude;
}

double envelope_by_mode_sum(double x, double x0, const BoundState& bs, const BandEdgeModel& m) {
  // c_k (a dk) with k - k0 = t / L_c: g a / (tan(theta) x L_c) dt / (1 + t^2)
  const double s = std::abs(x - x0) / bs.l_c;
  const IntegralEstimate half = lorentzian_cosine_integral(s, lorentzian_truncation(1e-12));
  const double prefactor =
      bs.g_eff * m.period / (std::sqrt(bs.tan2_theta) * bs.gap_offset * bs.l_c);
  return prefactor * 2.0 * half.value * m.mode_amplitude;
}

KGrid band_edge_k_grid(const BoundState& bs, const BandEdgeModel& m, const KGridOptions& opt) {
  if (!(opt.truncation > 0.0 && opt.truncation < 1.0)) {
    throw ValidationError("k grid: truncation must lie in (0, 1)");
  }
  // t^2 / (1 + t^2)^2 peaks at 1/4 (t = 1) and decays as 1/t^2.
  double t_max = 2.0 / std::sqrt(opt.truncation);
  if (opt.brillouin_zone_only) t_max = std::min(t_max, kPi * bs.l_c / m.period);
  const QuadratureRule& base = panel_rule(opt.nodes_per_panel);

  std::vector<double> t, w;
  double left = 0.0;
  double width = std::min(0.125, t_max);
  while (left < t_max) {
    const double right = std::min(t_max, left + width);
    const double half = 0.5 * (right - left);
    const double mid = 0.5 * (right + left);
    for (std::size_t i = 0; i < base.size(); ++i) {
      t.push_back(mid + half * base.nodes[i]);
      w.push_back(half * base.weights[i]);
    }
    left = right;
    width *= opt.growth;
  }

  KGrid grid;
  const std::size_t n = t.size();
  grid.k.resize(2 * n);
  grid.weight.resize(2 * n);
  const double to_k = 1.0 / bs.l_c;
  const double to_measure = m.period / bs.l_c;
  for (std::size_t i = 0; i < n; ++i) {
    grid.k[n - 1 - i] = m.k0 - t[i] * to_k;
    grid.weight[n - 1 - i] = w[i] * to_measure;
    grid.k[n + i] = m.k0 + t[i] * to_k;
    grid.weight[n + i] = w[i] * to_measure;
  }
  return grid;
}

CkSpectrum ck_spectrum(const BoundState& bs, const BandEdgeModel& m, double g_eff,
                       const KGrid& grid, double x0, double norm_tolerance) {
  if (grid.k.size() != grid.weight.size() || grid.k.empty()) {
    throw ValidationError("ck_spectrum: grid is empty or inconsistent");
  }
  const double tan_theta = std::sqrt(bs.tan2_theta);
  const double curvature = m.alpha * m.period * m.period;
  CkSpectrum out;
  out.x0 = x0;
  out.points.reserve(grid.k.size());
  for (std::size_t i = 0; i < grid.k.size(); ++i) {
    const double u = grid.k[i] - m.k0;
    const double depth = curvature * u * u;
    const double denom = tan_theta * (bs.gap_offset + depth);
    const std::complex<double> phase = std::polar(1.0, -grid.k[i] * x0);
    out.points.push_back({grid.k[i], grid.weight[i], g_eff * phase / denom,
                          m.omega_be - depth, depth});
  }
  // Norm through the vectorized moment kernel in t = (k - k0) L_c.
  std::vector<double> t(grid.k.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (grid.k[i] - m.k0) * bs.l_c;
  const simd::LorentzianSquaredMoments mom =
      simd::lorentzian_squared_moments(t, grid.weight, 1.0, 1.0);
  const double x = bs.gap_offset;
  out.norm = g_eff * g_eff / (bs.tan2_theta * x * x) * mom.zeroth;
  if (!(std::abs(out.norm - 1.0) <= norm_tolerance)) {
    std::ostringstream msg;
    msg << "ck_spectrum: sum |c_k|^2 = " << out.norm
        << "; the k grid does not cover the support of the bound state";
    throw NumericalError(msg.str());
  }
  return out;
}

double tan2_theta_by_mode_sum(const BoundState& bs, const BandEdgeModel& m, double g_eff,
                              const KGrid& grid) {
  std::vector<double> t(grid.k.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (grid.k[i] - m.k0) * bs.l_c;
  const simd::LorentzianSquaredMoments mom =
      simd::lorentzian_squared_moments(t, grid.weight, 1.0, 1.0);
  const double x = bs.gap_offset;
  return g_eff * g_eff / (x * x) * mom.zeroth;
}

EffectiveCavity effective_cavity(const BoundState& bs, const CkSpectrum& spectrum) {
  double norm = 0.0, depth = 0.0;
  for (const SpectrumPoint& p : spectrum.points) {
    const double w = p.weight * std::norm(p.c);
    norm += w;
    depth += w * p.depth;
  }
  // w_BE - <w_k> over the normalized phonon distribution, written in terms
  // of the depth below the edge so that w_BE never cancels.
  if (!(norm > 0.0)) throw NumericalError("effective_cavity: empty phonon distribution");
  EffectiveCavity out;
  out.delta_b = depth / norm;
  out.delta_e = bs.detuning_be + out.delta_b;
  return out;
}

}  // namespace spinphonon
