#pragma once

// Single-excitation bound state of a spin coupled to the quadratic band edge
// w_k = w_BE - alpha a^2 (k - k0)^2, treated as a continuum over the real
// line. Mode sums become sum_k -> a * integral dk (the measure under which
// the stationary equations close); "weight" below always means a dk.

#include <complex>
#include <vector>

namespace spinphonon {

struct BandEdgeModel {
  double omega_be = 0.0;       // rad/s
  double alpha = 0.0;          // rad/s
  double period = 0.0;         // m
  double cross_section = 0.0;  // m^2
  double mode_amplitude = 1.0;  // Q_k0, m
  double k0 = 0.0;             // rad/m, band-edge wavevector (pi/a by default)
};

/// Band-edge model with k0 = pi/a. Throws ValidationError unless alpha, a, A > 0.
BandEdgeModel make_band_edge_model(double omega_be, double alpha, double period,
                                   double cross_section, double mode_amplitude = 1.0);

/// Zero-point displacement sqrt(hbar / (2 rho V w)).
double zero_point_amplitude(double density, double volume, double omega);

/// Natural frequency scale g_alpha = (pi g_eff^2 / sqrt(4 alpha))^(2/3).
double g_alpha(double g_eff, double alpha);

struct BoundState {
  double omega_be = 0.0;
  double omega_b = 0.0;    // Omega_b
  double gap_offset = 0.0;  // x = Omega_b - w_BE > 0
  double detuning_be = 0.0;  // Delta_BE = w_s - w_BE
  double omega_s = 0.0;
  double theta = 0.0;
  double tan2_theta = 0.0;
  double p_e = 0.0;  // cos^2 theta
  double l_c = 0.0;  // a sqrt(alpha / x)
  double g_c = 0.0;  // g_eff sqrt(2 pi a / L_c)
  double delta_b = 0.0;  // w_BE - <w_k>
  double delta_e = 0.0;  // Delta_BE + delta_b
  double v_eff = 0.0;    // A L_c
  double g_alpha = 0.0;
  double g_eff = 0.0;
  int iterations = 0;
};

/// Solves x - Delta_BE = pi g_eff^2 / sqrt(alpha x) for the unique x > 0 and
/// derives the hybridization, localization and effective-cavity quantities.
/// delta_b is obtained by quadrature over the default spectrum grid.
BoundState solve_bound_state(const BandEdgeModel& m, double g_eff, double detuning_be);

/// Residual (x - Delta_BE - pi g^2/sqrt(alpha x)) / x of a solved state.
double bound_state_residual(const BoundState& bs, const BandEdgeModel& m);

/// Phonon envelope sqrt(2 pi a / L_c) exp(-|x - x0| / L_c) Q_k0, i.e. the
/// closed form with L_c expressed in lattice constants.
double envelope(double x, double x0, const BoundState& bs, const BandEdgeModel& m);

/// Same envelope obtained by Fourier-summing c_k e^{ik(x-x0)} over the band.
double envelope_by_mode_sum(double x, double x0, const BoundState& bs, const BandEdgeModel& m);

struct KGridOptions {
  /// Integrands are kept down to this fraction of their peak.
  double truncation = 1e-12;
  int nodes_per_panel = 16;
  double growth = 1.5;
  /// Restrict to the first Brillouin zone |k - k0| <= pi/a.
  bool brillouin_zone_only = false;
};

/// Quadrature grid on k (both sides of k0), weights in the a dk measure.
struct KGrid {
  std::vector<double> k;
  std::vector<double> weight;
};

/// Grid adapted to the bound state: graded on the scale 1/L_c, extending until
/// the frequency-weighted |c_k|^2 falls below the truncation floor.
KGrid band_edge_k_grid(const BoundState& bs, const BandEdgeModel& m, const KGridOptions& opt = {});

struct SpectrumPoint {
  double k = 0.0;
  double weight = 0.0;
  std::complex<double> c;
  double omega_k = 0.0;
  double depth = 0.0;  // w_BE - w_k >= 0
};

struct CkSpectrum {
  std::vector<SpectrumPoint> points;
  double norm = 0.0;  // sum weight |c_k|^2
  double x0 = 0.0;
};

/// Single-phonon amplitudes c_k = g e^{-ik x0} / (tan(theta) (Omega_b - w_k)).
/// Throws NumericalError if the grid misses the support, i.e. the norm
/// differs from 1 by more than `norm_tolerance`.
CkSpectrum ck_spectrum(const BoundState& bs, const BandEdgeModel& m, double g_eff,
                       const KGrid& grid, double x0 = 0.0, double norm_tolerance = 1e-6);

/// sum_k g_eff^2 / (Omega_b - w_k)^2 on a grid (equals tan^2 theta).
double tan2_theta_by_mode_sum(const BoundState& bs, const BandEdgeModel& m, double g_eff,
                              const KGrid& grid);

struct EffectiveCavity {
  double delta_b = 0.0;
  double delta_e = 0.0;
};

/// delta_b = w_BE - integral |c_k|^2 w_k with the weights normalized over the
/// grid, Delta_E = Delta_BE + delta_b.
EffectiveCavity effective_cavity(const BoundState& bs, const CkSpectrum& spectrum);

}  // namespace spinphonon
