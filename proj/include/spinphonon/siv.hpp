#pragma once

// SiV ground-state manifold, its strain coupling to compression phonons, and
// the drive-assisted (Raman) effective coupling.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace spinphonon {

/// Angular frequencies in rad/s; gyromagnetic ratios in rad/s/T.
struct SivParams {
  double lambda_so = 0.0;
  double jt_shift_x = 0.0;
  double jt_shift_y = 0.0;
  double b_field = 0.0;  // T, along the defect axis
  double gamma_spin = 0.0;
  double gamma_orbital = 0.0;
};

/// Defaults: lambda_SO/2pi = 46 GHz, no strain, no field, spin ratio 2pi x 28 GHz/T.
SivParams default_siv_params();

/// Doublet splitting implied by the parameters, sqrt(lambda^2 + 4(Kx^2 + Ky^2)).
double doublet_splitting(const SivParams& p);

/// 4x4 Hamiltonian / hbar in the basis {ex up, ex down, ey up, ey down}.
Eigen::Matrix4cd siv_hamiltonian(const SivParams& p);

struct SivEigensystem {
  // Order is g, e, f, d: g/f are the lower/upper spin-down states, e/d the
  // lower/upper spin-up states.
  enum Level { g = 0, e = 1, f = 2, d = 3 };
  std::array<double, 4> energies{};
  std::array<Eigen::Vector4cd, 4> states{};
  double theta = 0.0;  // orbital mixing angle of |g>
  double phi = 0.0;    // strain phase of |g>
  double delta = 0.0;  // doublet splitting (E_f - E_g + E_d - E_e) / 2
};

SivEigensystem siv_eigensystem(const SivParams& p);

/// Strain susceptibilities in rad/s per unit strain.
struct StrainSusceptibilities {
  double d = 0.0;
  double f = 0.0;
  double t_perp = 0.0;
  double t_par = 0.0;
};

/// d/2pi = 1 PHz/strain, others zero.
StrainSusceptibilities default_strain_susceptibilities();

/// How the zero-point strain is normalized: `two_pi` uses
/// sqrt(hbar w / (2 pi rho a A)); `pi` uses sqrt(hbar w / (pi rho a A)),
/// which is sqrt(2) larger (about 176 MHz for the default diamond geometry).
enum class CouplingNormalization { two_pi, pi };

struct BareCouplingInput {
  double sound_speed = 0.0;  // m/s
  double omega_be = 0.0;     // rad/s
  double density = 0.0;      // kg/m^3
  double period = 0.0;       // m
  double cross_section = 0.0;  // m^2
  double profile = 1.0;        // |sigma|
  CouplingNormalization normalization = CouplingNormalization::two_pi;
};

/// Spin-phonon coupling g (rad/s) near the band edge.
double bare_coupling_g(const StrainSusceptibilities& s, const BareCouplingInput& in);

/// Complex vector field sampled on a uniform nx x ny x nz grid, x fastest.
struct ModeField {
  int nx = 0, ny = 0, nz = 0;
  double hx = 0.0, hy = 0.0, hz = 0.0;
  std::vector<std::array<std::complex<double>, 3>> values;

  const std::array<std::complex<double>, 3>& at(int ix, int iy, int iz) const {
    return values[static_cast<std::size_t>((iz * ny + iy) * nx + ix)];
  }
};

struct GridIndex {
  int ix = 0, iy = 0, iz = 0;
};

/// Dimensionless strain profile of a Bloch mode at an interior grid node,
/// with spatial derivatives taken by central differences.
std::complex<double> strain_profile_sigma(const ModeField& mode, GridIndex at, double k,
                                          double f_over_2d);

struct CouplingChain {
  double g = 0.0;
  double rabi = 0.0;
  double raman_detuning = 0.0;  // delta
  double delta_be = 0.0;        // Delta - w_BE
  double detuning_be = 0.0;     // Delta_BE = delta_BE - delta
  double g_eff = 0.0;
  double omega_s = 0.0;
  bool dispersive = false;  // delta >= 10 max(g, Omega)
  std::vector<std::string> warnings;
};

/// g_eff = g Omega / delta after eliminating |f>, |d>. Throws ValidationError
/// for delta <= 0 or when the spin transition is not inside the gap.
CouplingChain raman_chain(double g, double rabi, double raman_detuning, double splitting,
                          double omega_be);

}  // namespace spinphonon
