#include "spinphonon/siv.hpp"

#include <algorithm>
#include <cmath>

#include "spinphonon/error.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {
namespace {

using cd = std::complex<double>;

// Eigenpairs of one spin block, ascending; basis {ex, ey}.
struct BlockEigen {
  double lower, upper;
  Eigen::Vector2cd v_lower, v_upper;
};

BlockEigen diagonalize_block(const Eigen::Matrix2cd& block) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvectors().col(0),
          es.eigenvectors().col(1)};
}

// Global phase chosen so that the ex component is real and non-negative.
Eigen::Vector2cd fix_phase(const Eigen::Vector2cd& v) {
  const double mag = std::abs(v(0));
  if (mag < 1e-300) {
    return v * std::conj(v(1)) / std::abs(v(1));
  }
  return v * (std::conj(v(0)) / mag);
}

Eigen::Vector4cd embed(const Eigen::Vector2cd& orbital, int spin) {
  // spin 0 = up, 1 = down; index = 2 * orbital + spin
  Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
  out(0 + spin) = orbital(0);
  out(2 + spin) = orbital(1);
  return out;
}

}  // namespace

SivParams default_siv_params() {
  SivParams p;
  p.lambda_so = hz_to_angular(46e9);
  p.gamma_spin = hz_to_angular(28e9);
  return p;
}

double doublet_splitting(const SivParams& p) {
  return std::sqrt(p.lambda_so * p.lambda_so +
                   4.0 * (p.jt_shift_x * p.jt_shift_x + p.jt_shift_y * p.jt_shift_y));
}

Eigen::Matrix4cd siv_hamiltonian(const SivParams& p) {
  const cd i{0.0, 1.0};
  Eigen::Matrix2cd spin_orbit;  // (gamma_s B - lambda Lz) acting with Sz = +1/2
  spin_orbit << p.gamma_spin * p.b_field, i * p.lambda_so, -i * p.lambda_so,
      p.gamma_spin * p.b_field;
  spin_orbit *= 0.5;
  Eigen::Matrix2cd jahn_teller;
  jahn_teller << p.jt_shift_x, p.jt_shift_y, p.jt_shift_y, -p.jt_shift_x;
  Eigen::Matrix2cd lz;  // sign fixed by -lambda Lz Sz matching spin_orbit above
  lz << 0.0, -i, i, 0.0;
  const Eigen::Matrix2cd orbital_common = jahn_teller + p.gamma_orbital * p.b_field * lz;

  const Eigen::Matrix2cd up = spin_orbit + orbital_common;
  const Eigen::Matrix2cd down = -spin_orbit + orbital_common;
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      h(2 * a + 0, 2 * b + 0) = up(a, b);
      h(2 * a + 1, 2 * b + 1) = down(a, b);
    }
  }
  return h;
}

SivEigensystem siv_eigensystem(const SivParams& p) {
  if (!(p.lambda_so > 0.0)) throw ValidationError("siv: lambda_so must be positive");
  const Eigen::Matrix4cd h = siv_hamiltonian(p);
  Eigen::Matrix2cd up, down;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      up(a, b) = h(2 * a, 2 * b);
      down(a, b) = h(2 * a + 1, 2 * b + 1);
    }
  }
  const BlockEigen eu = diagonalize_block(up);
  const BlockEigen ed = diagonalize_block(down);

  SivEigensystem out;
  out.energies = {ed.lower, eu.lower, ed.upper, eu.upper};
  const Eigen::Vector2cd g_orb = fix_phase(ed.v_lower);
  out.states[SivEigensystem::g] = embed(g_orb, 1);
  out.states[SivEigensystem::e] = embed(fix_phase(eu.v_lower), 0);
  out.states[SivEigensystem::f] = embed(fix_phase(ed.v_upper), 1);
  out.states[SivEigensystem::d] = embed(fix_phase(eu.v_upper), 0);

  // |g> = (cos t |ex> - i e^{-i phi} sin t |ey>) |down>
  out.theta = std::atan2(std::abs(g_orb(1)), std::abs(g_orb(0)));
  if (std::abs(g_orb(1)) > 1e-300) {
    const cd unit = g_orb(1) / std::abs(g_orb(1));
    out.phi = -std::arg(cd{0.0, 1.0} * unit);
  }
  out.delta = 0.5 * ((ed.upper - ed.lower) + (eu.upper - eu.lower));
  return out;
}

StrainSusceptibilities default_strain_susceptibilities() {
  StrainSusceptibilities s;
  s.d = hz_to_angular(1e15);
  return s;
}

double bare_coupling_g(const StrainSusceptibilities& s, const BareCouplingInput& in) {
  if (!(s.d > 0.0) || !(in.sound_speed > 0.0) || !(in.omega_be > 0.0) || !(in.density > 0.0) ||
      !(in.period > 0.0) || !(in.cross_section > 0.0) || !(in.profile >= 0.0)) {
    throw ValidationError("bare_coupling_g: all inputs must be positive");
  }
  const double norm = in.normalization == CouplingNormalization::two_pi ? kTwoPi : kPi;
  const double zero_point_strain_speed =
      std::sqrt(kHbar * in.omega_be / (norm * in.density * in.period * in.cross_section));
  return s.d / in.sound_speed * zero_point_strain_speed * in.profile;
}

std::complex<double> strain_profile_sigma(const ModeField& mode, GridIndex at, double k,
                                          double f_over_2d) {
  if (mode.nx < 3 || mode.ny < 3 || mode.nz < 3) {
    throw ValidationError("strain_profile_sigma: need at least 3 grid points per axis");
  }
  if (mode.values.size() != static_cast<std::size_t>(mode.nx) * mode.ny * mode.nz) {
    throw ValidationError("strain_profile_sigma: value count does not match the grid");
  }
  if (at.ix < 1 || at.ix > mode.nx - 2 || at.iy < 1 || at.iy > mode.ny - 2 || at.iz < 1 ||
      at.iz > mode.nz - 2) {
    throw ValidationError("strain_profile_sigma: evaluation point must be an interior node");
  }
  if (k == 0.0) throw ValidationError("strain_profile_sigma: k must be nonzero");

  enum { X = 0, Y = 1, Z = 2 };
  const auto dx = [&](int c) {
    return (mode.at(at.ix + 1, at.iy, at.iz)[c] - mode.at(at.ix - 1, at.iy, at.iz)[c]) /
           (2.0 * mode.hx);
  };
  const auto dy = [&](int c) {
    return (mode.at(at.ix, at.iy + 1, at.iz)[c] - mode.at(at.ix, at.iy - 1, at.iz)[c]) /
           (2.0 * mode.hy);
  };
  const auto dz = [&](int c) {
    return (mode.at(at.ix, at.iy, at.iz + 1)[c] - mode.at(at.ix, at.iy, at.iz - 1)[c]) /
           (2.0 * mode.hz);
  };
  const auto& u = mode.at(at.ix, at.iy, at.iz);
  const cd i{0.0, 1.0};
  const double r = f_over_2d;

  const cd egx = i * k * u[X] + dx(X) - dy(Y) + r * i * k * u[Z] + r * dx(Z) + r * dy(X);
  const cd egy = -i * k * u[Y] - dx(Y) - dy(X) + r * dy(Z) + r * dz(Y);
  return (egx - i * egy) / k;
}

CouplingChain raman_chain(double g, double rabi, double raman_detuning, double splitting,
                          double omega_be) {
  if (!(raman_detuning > 0.0)) throw ValidationError("raman_chain: delta must be positive");
  if (!(g >= 0.0) || !(rabi >= 0.0)) {
    throw ValidationError("raman_chain: g and Omega must be non-negative");
  }
  CouplingChain c;
  c.g = g;
  c.rabi = rabi;
  c.raman_detuning = raman_detuning;
  c.delta_be = splitting - omega_be;
  if (!(c.delta_be > 0.0)) {
    throw ValidationError("raman_chain: Delta - w_BE must be positive (transition inside the gap)");
  }
  c.detuning_be = c.delta_be - raman_detuning;
  c.g_eff = g * rabi / raman_detuning;
  c.omega_s = splitting - raman_detuning;
  c.dispersive = raman_detuning >= 10.0 * std::max(g, rabi);
  if (!c.dispersive) {
    c.warnings.push_back("raman_chain: delta < 10 max(g, Omega); adiabatic elimination is marginal");
  }
  return c;
}

}  // namespace spinphonon
