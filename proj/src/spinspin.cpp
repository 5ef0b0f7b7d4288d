#include "spinphonon/spinspin.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "spinphonon/error.hpp"
#include "spinphonon/quadrature.hpp"

namespace spinphonon {

double lambda_eff(double g_c, double detuning_be) {
  if (!(detuning_be > 0.0)) {
    throw ValidationError("lambda_eff: Delta_BE must be positive (spin frequency inside the gap)");
  }
  return g_c * g_c / (2.0 * detuning_be);
}

double coupling_j(const SpinSite& a, const SpinSite& b, double lambda, double l_c) {
  return lambda * std::exp(-std::abs(a.position - b.position) / l_c);
}

CouplingMatrix build_coupling_matrix(const std::vector<SpinSite>& sites, const BoundState& bs,
                                     double length) {
  const double g_ref = bs.g_eff;
  for (const SpinSite& s : sites) {
    if (!(s.g_eff > 0.0)) throw ValidationError("spin site: g_eff must be positive");
    if (length > 0.0 && (s.position < 0.0 || s.position > length)) {
      std::ostringstream msg;
      msg << "spin site: position " << s.position << " m outside [0, " << length << "]";
      throw ValidationError(msg.str());
    }
  }
  CouplingMatrix cm;
  cm.lambda_eff = lambda_eff(bs.g_c, bs.detuning_be);
  cm.l_c = bs.l_c;
  const auto n = static_cast<Eigen::Index>(sites.size());
  cm.j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const SpinSite& a = sites[static_cast<std::size_t>(i)];
      const SpinSite& b = sites[static_cast<std::size_t>(k)];
      const double scale = a.g_eff * b.g_eff / (g_ref * g_ref);
      cm.j(i, k) = cm.j(k, i) = scale * coupling_j(a, b, cm.lambda_eff, cm.l_c);
    }
  }
  return cm;
}

OracleValue coupling_j_oracle(const SpinSite& a, const SpinSite& b, double omega_s,
                              const BandEdgeModel& m, double tolerance) {
  const double delta = omega_s - m.omega_be;
  if (!(delta > 0.0)) {
    throw ValidationError("coupling_j_oracle: spin frequency must lie inside the gap");
  }
  // u = t / L' with L' = a sqrt(alpha / Delta): the integrand becomes
  // cos(s t) / (Delta (1 + t^2)) and a du = (a / L') dt. Even in t.
  const double l_prime = m.period * std::sqrt(m.alpha / delta);
  const double s = std::abs(a.position - b.position) / l_prime;
  const IntegralEstimate half = lorentzian_cosine_integral(s, lorentzian_truncation(1e-12));
  const double scale = a.g_eff * b.g_eff * m.period / (l_prime * delta) * 2.0;
  OracleValue out{scale * half.value, scale * half.error_estimate};
  if (!(out.error_estimate <= tolerance * std::abs(out.value))) {
    std::ostringstream msg;
    msg << "coupling_j_oracle: quadrature error " << out.error_estimate << " exceeds "
        << tolerance << " relative at separation " << std::abs(a.position - b.position) << " m";
    throw NumericalError(msg.str());
  }
  return out;
}

namespace {

std::size_t bit_of(std::size_t site, std::size_t n) { return std::size_t{1} << (n - 1 - site); }

}  // namespace

Eigen::MatrixXcd build_spin_hamiltonian(std::size_t n, const CouplingMatrix& cm, SpinModel model,
                                        const Anisotropy& an, bool nearest_neighbour) {
  if (n == 0 || n > kMaxDenseSpins) {
    std::ostringstream msg;
    msg << "build_spin_hamiltonian: " << n << " spins; dense assembly supports 1.."
        << kMaxDenseSpins;
    throw ValidationError(msg.str());
  }
  if (cm.j.rows() != static_cast<Eigen::Index>(n) || cm.j.cols() != static_cast<Eigen::Index>(n)) {
    throw ValidationError("build_spin_hamiltonian: coupling matrix shape does not match sites");
  }
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (nearest_neighbour && j != i + 1) continue;
      const double jij = cm.j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (jij == 0.0) continue;
      const std::size_t bi = bit_of(i, n), bj = bit_of(j, n);
      for (std::size_t s = 0; s < dim; ++s) {
        const bool ei = (s & bi) != 0, ej = (s & bj) != 0;
        const std::size_t flipped = s ^ bi ^ bj;
        const auto r = static_cast<Eigen::Index>(flipped), c = static_cast<Eigen::Index>(s);
        if (model == SpinModel::exchange_xy) {
          if (ei != ej) h(r, c) += jij;
          continue;
        }
        // sigma_x sigma_x flips both with amplitude 1; sigma_y sigma_y flips
        // both with amplitude -1 when the spins agree and +1 otherwise.
        const double xy = an.jx + (ei == ej ? -an.jy : an.jy);
        h(r, c) += jij * xy;
        // Diagonal z term with sigma_z = |e><e| - |g><g|.
        const double zz = (ei == ej) ? 1.0 : -1.0;
        h(c, c) += jij * an.jz * zz;
      }
    }
  }
  return h;
}

Eigen::VectorXd excitation_number(std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    out(static_cast<Eigen::Index>(s)) = static_cast<double>(__builtin_popcountll(s));
  }
  return out;
}

Eigen::MatrixXcd single_excitation_block(const Eigen::MatrixXcd& h, std::size_t n) {
  const auto dn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd block(dn, dn);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          h(static_cast<Eigen::Index>(bit_of(i, n)), static_cast<Eigen::Index>(bit_of(j, n)));
    }
  }
  return block;
}

}  // namespace spinphonon
