#pragma once

// Spin-spin couplings mediated by virtual band-edge phonons.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "spinphonon/boundstate.hpp"

namespace spinphonon {

struct SpinSite {
  double position = 0.0;  // m
  double g_eff = 0.0;     // rad/s
};

struct CouplingMatrix {
  Eigen::MatrixXd j;  // rad/s, symmetric, zero diagonal
  double lambda_eff = 0.0;
  double l_c = 0.0;
};

/// g_c^2 / (2 Delta_BE); throws ValidationError unless Delta_BE > 0.
double lambda_eff(double g_c, double detuning_be);

/// lambda_eff exp(-|x_i - x_j| / L_c).
double coupling_j(const SpinSite& a, const SpinSite& b, double lambda, double l_c);

/// Pairwise couplings from a solved bound state. Sites with a different
/// g_eff than the reference scale as g_i g_j / g_ref^2.
CouplingMatrix build_coupling_matrix(const std::vector<SpinSite>& sites, const BoundState& bs,
                                     double length = 0.0);

struct OracleValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// J = g_i g_j a integral du cos(u r) / (w_s - w_BE + alpha a^2 u^2) over the
/// quadratic band, with r = |x_i - x_j|. Requires Delta_BE > 0; throws
/// NumericalError if the quadrature error exceeds `tolerance` relative.
OracleValue coupling_j_oracle(const SpinSite& a, const SpinSite& b, double omega_s,
                              const BandEdgeModel& m, double tolerance = 1e-8);

enum class SpinModel { exchange_xy, general };

struct Anisotropy {
  // Multipliers applied to J_ij for the sigma^x, sigma^y, sigma^z terms of
  // the general model. 1/2 on x and y reproduces the XY exchange form.
  double jx = 0.5;
  double jy = 0.5;
  double jz = 0.0;
};

inline constexpr std::size_t kMaxDenseSpins = 12;

/// H / hbar on the 2^N product space. Site 0 is the most significant bit and
/// bit value 1 means the excited spin state. Throws ValidationError for
/// N > kMaxDenseSpins or a matrix of the wrong shape.
Eigen::MatrixXcd build_spin_hamiltonian(std::size_t n_sites, const CouplingMatrix& cm,
                                        SpinModel model = SpinModel::exchange_xy,
                                        const Anisotropy& anisotropy = {},
                                        bool nearest_neighbour = false);

/// Total excitation number sum_j sigma_ee^j (diagonal, 2^N).
Eigen::VectorXd excitation_number(std::size_t n_sites);

/// Single-excitation block, indexed by the excited site.
Eigen::MatrixXcd single_excitation_block(const Eigen::MatrixXcd& h, std::size_t n_sites);

}  // namespace spinphonon
