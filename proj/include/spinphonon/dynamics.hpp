#pragma once

// Two-spin dynamics under the exchange Hamiltonian, closed and open.
// Basis {gg, ge, eg, ee}; the first letter is spin 1.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace spinphonon {

using Ket2 = Eigen::Vector4cd;
using Op2 = Eigen::Matrix4cd;

enum BasisIndex : int { kGG = 0, kGE = 1, kEG = 2, kEE = 3 };

Ket2 basis_ket(BasisIndex i);

/// (a1|g> + b1|e>)_1 (a2|g> + b2|e>)_2 without normalization.
Ket2 product_ket(std::complex<double> a1, std::complex<double> b1, std::complex<double> a2,
                 std::complex<double> b2);

struct DensityTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double positivity = 1e-10;
};

class DensityMatrix {
 public:
  DensityMatrix() : rho_(Op2::Zero()) { rho_(0, 0) = 1.0; }
  /// Throws ValidationError unless Hermitian, unit trace and positive.
  explicit DensityMatrix(const Op2& rho, const DensityTolerances& tol = {});
  static DensityMatrix from_ket(const Ket2& psi);
  static DensityMatrix maximally_mixed();
  /// Wraps without validation; for integrator output, checked separately.
  static DensityMatrix unchecked(const Op2& rho);

  const Op2& matrix() const noexcept { return rho_; }
  double trace() const { return rho_.trace().real(); }
  double hermiticity_residual() const;
  double min_eigenvalue() const;
  double population(BasisIndex i) const { return rho_(i, i).real(); }

 private:
  Op2 rho_;
};

/// H / hbar = J (|eg><ge| + |ge><eg|).
Op2 exchange_hamiltonian(double j12);

/// Closed-form exchange evolution: the ge/eg amplitudes rotate as
/// cos(J t) and -i sin(J t); gg and ee are stationary.
Ket2 analytic_exchange_evolution(double j12, double t, const Ket2& initial);

enum class DephasingConvention {
  sigma_z_half,       // c = sqrt(gamma_s) sigma_z / sqrt(2): coherence decays as exp(-gamma_s t)
  excited_projector,  // c = sqrt(gamma_s) |e><e|: coherence decays as exp(-gamma_s t / 2)
};

struct NoiseModel {
  double gamma_s = 0.0;      // dephasing rate per spin, 1/s
  double gamma_relax = 0.0;  // spin relaxation, 1/s
  double gamma_m = 0.0;      // mechanical damping, 1/s
  double n_th = 0.0;
  DephasingConvention convention = DephasingConvention::sigma_z_half;
  bool dephase_both = true;
  bool mechanical_dressing = false;  // adds sin^2(theta) gamma_m as relaxation
  double sin2_theta = 0.0;

  void validate() const;
};

using Liouvillian = Eigen::Matrix<std::complex<double>, 16, 16>;

/// Column-stacked superoperator, d vec(rho)/dt = L vec(rho).
Liouvillian liouvillian(const Op2& h, const NoiseModel& noise);

struct EvolveOptions {
  double trace_abort = 1e-6;
};

/// rho(t) on `t_grid` (non-decreasing, t_grid[0] >= 0, measured from rho0 at
/// t = 0) by exact exponentials of the constant Liouvillian. Throws
/// NumericalError on trace drift above options.trace_abort.
std::vector<DensityMatrix> lindblad_evolve(const Op2& h, const NoiseModel& noise,
                                           const DensityMatrix& rho0,
                                           const std::vector<double>& t_grid,
                                           const EvolveOptions& options = {});

/// Wootters concurrence.
double concurrence(const DensityMatrix& rho);

/// <target| rho |target> for a normalized target.
double transfer_fidelity(const DensityMatrix& rho, const Ket2& target);

/// Image of (a|g> + b|e>)_1 |e>_2 after a full exchange swap J t = pi/2:
/// |e>_1 (-i a|g> + b|e>)_2.
Ket2 state_transfer_target(std::complex<double> a, std::complex<double> b);

/// `points` equally spaced times over `periods` exchange periods pi / J.
std::vector<double> default_time_grid(double j12, int points = 400, double periods = 3.0);

}  // namespace spinphonon
