#include "spinphonon/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinphonon/error.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {

using cd = std::complex<double>;

Ket2 basis_ket(BasisIndex i) {
  Ket2 k = Ket2::Zero();
  k(i) = 1.0;
  return k;
}

Ket2 product_ket(cd a1, cd b1, cd a2, cd b2) {
  Ket2 k;
  k << a1 * a2, a1 * b2, b1 * a2, b1 * b2;
  return k;
}

DensityMatrix::DensityMatrix(const Op2& rho, const DensityTolerances& tol) : rho_(rho) {
  std::ostringstream msg;
  if (!rho.allFinite()) {
    throw ValidationError("density matrix: non-finite entries");
  }
  if (hermiticity_residual() > tol.hermiticity) {
    msg << "density matrix: Hermiticity residual " << hermiticity_residual();
    throw ValidationError(msg.str());
  }
  if (std::abs(rho.trace() - cd(1.0)) > tol.trace) {
    msg << "density matrix: trace " << rho.trace().real() << " differs from 1";
    throw ValidationError(msg.str());
  }
  if (min_eigenvalue() < -tol.positivity) {
    msg << "density matrix: negative eigenvalue " << min_eigenvalue();
    throw ValidationError(msg.str());
  }
}

DensityMatrix DensityMatrix::from_ket(const Ket2& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw ValidationError("density matrix: zero state vector");
  return DensityMatrix(psi * psi.adjoint() / n);
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Op2::Identity() / 4.0); }

DensityMatrix DensityMatrix::unchecked(const Op2& rho) {
  DensityMatrix d;
  d.rho_ = rho;
  return d;
}

double DensityMatrix::hermiticity_residual() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Op2 herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Op2> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Op2 exchange_hamiltonian(double j12) {
  Op2 h = Op2::Zero();
  h(kEG, kGE) = j12;
  h(kGE, kEG) = j12;
  return h;
}

Ket2 analytic_exchange_evolution(double j12, double t, const Ket2& initial) {
  const double c = std::cos(j12 * t), s = std::sin(j12 * t);
  Ket2 out = initial;
  out(kGE) = c * initial(kGE) - cd(0.0, s) * initial(kEG);
  out(kEG) = c * initial(kEG) - cd(0.0, s) * initial(kGE);
  return out;
}

void NoiseModel::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("noise: ") + name + " must be finite and >= 0");
    }
  };
  check(gamma_s, "gamma_s");
  check(gamma_relax, "gamma_relax");
  check(gamma_m, "gamma_m");
  check(n_th, "n_th");
  if (!(sin2_theta >= 0.0 && sin2_theta <= 1.0)) {
    throw ValidationError("noise: sin2_theta must lie in [0, 1]");
  }
}

namespace {

using Eigen::Matrix2cd;

// vec(A X B) = (B^T kron A) vec(X) with column stacking.
Liouvillian kron_super(const Op2& left, const Op2& right) {
  const Op2 bt = right.transpose();
  Liouvillian out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out.block<4, 4>(4 * r, 4 * c) = bt(r, c) * left;
  }
  return out;
}

Op2 on_site(const Matrix2cd& op, int site) {
  const Matrix2cd id = Matrix2cd::Identity();
  const Matrix2cd& a = site == 0 ? op : id;
  const Matrix2cd& b = site == 0 ? id : op;
  Op2 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

void add_dissipator(Liouvillian& l, const Op2& c) {
  const Op2 cdc = c.adjoint() * c;
  const Op2 id = Op2::Identity();
  l += kron_super(c, c.adjoint()) - 0.5 * kron_super(cdc, id) - 0.5 * kron_super(id, cdc);
}

Eigen::Matrix<cd, 16, 1> vec(const Op2& m) {
  return Eigen::Map<const Eigen::Matrix<cd, 16, 1>>(m.data());
}

Op2 unvec(const Eigen::Matrix<cd, 16, 1>& v) { return Eigen::Map<const Op2>(v.data()); }

}  // namespace

Liouvillian liouvillian(const Op2& h, const NoiseModel& noise) {
  noise.validate();
  const Op2 id = Op2::Identity();
  const cd minus_i(0.0, -1.0);
  Liouvillian l = minus_i * (kron_super(h, id) - kron_super(id, h));

  Matrix2cd sz, see, lower;
  sz << -1.0, 0.0, 0.0, 1.0;  // |e><e| - |g><g| with g first
  see << 0.0, 0.0, 0.0, 1.0;
  lower << 0.0, 1.0, 0.0, 0.0;  // |g><e|

  const int dephased = noise.dephase_both ? 2 : 1;
  for (int site = 0; site < 2; ++site) {
    if (noise.gamma_s > 0.0 && site < dephased) {
      const Matrix2cd c = noise.convention == DephasingConvention::sigma_z_half
                              ? Matrix2cd(std::sqrt(noise.gamma_s / 2.0) * sz)
                              : Matrix2cd(std::sqrt(noise.gamma_s) * see);
      add_dissipator(l, on_site(c, site));
    }
    double relax = noise.gamma_relax;
    if (noise.mechanical_dressing) relax += noise.sin2_theta * noise.gamma_m;
    if (relax > 0.0) {
      add_dissipator(l, on_site(std::sqrt(relax * (noise.n_th + 1.0)) * lower, site));
      if (noise.n_th > 0.0) {
        add_dissipator(l, on_site(std::sqrt(relax * noise.n_th) * lower.adjoint(), site));
      }
    }
  }
  return l;
}

std::vector<DensityMatrix> lindblad_evolve(const Op2& h, const NoiseModel& noise,
                                           const DensityMatrix& rho0,
                                           const std::vector<double>& t_grid,
                                           const EvolveOptions& options) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw ValidationError("lindblad_evolve: Hamiltonian is not Hermitian");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1])) {
      throw ValidationError("lindblad_evolve: time grid must be finite, >= 0 and non-decreasing");
    }
  }
  const Liouvillian l = liouvillian(h, noise);
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());

  Eigen::Matrix<cd, 16, 1> v = vec(rho0.matrix());
  double t_prev = 0.0, dt_cached = -1.0;
  Liouvillian step;
  for (double t : t_grid) {
    const double dt = t - t_prev;
    if (dt > 0.0) {
      // Equal spacing reuses the propagator; compare with a relative slack.
      if (!(std::abs(dt - dt_cached) <= 1e-13 * dt)) {
        step = (l * dt).exp();
        dt_cached = dt;
      }
      v = step * v;
    }
    t_prev = t;
    Op2 rho = unvec(v);
    const double drift = std::abs(rho.trace() - cd(1.0));
    if (drift > options.trace_abort) {
      std::ostringstream msg;
      msg << "lindblad_evolve: trace drift " << drift << " at t = " << t << " s exceeds "
          << options.trace_abort;
      throw NumericalError(msg.str());
    }
    out.push_back(DensityMatrix::unchecked(rho));
  }
  return out;
}

double concurrence(const DensityMatrix& state) {
  // sqrt eigenvalues of rho Y rho* Y are the singular values of W^dagger Y W*
  // for rho = W W^dagger, which stays accurate for rank-deficient states.
  const Op2 rho = 0.5 * (state.matrix() + state.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Op2> es(rho);
  Eigen::Vector4d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Op2 w = es.eigenvectors() * root.asDiagonal();
  Op2 y = Op2::Zero();
  y(kGG, kEE) = -1.0;
  y(kEE, kGG) = -1.0;
  y(kGE, kEG) = 1.0;
  y(kEG, kGE) = 1.0;
  const Op2 b = w.adjoint() * y * w.conjugate();
  Eigen::JacobiSVD<Op2> svd(b);
  const Eigen::Vector4d s = svd.singularValues();  // decreasing
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

double transfer_fidelity(const DensityMatrix& rho, const Ket2& target) {
  const double n = target.squaredNorm();
  if (!(n > 0.0)) throw ValidationError("transfer_fidelity: zero target state");
  const double f = (target.adjoint() * rho.matrix() * target)(0, 0).real() / n;
  return std::clamp(f, 0.0, 1.0);
}

Ket2 state_transfer_target(cd a, cd b) {
  return product_ket(0.0, 1.0, cd(0.0, -1.0) * a, b);
}

std::vector<double> default_time_grid(double j12, int points, double periods) {
  if (!(j12 > 0.0)) throw ValidationError("time grid: J12 must be positive");
  if (points < 2) throw ValidationError("time grid: at least two points required");
  const double t_max = periods * kPi / j12;
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (points - 1);
  return t;
}

}  // namespace spinphonon
