#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "spinphonon/dynamics.hpp"
#include "spinphonon/error.hpp"

using namespace spinphonon;
using cd = std::complex<double>;

namespace {

constexpr double kJ = 2 * testsupport::kPi * 1.26e6;

double max_concurrence(double j12, double gamma_s, double t_max, int points = 400) {
  NoiseModel noise;
  noise.gamma_s = gamma_s;
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = t_max * i / (points - 1);
  const auto traj =
      lindblad_evolve(exchange_hamiltonian(j12), noise, DensityMatrix::from_ket(basis_ket(kGE)), t);
  double best = 0.0;
  for (const auto& r : traj) best = std::max(best, concurrence(r));
  return best;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("density matrix validation") {
    CHECK_NOTHROW(DensityMatrix::maximally_mixed());
    Op2 bad = Op2::Identity() / 2.0;
    CHECK_THROWS_AS(DensityMatrix{bad}, ValidationError);
    Op2 nonherm = Op2::Identity() / 4.0;
    nonherm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{nonherm}, ValidationError);
    Op2 negative = Op2::Zero();
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{negative}, ValidationError);
    CHECK_THROWS_AS(DensityMatrix::from_ket(Ket2::Zero()), ValidationError);
  }

  TEST_CASE("analytic exchange evolution") {
    const Ket2 ge = basis_ket(kGE);
    CHECK((analytic_exchange_evolution(kJ, 0.0, ge) - ge).norm() == 0.0);
    const Ket2 epr = analytic_exchange_evolution(kJ, testsupport::kPi / (4 * kJ), ge);
    Ket2 expected = Ket2::Zero();
    expected(kGE) = 1.0 / std::sqrt(2.0);
    expected(kEG) = cd(0.0, -1.0 / std::sqrt(2.0));
    CHECK((epr - expected).norm() < 1e-15);
    CHECK(std::abs(concurrence(DensityMatrix::from_ket(epr)) - 1.0) < 1e-12);

    const cd a(0.6, 0.0), b(0.0, 0.8);
    const Ket2 in = product_ket(a, b, 0.0, 1.0);
    const Ket2 out = analytic_exchange_evolution(kJ, testsupport::kPi / (2 * kJ), in);
    CHECK(std::abs(transfer_fidelity(DensityMatrix::from_ket(out), state_transfer_target(a, b)) - 1.0) <
          1e-14);
  }

  TEST_CASE("concurrence reference states") {
    CHECK(concurrence(DensityMatrix::from_ket(basis_ket(kGE))) < 1e-15);
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
      const double expected = std::max(0.0, (3 * p - 1) / 2);
      const DensityMatrix w(testsupport::werner(p));
      CAPTURE(p);
      CHECK(concurrence(w) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
      CHECK(testsupport::wootters_bruteforce(w.matrix()) ==
            doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("property: concurrence agrees with the direct eigenvalue formula") {
    testsupport::Gen gen(0x636f6e63);
    for (int trial = 0; trial < 300; ++trial) {
      const int rank = 1 + trial % 4;
      const DensityMatrix rho(gen.density_matrix(rank));
      const double c = concurrence(rho);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0 + 1e-12);
      CHECK(c == doctest::Approx(testsupport::wootters_bruteforce(rho.matrix())).epsilon(1e-7).scale(1.0));
    }
    for (int trial = 0; trial < 100; ++trial) {
      // Local unitaries leave product states separable.
      const Ket2 k = product_ket(gen.complex_normal(), gen.complex_normal(), gen.complex_normal(),
                                 gen.complex_normal());
      CHECK(concurrence(DensityMatrix::from_ket(k)) < 1e-12);
    }
  }

  TEST_CASE("transfer fidelity") {
    const Ket2 t = state_transfer_target(0.6, 0.8);
    CHECK(transfer_fidelity(DensityMatrix::from_ket(t), t) == doctest::Approx(1.0));
    CHECK(transfer_fidelity(DensityMatrix::maximally_mixed(), t) == doctest::Approx(0.25));
  }

  TEST_CASE("closed-system limit reproduces the analytic populations") {
    const std::vector<double> t = default_time_grid(kJ);
    CHECK(t.size() == 400);
    CHECK(t.back() == doctest::Approx(3 * testsupport::kPi / kJ));
    const auto traj = lindblad_evolve(exchange_hamiltonian(kJ), NoiseModel{},
                                      DensityMatrix::from_ket(basis_ket(kGE)), t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double c = std::cos(kJ * t[i]);
      CHECK(std::abs(traj[i].population(kGE) - c * c) < 1e-9);
      CHECK(std::abs(traj[i].population(kEG) - (1 - c * c)) < 1e-9);
    }
    const auto at_epr = lindblad_evolve(exchange_hamiltonian(kJ), NoiseModel{},
                                        DensityMatrix::from_ket(basis_ket(kGE)),
                                        {testsupport::kPi / (4 * kJ)});
    CHECK(std::abs(concurrence(at_epr[0]) - 1.0) < 1e-9);
  }

  TEST_CASE("single-qubit dephasing rate under each convention") {
    // Spin 1 in |+>, spin 2 in |g>: coherence sits in rho(gg, eg).
    const Ket2 plus = product_ket(1.0, 1.0, 1.0, 0.0).normalized();
    const double gamma = 1e5;
    for (auto conv : {DephasingConvention::sigma_z_half, DephasingConvention::excited_projector}) {
      NoiseModel n;
      n.gamma_s = gamma;
      n.convention = conv;
      const std::vector<double> t{0.0, 1e-6, 5e-6, 2e-5};
      const auto traj = lindblad_evolve(Op2::Zero(), n, DensityMatrix::from_ket(plus), t);
      const double rate = conv == DephasingConvention::sigma_z_half ? gamma : gamma / 2;
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(traj[i].matrix()(kGG, kEG)) ==
              doctest::Approx(0.5 * std::exp(-rate * t[i])).epsilon(1e-12));
        CHECK(traj[i].population(kGG) == doctest::Approx(0.5).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("integrator agrees with the Liouvillian eigendecomposition") {
    NoiseModel n;
    n.gamma_s = 0.1 * kJ;
    n.gamma_relax = 0.03 * kJ;
    n.n_th = 0.2;
    const Op2 h = exchange_hamiltonian(kJ);
    const Liouvillian l = liouvillian(h, n);
    const DensityMatrix rho0(testsupport::Gen(7).density_matrix());
    const Eigen::Matrix<cd, 16, 1> v0 = Eigen::Map<const Eigen::Matrix<cd, 16, 1>>(rho0.matrix().data());
    const std::vector<double> t{0.3 / kJ, 1.0 / kJ, 4.0 / kJ};
    const auto traj = lindblad_evolve(h, n, rho0, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto v = testsupport::propagate_by_eigendecomposition(l, v0, t[i]);
      const Op2 ref = Eigen::Map<const Op2>(v.data());
      CHECK((traj[i].matrix() - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("property: trace, Hermiticity and positivity along noisy trajectories") {
    testsupport::Gen gen(0x6c696e64);
    for (int trial = 0; trial < 10; ++trial) {
      NoiseModel n;
      n.gamma_s = gen.uniform(0.0, 0.5) * kJ;
      n.gamma_relax = gen.uniform(0.0, 0.1) * kJ;
      n.dephase_both = trial % 2 == 0;
      const DensityMatrix rho0(gen.density_matrix(1 + trial % 4));
      const auto traj = lindblad_evolve(exchange_hamiltonian(kJ), n, rho0, default_time_grid(kJ, 120));
      for (const auto& r : traj) {
        CHECK(std::abs(r.trace() - 1.0) < 1e-9);
        CHECK(r.hermiticity_residual() < 1e-10);
        CHECK(r.min_eigenvalue() >= -1e-10);
      }
    }
  }

  TEST_CASE("dephasing cannot increase the best concurrence") {
    const double t_max = 3 * testsupport::kPi / kJ;
    double prev = 1.0 + 1e-12;
    for (double ratio : {0.0, 0.05, 0.1, 0.2}) {
      const double c = max_concurrence(kJ, ratio * kJ, t_max);
      CAPTURE(ratio);
      CHECK(c <= prev);
      prev = c;
    }
  }

  TEST_CASE("distance dependence of entanglement under dephasing") {
    const double lam = kJ, gamma = 0.1 * lam;
    const double near_j = lam * std::exp(-0.1), far_j = lam * std::exp(-1.5);
    const double c_near = max_concurrence(near_j, gamma, 3 * testsupport::kPi / near_j);
    const double c_far = max_concurrence(far_j, gamma, 3 * testsupport::kPi / far_j);
    CHECK(c_near < 1.0);
    CHECK(c_far < c_near);

    NoiseModel n;
    n.gamma_s = gamma;
    const Ket2 psi = product_ket(1.0, 0.0, 0.0, 1.0);
    const Ket2 target = state_transfer_target(1.0, 0.0);
    auto fidelity = [&](double j) {
      const auto r = lindblad_evolve(exchange_hamiltonian(j), n, DensityMatrix::from_ket(psi),
                                     {testsupport::kPi / (2 * j)});
      return transfer_fidelity(r[0], target);
    };
    CHECK(fidelity(far_j) < fidelity(near_j));
  }

  TEST_CASE("mechanical dressing adds excited-state decay") {
    NoiseModel n;
    n.gamma_m = 1e4;
    n.mechanical_dressing = true;
    n.sin2_theta = 0.5;
    const auto r = lindblad_evolve(Op2::Zero(), n, DensityMatrix::from_ket(basis_ket(kEE)), {1e-4});
    // Each spin decays at sin^2(theta) gamma_m.
    CHECK(r[0].population(kEE) == doctest::Approx(std::exp(-2 * 0.5 * 1e4 * 1e-4)).epsilon(1e-12));
  }

  TEST_CASE("invalid evolution inputs") {
    NoiseModel n;
    n.gamma_s = -1.0;
    CHECK_THROWS_AS(lindblad_evolve(Op2::Zero(), n, DensityMatrix{}, {0.0}), ValidationError);
    CHECK_THROWS_AS(lindblad_evolve(Op2::Zero(), NoiseModel{}, DensityMatrix{}, {1.0, 0.5}),
                    ValidationError);
    Op2 h = Op2::Zero();
    h(0, 1) = 1.0;
    CHECK_THROWS_AS(lindblad_evolve(h, NoiseModel{}, DensityMatrix{}, {0.0}), ValidationError);
    CHECK_THROWS_AS(default_time_grid(0.0), ValidationError);
    EvolveOptions strict;
    strict.trace_abort = -1.0;  // any drift at all trips the guard
    CHECK_THROWS_WITH_AS(lindblad_evolve(Op2::Zero(), NoiseModel{}, DensityMatrix{}, {0.0}, strict),
                         doctest::Contains("trace drift"), NumericalError);
  }
}
