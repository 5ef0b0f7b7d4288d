// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "spinphonon/bandstructure.hpp"
#include "spinphonon/boundstate.hpp"
#include "spinphonon/config.hpp"
#include "spinphonon/dynamics.hpp"
#include "spinphonon/materials.hpp"
#include "spinphonon/pipeline.hpp"
#include "spinphonon/siv.hpp"
#include "spinphonon/spinspin.hpp"
#include "spinphonon/units.hpp"

using namespace spinphonon;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the sub-checks of one criterion; the criterion passes only if all do.
class Criterion {
 public:
  explicit Criterion(std::string id) : id_(std::move(id)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failed_.push_back(what);
    }
    details_.push_back((ok ? "  ok   " : "  FAIL ") + what);
  }

  bool report() const {
    std::printf("%s %s\n", id_.c_str(), pass_ ? "PASS" : "FAIL");
    for (const auto& d : details_) std::printf("%s\n", d.c_str());
    return pass_;
  }

 private:
  std::string id_;
  bool pass_ = true;
  std::vector<std::string> details_;
  std::vector<std::string> failed_;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool guarded(Criterion& c, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  return c.report();
}

bool ac1() {
  Criterion c("AC1");
  return guarded(c, [&] {
    const auto t0 = Clock::now();
    const HeadlineNumbers h = compute_headline(default_config());
    const double elapsed = seconds_since(t0);
    const double gc = angular_to_hz(h.bound_state.g_c);
    const double lam = angular_to_hz(h.lambda_eff);
    c.check(rel(gc, 21.2e6) <= 0.02, fmt("g_c/2pi = %.6g Hz vs 21.2 MHz +-2%%", gc));
    c.check(rel(lam, 1.27e6) <= 0.02, fmt("lambda_eff/2pi = %.6g Hz vs 1.27 MHz +-2%%", lam));
    const double tau = kPi / (4.0 * h.lambda_eff);
    c.check(std::abs(tau - h.tau_epr) <= 1e-12 * tau && tau <= 1e-6,
            fmt("tau_EPR = %.4g s <= 1 us", tau));
    c.check(elapsed < 1.0, fmt("runtime %.3g s < 1 s", elapsed));
  });
}

bool ac2() {
  Criterion c("AC2");
  return guarded(c, [&] {
    BareCouplingInput in;
    in.sound_speed = kDiamondQuotedSoundSpeed;
    in.omega_be = hz_to_angular(45.5e9);
    in.density = diamond().density;
    in.period = 150e-9;
    in.cross_section = 100e-9 * 20e-9;
    const StrainSusceptibilities s = default_strain_susceptibilities();
    in.normalization = CouplingNormalization::two_pi;
    const double two_pi_norm = angular_to_hz(bare_coupling_g(s, in));
    in.normalization = CouplingNormalization::pi;
    const double pi_norm = angular_to_hz(bare_coupling_g(s, in));
    c.check(two_pi_norm >= 120e6 && two_pi_norm <= 130e6,
            fmt("2pi-normalized g/2pi = %.6g Hz in [120, 130] MHz", two_pi_norm));
    c.check(pi_norm >= 170e6 && pi_norm <= 180e6,
            fmt("pi-normalized g/2pi = %.6g Hz in [170, 180] MHz", pi_norm));
  });
}

struct Chain {
  BandEdgeModel band;
  double g_eff = 0.0;
  double g_alpha = 0.0;
};

Chain headline_chain() {
  const PhysicsChain pc = resolve_chain(default_config());
  return {pc.band, pc.g_eff, pc.g_alpha};
}

bool ac3() {
  Criterion c("AC3");
  return guarded(c, [&] {
    const Chain ch = headline_chain();
    auto solve = [&](double d) { return solve_bound_state(ch.band, ch.g_eff, d * ch.g_alpha); };

    const BoundState zero = solve(0.0);
    c.check(std::abs(zero.p_e - 2.0 / 3.0) <= 1e-9, fmt("P_e(0) = %.15f vs 2/3", zero.p_e));
    const double x0 = zero.gap_offset / ch.g_alpha;
    c.check(rel(x0, std::cbrt(4.0)) <= 1e-9, fmt("x(0)/g_alpha = %.15f vs 2^(2/3)", x0));

    const BoundState low = solve(-50.0);
    const double ratio = low.gap_offset / std::abs(low.detuning_be);
    c.check(ratio < 0.02, fmt("x/|Delta_BE| = %.3g < 0.02 at -50 g_alpha", ratio));

    const BoundState high = solve(50.0);
    const double excess = (high.gap_offset - high.detuning_be) / ch.g_alpha;
    c.check(excess < 0.05,
            fmt("Omega_b - w_BE - Delta_BE = %.6f g_alpha < 0.05 at +50 g_alpha", excess));

    bool pe = true, lc = true, gc = true;
    BoundState prev = solve(-50.0);
    for (int i = 1; i < 200; ++i) {
      const BoundState bs = solve(-50.0 + 100.0 * i / 199.0);
      pe = pe && bs.p_e > prev.p_e;
      lc = lc && bs.l_c < prev.l_c;
      gc = gc && bs.g_c > prev.g_c;
      prev = bs;
    }
    c.check(pe, "P_e increasing over 200 points");
    c.check(lc, "L_c decreasing over 200 points");
    c.check(gc, "g_c increasing over 200 points");
  });
}

bool ac4() {
  Criterion c("AC4");
  return guarded(c, [&] {
    const Chain ch = headline_chain();
    const auto t0 = Clock::now();
    for (double d : {20.0, 43.0, 100.0}) {
      const BoundState bs = solve_bound_state(ch.band, ch.g_eff, d * ch.g_alpha);
      const double lam = lambda_eff(bs.g_c, bs.detuning_be);
      std::vector<double> seps, logj;
      double worst = 0.0;
      for (int n = 0; n <= 3; ++n) {
        const SpinSite a{0.0, ch.g_eff}, b{n * bs.l_c, ch.g_eff};
        const double closed = coupling_j(a, b, lam, bs.l_c);
        const double oracle = coupling_j_oracle(a, b, bs.omega_s, ch.band).value;
        worst = std::max(worst, rel(oracle, closed));
        seps.push_back(b.position);
        logj.push_back(std::log(oracle));
      }
      c.check(worst <= 0.05, fmt("Delta_BE = %g g_alpha: max |J_k - J|/J = %.4g <= 5%%", d, worst));
      if (d == 43.0) {
        Eigen::MatrixXd design(seps.size(), 2);
        Eigen::VectorXd rhs(seps.size());
        for (std::size_t i = 0; i < seps.size(); ++i) {
          design(i, 0) = 1.0;
          design(i, 1) = seps[i];
          rhs(i) = logj[i];
        }
        const Eigen::VectorXd fit = design.colPivHouseholderQr().solve(rhs);
        const double slope = fit(1) * bs.l_c;
        c.check(std::abs(slope + 1.0) <= 0.01,
                fmt("log-linear slope of quadrature J = %.5f / L_c vs -1 within 1%%", slope));
      }
    }
    const double elapsed = seconds_since(t0);
    c.check(elapsed < 5.0, fmt("runtime %.3g s < 5 s", elapsed));
  });
}

bool ac5() {
  Criterion c("AC5");
  return guarded(c, [&] {
    const Chain ch = headline_chain();
    const BoundState bs = solve_bound_state(ch.band, ch.g_eff, 43.0 * ch.g_alpha);
    const CkSpectrum sp =
        ck_spectrum(bs, ch.band, ch.g_eff, band_edge_k_grid(bs, ch.band), 0.0, 1.0);
    c.check(std::abs(sp.norm - 1.0) <= 1e-6, fmt("integral |c_k|^2 = 1 %+.3g", sp.norm - 1.0));
    double worst = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double x = bs.l_c * (-3.0 + 6.0 * i / 60.0);
      worst = std::max(worst, rel(envelope_by_mode_sum(x, 0.0, bs, ch.band),
                                  envelope(x, 0.0, bs, ch.band)));
    }
    c.check(worst <= 0.05, fmt("mode-sum envelope vs closed form: max rel error %.3g <= 5%%", worst));
  });
}

double trajectory_max_concurrence(double j12, double gamma_s, double* trace_drift,
                                  double* min_eig) {
  NoiseModel noise;
  noise.gamma_s = gamma_s;
  const auto traj = lindblad_evolve(exchange_hamiltonian(j12), noise,
                                    DensityMatrix::from_ket(basis_ket(kGE)), default_time_grid(j12));
  double best = 0.0;
  for (const auto& r : traj) {
    best = std::max(best, concurrence(r));
    *trace_drift = std::max(*trace_drift, std::abs(r.trace() - 1.0));
    *min_eig = std::min(*min_eig, r.min_eigenvalue());
  }
  return best;
}

bool ac6() {
  Criterion c("AC6");
  return guarded(c, [&] {
    const HeadlineNumbers h = compute_headline(default_config());
    const BoundState& bs = h.bound_state;
    const SpinSite origin{0.0, h.chain.g_eff};
    const double j_ideal = coupling_j(origin, SpinSite{0.0, h.chain.g_eff}, h.lambda_eff, bs.l_c);

    const double t_epr = kPi / (4.0 * j_ideal);
    const auto ideal = lindblad_evolve(exchange_hamiltonian(j_ideal), NoiseModel{},
                                       DensityMatrix::from_ket(basis_ket(kGE)), {0.0, t_epr});
    const double c_epr = concurrence(ideal.back());
    c.check(std::abs(c_epr - 1.0) <= 1e-9, fmt("C(pi/4J) = 1 %+.3g", c_epr - 1.0));

    const double gamma = 0.1 * h.lambda_eff;
    double drift = 0.0, min_eig = 1.0;
    const double j_near = coupling_j(origin, {0.1 * bs.l_c, h.chain.g_eff}, h.lambda_eff, bs.l_c);
    const double j_far = coupling_j(origin, {1.5 * bs.l_c, h.chain.g_eff}, h.lambda_eff, bs.l_c);
    const double c_near = trajectory_max_concurrence(j_near, gamma, &drift, &min_eig);
    const double c_far = trajectory_max_concurrence(j_far, gamma, &drift, &min_eig);
    c.check(c_far < c_near, fmt("C_max(1.5 L_c) = %.6f < C_max(0.1 L_c) = %.6f", c_far, c_near));
    c.check(drift < 1e-9, fmt("trace drift %.3g < 1e-9", drift));
    c.check(min_eig >= -1e-10, fmt("min eigenvalue %.3g >= -1e-10", min_eig));

    const auto grid = default_time_grid(j_near);
    const Ket2 psi0 = product_ket(1.0, 0.0, 0.0, 1.0);
    const auto closed = lindblad_evolve(exchange_hamiltonian(j_near), NoiseModel{},
                                        DensityMatrix::from_ket(psi0), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Ket2 psi = analytic_exchange_evolution(j_near, grid[i], psi0);
      worst = std::max(worst, (closed[i].matrix() - psi * psi.adjoint()).cwiseAbs().maxCoeff());
    }
    c.check(worst <= 1e-9, fmt("closed-system limit vs analytic: %.3g <= 1e-9", worst));
  });
}

LatticeGeometry bilayer(const Material& m1, const Material& m2) {
  LatticeGeometry g;
  g.layers = {{m1, 75e-9}, {m2, 75e-9}};
  g.cross_section = 2e-15;
  g.total_length = 1e-4;
  return g;
}

bool ac7() {
  Criterion c("AC7");
  return guarded(c, [&] {
    const Material d = diamond();
    const double v = 0.5 * rod_sound_speed(d);
    const double rho = 2.0 * d.density;
    const Material twin{"twin", rho * v * v, 0.2, rho};
    const auto matched = solve_bands(bilayer(d, twin), 2, 101);
    const double lo = matched[0].samples.back().omega, hi = matched[1].samples.back().omega;
    c.check(std::abs(hi - lo) <= 1e-9 * hi,
            fmt("impedance-matched gap / w = %.3g (zero to 1e-9)", std::abs(hi - lo) / hi));

    const LatticeGeometry ds = bilayer(d, silicon());
    const auto bands = solve_bands(ds, 4, 101);
    const double gap = bands[1].samples.back().omega - bands[0].samples.back().omega;
    c.check(gap > 0.0, fmt("diamond/Si lowest zone-edge gap/2pi = %.6g Hz > 0", angular_to_hz(gap)));

    const double a = ds.period();
    double worst = 0.0;
    for (const Band& b : bands) {
      for (const BandSample& s : b.samples) {
        worst = std::max(worst, std::abs(dispersion_rhs(s.omega, ds) - std::cos(s.k * a)));
      }
    }
    c.check(worst < 1e-9, fmt("Bloch residual max %.3g < 1e-9", worst));

    Band synthetic;
    synthetic.index = 1;
    const double w0 = hz_to_angular(45.5e9), alpha = hz_to_angular(3.5e9);
    for (int i = 0; i < 101; ++i) {
      const double k = (kPi / a) * i / 100.0;
      const double q = a * k - kPi;
      synthetic.samples.push_back({k, w0 - alpha * q * q});
    }
    const BandEdge e = fit_band_edge(synthetic, a, edge_window_samples(101));
    const double fit_err = std::max(rel(e.omega_be, w0), rel(e.alpha, alpha));
    c.check(fit_err <= 1e-12, fmt("synthetic quadratic fit recovery %.3g <= 1e-12", fit_err));

    const double speed = rod_sound_speed(d);
    c.check(rel(speed, kDiamondQuotedSoundSpeed) <= 0.01,
            fmt("diamond rod speed %.6g m/s within 1%% of 1.71e4", speed));
  });
}

bool ac8() {
  Criterion c("AC8");
  return guarded(c, [&] {
    for (double b : {0.0, 0.1, 1.0}) {
      SivParams p = default_siv_params();
      p.b_field = b;
      const SivEigensystem es = siv_eigensystem(p);
      const auto cf = testsupport::siv_closed_form(p.lambda_so, 0.0, 0.0, p.gamma_spin * b);
      const double expected[4] = {cf.e_g, cf.e_e, cf.e_f, cf.e_d};
      double worst = 0.0;
      for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(es.energies[i] - expected[i]));
      c.check(worst <= 1e-14 * p.lambda_so,
              fmt("B = %g T: energies vs closed form, max |dE|/lambda = %.3g", b, worst / p.lambda_so));
      Eigen::Matrix4cd u;
      for (int i = 0; i < 4; ++i) u.col(i) = es.states[i];
      const double ortho = (u.adjoint() * u - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
      c.check(ortho < 1e-12, fmt("B = %g T: orthonormality residual %.3g < 1e-12", b, ortho));
    }
    const double delta = angular_to_hz(siv_eigensystem(default_siv_params()).delta);
    c.check(rel(delta, 46e9) <= 1e-12, fmt("doublet splitting %.12g Hz = 46 GHz", delta));
  });
}

}  // namespace

int main() {
  bool all = true;
  for (auto* criterion : {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8}) all = criterion() && all;
  return all ? 0 : 1;
}
