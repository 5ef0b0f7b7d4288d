#include "spinphonon/bandstructure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "spinphonon/error.hpp"
#include "spinphonon/simd/kernels.hpp"
#include "spinphonon/units.hpp"

namespace spinphonon {
namespace {

struct LayerWave {
  double transit = 0.0;    // d / v
  double impedance = 0.0;  // rho v A
};

std::vector<LayerWave> layer_waves(const LatticeGeometry& g) {
  std::vector<LayerWave> out;
  out.reserve(g.layers.size());
  for (const Layer& l : g.layers) {
    const double v = sound_speed(l.material, g.speed_model);
    out.push_back({l.thickness / v, l.material.density * v * g.cross_section});
  }
  return out;
}

// Half trace of the cell transfer matrix acting on (u, N), N the axial force.
double half_trace(double omega, const std::vector<LayerWave>& waves) {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  for (const LayerWave& w : waves) {
    const double phase = omega * w.transit;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    // Layer matrix [[c, s/(Z w)], [-Z w s, c]]; the common factor w is
    // scaled out of the force row, which leaves the trace unchanged.
    const double z = w.impedance;
    const std::array<double, 4> layer{c, s / z, -z * s, c};
    m = {layer[0] * m[0] + layer[1] * m[2], layer[0] * m[1] + layer[1] * m[3],
         layer[2] * m[0] + layer[3] * m[2], layer[2] * m[1] + layer[3] * m[3]};
  }
  return 0.5 * (m[0] + m[3]);
}

struct Bracket {
  double lo;
  double hi;
};

template <class F>
double bisect(F&& h, double lo, double hi, double h_lo, double rel_tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(hi), std::abs(lo))) break;
    const double h_mid = h(mid);
    if (h_mid == 0.0) return mid;
    if ((h_mid < 0.0) == (h_lo < 0.0)) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Location of the extremum of `sign * h` (a minimum) inside [lo, hi].
template <class F>
double golden_minimum(F&& h, double sign, double lo, double hi, double rel_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = sign * h(c);
  double fd = sign * h(d);
  for (int it = 0; it < 200 && (b - a) > rel_tol * std::abs(b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = sign * h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = sign * h(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double LatticeGeometry::period() const noexcept {
  double a = 0.0;
  for (const Layer& l : layers) a += l.thickness;
  return a;
}

void validate(const LatticeGeometry& g) {
  if (g.layers.empty()) throw ValidationError("geometry: at least one layer is required");
  for (const Layer& l : g.layers) {
    validate(l.material);
    if (!(l.thickness > 0.0)) {
      throw ValidationError("geometry: layer thickness must be positive");
    }
  }
  if (!(g.cross_section > 0.0)) throw ValidationError("geometry: cross_section must be positive");
  if (!(g.total_length >= 100.0 * g.period())) {
    throw ValidationError("geometry: total_length must be at least 100 periods");
  }
}

double dispersion_rhs(double omega, const LatticeGeometry& g) {
  return half_trace(omega, layer_waves(g));
}

std::vector<Band> solve_bands(const LatticeGeometry& g, int n_bands, int k_points,
                              const BandSolverOptions& options) {
  validate(g);
  if (n_bands < 1) throw ValidationError("solve_bands: n_bands must be >= 1");
  if (k_points < 16) throw ValidationError("solve_bands: k_points must be >= 16");

  const std::vector<LayerWave> waves = layer_waves(g);
  double total_transit = 0.0;
  for (const LayerWave& w : waves) total_transit += w.transit;
  const double a = g.period();
  const double ceiling = options.omega_ceiling > 0.0
                             ? options.omega_ceiling
                             : (n_bands + 2) * kPi / total_transit;
  const int n_scan = std::max(64, options.scan_points_per_band * (n_bands + 2));
  const double rel_tol = options.relative_tolerance;

  // F on the scan grid is shared by every k.
  std::vector<double> grid(static_cast<std::size_t>(n_scan) + 1);
  for (int i = 0; i <= n_scan; ++i) grid[i] = ceiling * i / n_scan;
  std::vector<double> f(grid.size());
  if (waves.size() == 2) {
    const double r = waves[0].impedance / waves[1].impedance;
    simd::two_layer_dispersion(grid, {waves[0].transit, waves[1].transit, 0.5 * (r + 1.0 / r)}, f);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = half_trace(grid[i], waves);
  }
  const auto exact_f = [&](double w) { return half_trace(w, waves); };

  std::vector<Band> bands(static_cast<std::size_t>(n_bands));
  for (int n = 0; n < n_bands; ++n) {
    bands[n].index = n + 1;
    bands[n].samples.reserve(static_cast<std::size_t>(k_points));
  }

  std::vector<double> h(grid.size());
  std::vector<double> roots;
  for (int j = 0; j < k_points; ++j) {
    const double k = (kPi / a) * j / (k_points - 1);
    const double target = j == k_points - 1 ? -1.0 : std::cos(k * a);
    const auto hfun = [&](double w) { return exact_f(w) - target; };
    for (std::size_t i = 0; i < grid.size(); ++i) h[i] = f[i] - target;

    roots.clear();
    if (j == 0) roots.push_back(0.0);  // acoustic branch, F(0) = 1 exactly
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double h0 = h[i];
      const double h1 = h[i + 1];
      if (i == 0 && j == 0) continue;
      if (h1 == 0.0) {
        roots.push_back(grid[i + 1]);
        // A zero that touches without crossing is a double root.
        if (i + 2 < grid.size() && h0 != 0.0 && (h0 < 0.0) == (h[i + 2] < 0.0)) {
          roots.push_back(grid[i + 1]);
        }
        continue;
      }
      if (h0 != 0.0 && (h0 < 0.0) != (h1 < 0.0)) {
        roots.push_back(bisect(hfun, grid[i], grid[i + 1], h0, rel_tol));
        continue;
      }
      // Extremum of h at an interior scan point pointing at zero: a tangency
      // (double root) or a pair of roots closer together than the scan step.
      if (i == 0 || i + 1 >= grid.size()) continue;
      const double hp = h[i - 1];
      if (hp == 0.0 || h0 == 0.0) continue;
      const bool same_sign = (hp < 0.0) == (h0 < 0.0) && (h0 < 0.0) == (h1 < 0.0);
      const bool toward_zero = std::abs(h0) < std::abs(hp) && std::abs(h0) <= std::abs(h1);
      if (!same_sign || !toward_zero) continue;
      const double sign = h0 > 0.0 ? 1.0 : -1.0;
      const double w_ext = golden_minimum(hfun, sign, grid[i - 1], grid[i + 1], 1e-15);
      const double h_ext = hfun(w_ext);
      if (std::abs(h_ext) <= 1e-12) {
        roots.push_back(w_ext);
        roots.push_back(w_ext);
      } else if ((h_ext < 0.0) != (h0 < 0.0)) {
        roots.push_back(bisect(hfun, grid[i - 1], w_ext, hp, rel_tol));
        roots.push_back(bisect(hfun, w_ext, grid[i + 1], h_ext, rel_tol));
      }
    }
    std::sort(roots.begin(), roots.end());
    if (roots.size() < static_cast<std::size_t>(n_bands)) {
      std::ostringstream msg;
      msg << "solve_bands: found " << roots.size() << " of " << n_bands
          << " roots at k = " << k << " rad/m within [0, " << ceiling << "] rad/s";
      throw NumericalError(msg.str());
    }
    for (int n = 0; n < n_bands; ++n) bands[n].samples.push_back({k, roots[n]});
  }
  return bands;
}

int edge_window_samples(int k_points, double fraction) {
  return std::max(4, static_cast<int>(std::lround(fraction * (k_points - 1))) + 1);
}

BandEdge fit_band_edge(const Band& band, double period, int window, std::optional<double> k0,
                       double tolerance) {
  const auto& s = band.samples;
  if (window < 4) throw ValidationError("fit_band_edge: window must be >= 4 samples");
  if (s.size() < static_cast<std::size_t>(window)) {
    throw ValidationError("fit_band_edge: band has fewer samples than the window");
  }
  const double zone_edge = kPi / period;
  const bool max_at_edge = s[s.size() - 1].omega >= s[s.size() - 2].omega;
  const bool max_at_centre = s[0].omega >= s[1].omega;

  bool use_zone_edge;
  if (k0) {
    if (std::abs(*k0 - zone_edge) <= 1e-9 * zone_edge) {
      use_zone_edge = true;
    } else if (std::abs(*k0) <= 1e-9 * zone_edge) {
      use_zone_edge = false;
    } else {
      throw ValidationError("fit_band_edge: k0 must be 0 or pi/a");
    }
    if (use_zone_edge ? !max_at_edge : !max_at_centre) {
      throw ValidationError("fit_band_edge: band has a minimum at the requested edge");
    }
  } else if (max_at_edge) {
    use_zone_edge = true;
  } else if (max_at_centre) {
    use_zone_edge = false;
  } else {
    throw ValidationError("fit_band_edge: band edge is a minimum at both k = 0 and k = pi/a");
  }

  const std::size_t w = static_cast<std::size_t>(window);
  const std::size_t first = use_zone_edge ? s.size() - w : 0;
  const double edge_k = use_zone_edge ? zone_edge : 0.0;

  // Quadratic in the dimensionless offset q = a (k - k0); the linear term
  // absorbs any slope so that a band without curvature yields alpha = 0.
  Eigen::MatrixXd design(w, 3);
  Eigen::VectorXd rhs(w);
  for (std::size_t i = 0; i < w; ++i) {
    const double q = period * (s[first + i].k - edge_k);
    design(i, 0) = 1.0;
    design(i, 1) = q;
    design(i, 2) = q * q;
    rhs(i) = s[first + i].omega;
  }
  const double scale = rhs.cwiseAbs().maxCoeff() > 0.0 ? rhs.cwiseAbs().maxCoeff() : 1.0;
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs / scale) * scale;

  BandEdge edge;
  edge.omega_be = c(0);
  edge.k0 = edge_k;
  edge.alpha = -c(2);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double q = period * (s[first + i].k - edge_k);
    const double model = edge.omega_be - edge.alpha * q * q;
    const double ref = s[first + i].omega;
    const double rel = (model - ref) / (ref != 0.0 ? ref : scale);
    sum_sq += rel * rel;
  }
  edge.fit_residual = std::sqrt(sum_sq / static_cast<double>(w));
  edge.within_tolerance = edge.fit_residual <= tolerance && edge.alpha > 0.0;
  return edge;
}

}  // namespace spinphonon
