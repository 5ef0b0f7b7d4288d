#pragma once

// Quasi-1D longitudinal band structure of a periodic layered rod, computed
// with the 2x2 transfer matrix of each layer: cos(k a) = tr(M_cell)/2.

#include <optional>
#include <vector>

#include "spinphonon/materials.hpp"

namespace spinphonon {

struct Layer {
  Material material;
  double thickness = 0.0;  // m
};

struct LatticeGeometry {
  std::vector<Layer> layers;  // one unit cell, in order
  double cross_section = 0.0;  // m^2
  double total_length = 0.0;   // m
  SpeedModel speed_model = SpeedModel::rod;

  double period() const noexcept;
};

/// Throws ValidationError unless every layer is valid, thicknesses are
/// positive, A > 0 and L >= 100 a.
void validate(const LatticeGeometry& g);

/// Right-hand side F(w) of the Bloch condition cos(k a) = F(w).
double dispersion_rhs(double omega, const LatticeGeometry& g);

struct BandSample {
  double k = 0.0;      // rad/m, in [0, pi/a]
  double omega = 0.0;  // rad/s
};

struct Band {
  int index = 0;  // 1-based, ordered by frequency at every k
  std::vector<BandSample> samples;
};

struct BandSolverOptions {
  int scan_points_per_band = 2000;
  double relative_tolerance = 1e-12;
  /// Upper end of the root search (rad/s); 0 selects (n_bands + 2) pi / sum(d_i/v_i).
  double omega_ceiling = 0.0;
};

/// The n_bands lowest Bloch frequencies on a uniform k grid over [0, pi/a].
/// At k = 0 the acoustic branch is the exact root w = 0. Throws NumericalError
/// naming k and the search window if fewer than n_bands roots are found.
std::vector<Band> solve_bands(const LatticeGeometry& g, int n_bands, int k_points,
                              const BandSolverOptions& options = {});

struct BandEdge {
  double omega_be = 0.0;  // rad/s
  double k0 = 0.0;        // rad/m
  double alpha = 0.0;     // rad/s
  double fit_residual = 0.0;  // RMS relative error of the quadratic model
  bool within_tolerance = false;
};

// Quartic curvature alone leaves about 3e-4 on a 10% window of a diamond/Si
// bilayer, so the default sits above that.
inline constexpr double kDefaultEdgeFitTolerance = 1e-3;

/// Number of samples covering `fraction` of the zone next to an edge.
int edge_window_samples(int k_points, double fraction = 0.1);

/// Fits w(k) = w_be - alpha a^2 (k - k0)^2 over the `window` samples nearest
/// the zone edge k0. Without `k0`, the edge at pi/a is used when the band has
/// a maximum there, otherwise k = 0. Throws ValidationError if the chosen edge
/// is a minimum or window < 4.
BandEdge fit_band_edge(const Band& band, double period, int window,
                       std::optional<double> k0 = std::nullopt,
                       double tolerance = kDefaultEdgeFitTolerance);

}  // namespace spinphonon
