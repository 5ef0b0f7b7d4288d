#include <cmath>

#include "spinphonon/simd/kernels.hpp"

namespace spinphonon::simd::scalar {
namespace {

void sincos_ref(std::span<const double> x, std::span<double> s, std::span<double> c) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void two_layer_dispersion_ref(std::span<const double> omega, const TwoLayerCell& cell,
                              std::span<double> out) {
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double p1 = omega[i] * cell.transit1;
    const double p2 = omega[i] * cell.transit2;
    out[i] = std::cos(p1) * std::cos(p2) - cell.mismatch * std::sin(p1) * std::sin(p2);
  }
}

double lorentzian_cosine_sum_ref(std::span<const double> t, std::span<const double> w,
                                 const LorentzianCosine& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    acc += w[i] * std::cos(p.freq * t[i]) / (p.shift + p.curvature * t[i] * t[i]);
  }
  return acc;
}

LorentzianSquaredMoments lorentzian_squared_moments_ref(std::span<const double> t,
                                                        std::span<const double> w,
                                                        double shift, double curvature) {
  LorentzianSquaredMoments m;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double t2 = t[i] * t[i];
    const double inv = 1.0 / (shift + curvature * t2);
    const double wi = w[i] * inv * inv;
    m.zeroth += wi;
    m.second += wi * t2;
  }
  return m;
}

}  // namespace

const KernelTable table{sincos_ref, two_layer_dispersion_ref, lorentzian_cosine_sum_ref,
                        lorentzian_squared_moments_ref};

}  // namespace spinphonon::simd::scalar
