#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, where the build and CPU allow it, an AVX2+FMA variant.
// The variant is chosen once at startup; tests pin it with set_active_isa().

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace spinphonon::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best variant compiled in and supported by this CPU.
Isa detected_isa() noexcept;

/// Variant used by the dispatching entry points below. Defaults to
/// detected_isa() unless SPINPHONON_SIMD=scalar|avx2 is set in the environment.
Isa active_isa() noexcept;

/// Forces a variant. Returns false (and changes nothing) if it is unavailable.
/// Not thread-safe with respect to concurrently running kernels.
bool set_active_isa(Isa isa) noexcept;

/// Two-layer Bloch dispersion F(w) = cos(w t1)cos(w t2) - m sin(w t1) sin(w t2)
/// for every w in `omega`, where t_i are layer transit times and
/// m = (Z1/Z2 + Z2/Z1)/2.
struct TwoLayerCell {
  double transit1 = 0.0;
  double transit2 = 0.0;
  double mismatch = 1.0;
};

/// sum_i w_i cos(freq t_i) / (shift + curvature t_i^2)
struct LorentzianCosine {
  double shift = 1.0;
  double curvature = 1.0;
  double freq = 0.0;
};

/// sum_i w_i / d_i^2 and sum_i w_i t_i^2 / d_i^2 with d_i = shift + curvature t_i^2.
struct LorentzianSquaredMoments {
  double zeroth = 0.0;
  double second = 0.0;
};

struct KernelTable {
  void (*sincos)(std::span<const double> x, std::span<double> s, std::span<double> c);
  void (*two_layer_dispersion)(std::span<const double> omega, const TwoLayerCell& cell,
                               std::span<double> out);
  double (*lorentzian_cosine_sum)(std::span<const double> t, std::span<const double> w,
                                  const LorentzianCosine& p);
  LorentzianSquaredMoments (*lorentzian_squared_moments)(std::span<const double> t,
                                                         std::span<const double> w,
                                                         double shift, double curvature);
};

/// Kernel table for a specific variant, or nullopt if it is not available.
std::optional<KernelTable> kernels_for(Isa isa) noexcept;

// Dispatching entry points (use active_isa()).
void sincos(std::span<const double> x, std::span<double> s, std::span<double> c);
void two_layer_dispersion(std::span<const double> omega, const TwoLayerCell& cell,
                          std::span<double> out);
double lorentzian_cosine_sum(std::span<const double> t, std::span<const double> w,
                             const LorentzianCosine& p);
LorentzianSquaredMoments lorentzian_squared_moments(std::span<const double> t,
                                                    std::span<const double> w, double shift,
                                                    double curvature);

namespace scalar {
extern const KernelTable table;
}
#if defined(SPINPHONON_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace spinphonon::simd
