#include <atomic>
#include <cstdlib>
#include <string_view>

#include "spinphonon/simd/kernels.hpp"

namespace spinphonon::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SPINPHONON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const Isa best = detected_isa();
  if (const char* env = std::getenv("SPINPHONON_SIMD")) {
    const std::string_view v{env};
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const KernelTable& table_for(Isa isa) noexcept {
#if defined(SPINPHONON_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::table;
#else
  (void)isa;
#endif
  return scalar::table;
}

const KernelTable& active() noexcept { return table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa best = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return best;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) return false;
  current().store(isa, std::memory_order_relaxed);
  return true;
}

std::optional<KernelTable> kernels_for(Isa isa) noexcept {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) return std::nullopt;
  return table_for(isa);
}

void sincos(std::span<const double> x, std::span<double> s, std::span<double> c) {
  active().sincos(x, s, c);
}

void two_layer_dispersion(std::span<const double> omega, const TwoLayerCell& cell,
                          std::span<double> out) {
  active().two_layer_dispersion(omega, cell, out);
}

double lorentzian_cosine_sum(std::span<const double> t, std::span<const double> w,
                             const LorentzianCosine& p) {
  return active().lorentzian_cosine_sum(t, w, p);
}

LorentzianSquaredMoments lorentzian_squared_moments(std::span<const double> t,
                                                    std::span<const double> w, double shift,
                                                    double curvature) {
  return active().lorentzian_squared_moments(t, w, shift, curvature);
}

}  // namespace spinphonon::simd
