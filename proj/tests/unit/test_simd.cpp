#include <doctest.h>

#include <cmath>
#include <vector>

#include "../support/generators.hpp"
#include "spinphonon/simd/kernels.hpp"

using namespace spinphonon::simd;

namespace {

struct IsaGuard {
  Isa saved = active_isa();
  ~IsaGuard() { set_active_isa(saved); }
};

std::vector<double> spread(testsupport::Gen& gen, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = gen.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar table is always available") {
    CHECK(kernels_for(Isa::scalar).has_value());
    CHECK(isa_name(Isa::scalar) == "scalar");
    IsaGuard guard;
    CHECK(set_active_isa(Isa::scalar));
    CHECK(active_isa() == Isa::scalar);
  }

  TEST_CASE("avx2 availability matches detection") {
    const bool have = kernels_for(Isa::avx2).has_value();
    CHECK(have == (detected_isa() == Isa::avx2));
    IsaGuard guard;
    CHECK(set_active_isa(Isa::avx2) == have);
  }

  TEST_CASE("sincos equivalence over reduction ranges") {
    const auto avx = kernels_for(Isa::avx2);
    if (!avx) return;
    const KernelTable ref = *kernels_for(Isa::scalar);
    testsupport::Gen gen(0x73696e63);
    for (double range : {1.0, 10.0, 1e3, 1e6, 1e9, 1e12}) {
      // Odd length exercises the scalar tail.
      std::vector<double> x = spread(gen, 1001, -range, range);
      x.push_back(0.0);
      x.push_back(-0.0);
      x.push_back(M_PI / 2);
      std::vector<double> s1(x.size()), c1(x.size()), s2(x.size()), c2(x.size());
      ref.sincos(x, s1, c1);
      avx->sincos(x, s2, c2);
      double worst = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max({worst, std::abs(s1[i] - s2[i]), std::abs(c1[i] - c2[i])});
      }
      CAPTURE(range);
      CHECK(worst <= 4e-16);
    }
  }

  TEST_CASE("reduction kernels agree to 1e-12 relative") {
    const auto avx = kernels_for(Isa::avx2);
    if (!avx) return;
    const KernelTable ref = *kernels_for(Isa::scalar);
    testsupport::Gen gen(0x6b65726e);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1023u}) {
      const std::vector<double> t = spread(gen, n, -50.0, 50.0);
      const std::vector<double> w = spread(gen, n, 0.0, 1.0);
      const LorentzianCosine p{1.0, 1.0, 2.7};
      const double a = ref.lorentzian_cosine_sum(t, w, p);
      const double b = avx->lorentzian_cosine_sum(t, w, p);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[i]);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(mag, 1e-300));

      const LorentzianSquaredMoments ma = ref.lorentzian_squared_moments(t, w, 1.0, 1.0);
      const LorentzianSquaredMoments mb = avx->lorentzian_squared_moments(t, w, 1.0, 1.0);
      CHECK(ma.zeroth == doctest::Approx(mb.zeroth).epsilon(1e-12));
      CHECK(ma.second == doctest::Approx(mb.second).epsilon(1e-12));

      const std::vector<double> omega = spread(gen, n, 0.0, 3e12);
      const TwoLayerCell cell{4.3e-12, 8.8e-12, 1.9};
      std::vector<double> fa(n), fb(n);
      ref.two_layer_dispersion(omega, cell, fa);
      avx->two_layer_dispersion(omega, cell, fb);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fa[i] - fb[i]) <= 1e-12 * 2.9);
    }
  }

  TEST_CASE("dispatch follows the active variant") {
    IsaGuard guard;
    const std::vector<double> x{0.25, 1.5, -3.0};
    std::vector<double> s(3), c(3);
    set_active_isa(Isa::scalar);
    sincos(x, s, c);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(s[i] == std::sin(x[i]));
      CHECK(c[i] == std::cos(x[i]));
    }
  }
}
