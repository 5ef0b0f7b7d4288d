// Compiled with -mavx2 -mfma. Only reached when the CPU reports both.

#include <immintrin.h>

#include <cmath>

#include "spinphonon/simd/kernels.hpp"

namespace spinphonon::simd::avx2 {
namespace {

// Lanes beyond this magnitude go through the scalar path; the int32
// quadrant conversion and the two-constant reduction stay exact below it.
constexpr double kMaxReducedArgument = 1e9;

// pi/2 split so that q*kPio2Hi is exact inside an FMA.
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Mid = 6.123233995736766e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.6366197723675814;

// Minimax coefficients on [-pi/4, pi/4] (fdlibm __kernel_sin / __kernel_cos).
constexpr double kS1 = -1.66666666666666324348e-01;
constexpr double kS2 = 8.33333333332248946124e-03;
constexpr double kS3 = -1.98412698298579493134e-04;
constexpr double kS4 = 2.75573137070700676789e-06;
constexpr double kS5 = -2.50507602534068634195e-08;
constexpr double kS6 = 1.58969099521155010221e-10;
constexpr double kC1 = 4.16666666666666019037e-02;
constexpr double kC2 = -1.38888888888741095749e-03;
constexpr double kC3 = 2.48015872894767294178e-05;
constexpr double kC4 = -2.75573143513906633035e-07;
constexpr double kC5 = 2.08757232129817482790e-09;
constexpr double kC6 = -1.13596475577881948265e-11;

inline bool in_range(__m256d x) {
  const __m256d ax = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  const __m256d ok = _mm256_cmp_pd(ax, _mm256_set1_pd(kMaxReducedArgument), _CMP_LE_OQ);
  return _mm256_movemask_pd(ok) == 0xF;
}

inline void sincos_pd(__m256d x, __m256d& s, __m256d& c) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_fmadd_pd(z, _mm256_set1_pd(kS6), _mm256_set1_pd(kS5));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(kS4));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(kS3));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(kS2));
  ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(kS1));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_fmadd_pd(z, _mm256_set1_pd(kC6), _mm256_set1_pd(kC5));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(kC4));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(kC3));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(kC2));
  pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(kC1));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, one));

  // Quadrant q mod 4: swap on bit 0, sin negated on bit 1, cos negated on bit 1 of q+1.
  const __m256i qi = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one_i = _mm256_set1_epi64x(1);
  const __m256i two_i = _mm256_set1_epi64x(2);
  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one_i), one_i));
  const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(qi, two_i), 62));
  const __m256d cos_sign = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one_i), two_i), 62));

  s = _mm256_xor_pd(_mm256_blendv_pd(sin_r, cos_r, swap), sin_sign);
  c = _mm256_xor_pd(_mm256_blendv_pd(cos_r, sin_r, swap), cos_sign);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    if (!in_range(v)) {
      scalar::table.sincos(x.subspan(i, 4), s.subspan(i, 4), c.subspan(i, 4));
      continue;
    }
    __m256d vs, vc;
    sincos_pd(v, vs, vc);
    _mm256_storeu_pd(s.data() + i, vs);
    _mm256_storeu_pd(c.data() + i, vc);
  }
  if (i < n) scalar::table.sincos(x.subspan(i), s.subspan(i), c.subspan(i));
}

void two_layer_dispersion_avx2(std::span<const double> omega, const TwoLayerCell& cell,
                               std::span<double> out) {
  const std::size_t n = omega.size();
  const __m256d t1 = _mm256_set1_pd(cell.transit1);
  const __m256d t2 = _mm256_set1_pd(cell.transit2);
  const __m256d m = _mm256_set1_pd(cell.mismatch);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(omega.data() + i);
    const __m256d p1 = _mm256_mul_pd(w, t1);
    const __m256d p2 = _mm256_mul_pd(w, t2);
    if (!in_range(p1) || !in_range(p2)) {
      scalar::table.two_layer_dispersion(omega.subspan(i, 4), cell, out.subspan(i, 4));
      continue;
    }
    __m256d s1, c1, s2, c2;
    sincos_pd(p1, s1, c1);
    sincos_pd(p2, s2, c2);
    const __m256d f = _mm256_sub_pd(_mm256_mul_pd(c1, c2), _mm256_mul_pd(m, _mm256_mul_pd(s1, s2)));
    _mm256_storeu_pd(out.data() + i, f);
  }
  if (i < n) scalar::table.two_layer_dispersion(omega.subspan(i), cell, out.subspan(i));
}

double lorentzian_cosine_sum_avx2(std::span<const double> t, std::span<const double> w,
                                  const LorentzianCosine& p) {
  const std::size_t n = t.size();
  const __m256d shift = _mm256_set1_pd(p.shift);
  const __m256d curv = _mm256_set1_pd(p.curvature);
  const __m256d freq = _mm256_set1_pd(p.freq);
  __m256d acc = _mm256_setzero_pd();
  double tail = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ti = _mm256_loadu_pd(t.data() + i);
    const __m256d arg = _mm256_mul_pd(freq, ti);
    if (!in_range(arg)) {
      tail += scalar::table.lorentzian_cosine_sum(t.subspan(i, 4), w.subspan(i, 4), p);
      continue;
    }
    __m256d s, c;
    sincos_pd(arg, s, c);
    const __m256d denom = _mm256_add_pd(shift, _mm256_mul_pd(curv, _mm256_mul_pd(ti, ti)));
    const __m256d term = _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(w.data() + i), c), denom);
    acc = _mm256_add_pd(acc, term);
  }
  if (i < n) tail += scalar::table.lorentzian_cosine_sum(t.subspan(i), w.subspan(i), p);
  return hsum(acc) + tail;
}

LorentzianSquaredMoments lorentzian_squared_moments_avx2(std::span<const double> t,
                                                         std::span<const double> w,
                                                         double shift, double curvature) {
  const std::size_t n = t.size();
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vcurv = _mm256_set1_pd(curvature);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ti = _mm256_loadu_pd(t.data() + i);
    const __m256d t2 = _mm256_mul_pd(ti, ti);
    const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(vshift, _mm256_mul_pd(vcurv, t2)));
    const __m256d wi = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w.data() + i), inv), inv);
    acc0 = _mm256_add_pd(acc0, wi);
    acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(wi, t2));
  }
  LorentzianSquaredMoments m{hsum(acc0), hsum(acc2)};
  if (i < n) {
    const auto rest = scalar::table.lorentzian_squared_moments(t.subspan(i), w.subspan(i), shift,
                                                               curvature);
    m.zeroth += rest.zeroth;
    m.second += rest.second;
  }
  return m;
}

}  // namespace

const KernelTable table{sincos_avx2, two_layer_dispersion_avx2, lorentzian_cosine_sum_avx2,
                        lorentzian_squared_moments_avx2};

}  // namespace spinphonon::simd::avx2
