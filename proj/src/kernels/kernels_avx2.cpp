// Compiled with -mavx2 -mfma; only reached through the dispatcher after a
// CPUID check.

#include <immintrin.h>

#include "quditbell/kernels.hpp"

namespace quditbell::kernels::avx2 {

// One __m256d holds two complex doubles: [re0, im0, re1, im1].

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    // swapped = [im0, re0, im1, re1]
    const __m256d swapped = _mm256_permute_pd(xv, 0b0101);
    // ai*swapped = [ai*im, ai*re, ...]; addsub gives [ar*re - ai*im, ar*im + ai*re]
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, swapped));
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, prod));
  }
  if (i < n) {
    scalar::caxpy(alpha, x + i, y + i, n - i);
  }
}

cplx cdotc(const cplx* x, const cplx* y, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  const auto* yp = reinterpret_cast<const double*>(y);

  // acc_re collects xr*yr and xi*yi; acc_im collects xr*yi and -xi*yr.
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    // [xr*yi, -xi*yr]
    const __m256d yswap = _mm256_permute_pd(yv, 0b0101);
    acc_im = _mm256_fmadd_pd(_mm256_mul_pd(xv, sign), yswap, acc_im);
  }

  alignas(32) double re_lanes[4];
  alignas(32) double im_lanes[4];
  _mm256_store_pd(re_lanes, acc_re);
  _mm256_store_pd(im_lanes, acc_im);
  cplx tail = i < n ? scalar::cdotc(x + i, y + i, n - i) : cplx{};
  const double re = (re_lanes[0] + re_lanes[1]) + (re_lanes[2] + re_lanes[3]);
  const double im = (im_lanes[0] + im_lanes[1]) + (im_lanes[2] + im_lanes[3]);
  return cplx(re, im) + tail;
}

}  // namespace quditbell::kernels::avx2
