#include <arm_neon.h>

#include "quditbell/kernels.hpp"

namespace quditbell::kernels::neon {

// One float64x2_t holds one complex double: [re, im].

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const float64x2_t ar = vdupq_n_f64(alpha.real());
  const float64x2_t ai_signed = {-alpha.imag(), alpha.imag()};
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xv = vld1q_f64(xp + 2 * i);
    float64x2_t yv = vld1q_f64(yp + 2 * i);
    yv = vfmaq_f64(yv, ar, xv);
    yv = vfmaq_f64(yv, ai_signed, vextq_f64(xv, xv, 1));
    vst1q_f64(yp + 2 * i, yv);
  }
}

cplx cdotc(const cplx* x, const cplx* y, std::size_t n) {
  const auto* xp = reinterpret_cast<const double*>(x);
  const auto* yp = reinterpret_cast<const double*>(y);
  float64x2_t acc_re = vdupq_n_f64(0.0);
  float64x2_t acc_im = vdupq_n_f64(0.0);
  const float64x2_t sign = {1.0, -1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xv = vld1q_f64(xp + 2 * i);
    const float64x2_t yv = vld1q_f64(yp + 2 * i);
    acc_re = vfmaq_f64(acc_re, xv, yv);
    acc_im = vfmaq_f64(acc_im, vmulq_f64(xv, sign), vextq_f64(yv, yv, 1));
  }
  return {vaddvq_f64(acc_re), vaddvq_f64(acc_im)};
}

}  // namespace quditbell::kernels::neon
