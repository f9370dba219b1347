#include <arm_neon.h>

#include "ironylab/kernels.hpp"

namespace ironylab::kernels::neon {

bool available() noexcept { return true; }  // baseline on AArch64

DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept {
  float64x2_t dot = vdupq_n_f64(0.0), aa = vdupq_n_f64(0.0), bb = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(a + i), y = vld1q_f64(b + i);
    dot = vfmaq_f64(dot, x, y);
    aa = vfmaq_f64(aa, x, x);
    bb = vfmaq_f64(bb, y, y);
  }
  DotNorms r{vaddvq_f64(dot), vaddvq_f64(aa), vaddvq_f64(bb)};
  for (; i < n; ++i) {
    r.dot += a[i] * b[i];
    r.aa += a[i] * a[i];
    r.bb += b[i] * b[i];
  }
  return r;
}

double sum_squares(const double* a, std::size_t n) noexcept {
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(a + i);
    s = vfmaq_f64(s, x, x);
  }
  double r = vaddvq_f64(s);
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

void scale(double* a, std::size_t n, double k) noexcept {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(a + i, vmulq_n_f64(vld1q_f64(a + i), k));
  for (; i < n; ++i) a[i] *= k;
}

}  // namespace ironylab::kernels::neon
