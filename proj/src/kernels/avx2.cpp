#include <immintrin.h>

#include "ironylab/kernels.hpp"

namespace ironylab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

bool available() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept {
  __m256d dot0 = _mm256_setzero_pd(), dot1 = _mm256_setzero_pd();
  __m256d aa0 = _mm256_setzero_pd(), aa1 = _mm256_setzero_pd();
  __m256d bb0 = _mm256_setzero_pd(), bb1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i), x1 = _mm256_loadu_pd(a + i + 4);
    const __m256d y0 = _mm256_loadu_pd(b + i), y1 = _mm256_loadu_pd(b + i + 4);
    dot0 = _mm256_fmadd_pd(x0, y0, dot0);
    dot1 = _mm256_fmadd_pd(x1, y1, dot1);
    aa0 = _mm256_fmadd_pd(x0, x0, aa0);
    aa1 = _mm256_fmadd_pd(x1, x1, aa1);
    bb0 = _mm256_fmadd_pd(y0, y0, bb0);
    bb1 = _mm256_fmadd_pd(y1, y1, bb1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(a + i), y = _mm256_loadu_pd(b + i);
    dot0 = _mm256_fmadd_pd(x, y, dot0);
    aa0 = _mm256_fmadd_pd(x, x, aa0);
    bb0 = _mm256_fmadd_pd(y, y, bb0);
  }
  DotNorms r{hsum(_mm256_add_pd(dot0, dot1)), hsum(_mm256_add_pd(aa0, aa1)), hsum(_mm256_add_pd(bb0, bb1))};
  for (; i < n; ++i) {
    r.dot += a[i] * b[i];
    r.aa += a[i] * a[i];
    r.bb += b[i] * b[i];
  }
  return r;
}

double sum_squares(const double* a, std::size_t n) noexcept {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i), x1 = _mm256_loadu_pd(a + i + 4);
    s0 = _mm256_fmadd_pd(x0, x0, s0);
    s1 = _mm256_fmadd_pd(x1, x1, s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

void scale(double* a, std::size_t n, double k) noexcept {
  const __m256d kv = _mm256_set1_pd(k);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), kv));
  for (; i < n; ++i) a[i] *= k;
}

}  // namespace ironylab::kernels::avx2
