#include "ironylab/kernels.hpp"

namespace ironylab::kernels::scalar {

DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept {
  DotNorms r;
  for (std::size_t i = 0; i < n; ++i) {
    r.dot += a[i] * b[i];
    r.aa += a[i] * a[i];
    r.bb += b[i] * b[i];
  }
  return r;
}

double sum_squares(const double* a, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void scale(double* a, std::size_t n, double k) noexcept {
  for (std::size_t i = 0; i < n; ++i) a[i] *= k;
}

}  // namespace ironylab::kernels::scalar
