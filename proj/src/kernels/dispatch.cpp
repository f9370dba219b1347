#include <cstdlib>
#include <cstring>

#include "ironylab/kernels.hpp"

namespace ironylab::kernels {

namespace {

struct Table {
  DotNorms (*dot_norms)(const double*, const double*, std::size_t) noexcept;
  double (*sum_squares)(const double*, std::size_t) noexcept;
  void (*scale)(double*, std::size_t, double) noexcept;
  std::string_view name;
};

Table select() noexcept {
  const char* forced = std::getenv("IRONYLAB_SIMD");
  const bool scalar_only = forced && std::strcmp(forced, "scalar") == 0;
#if defined(IRONYLAB_HAVE_AVX2_TU)
  if (!scalar_only && avx2::available()) return {avx2::dot_norms, avx2::sum_squares, avx2::scale, "avx2"};
#endif
#if defined(IRONYLAB_HAVE_NEON_TU)
  if (!scalar_only && neon::available()) return {neon::dot_norms, neon::sum_squares, neon::scale, "neon"};
#endif
  (void)scalar_only;
  return {scalar::dot_norms, scalar::sum_squares, scalar::scale, "scalar"};
}

const Table& table() noexcept {
  static const Table t = select();
  return t;
}

}  // namespace

#if !defined(IRONYLAB_HAVE_AVX2_TU)
namespace avx2 {
bool available() noexcept { return false; }
DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot_norms(a, b, n); }
double sum_squares(const double* a, std::size_t n) noexcept { return scalar::sum_squares(a, n); }
void scale(double* a, std::size_t n, double k) noexcept { scalar::scale(a, n, k); }
}  // namespace avx2
#endif

#if !defined(IRONYLAB_HAVE_NEON_TU)
namespace neon {
bool available() noexcept { return false; }
DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot_norms(a, b, n); }
double sum_squares(const double* a, std::size_t n) noexcept { return scalar::sum_squares(a, n); }
void scale(double* a, std::size_t n, double k) noexcept { scalar::scale(a, n, k); }
}  // namespace neon
#endif

DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept { return table().dot_norms(a, b, n); }
double sum_squares(const double* a, std::size_t n) noexcept { return table().sum_squares(a, n); }
void scale(double* a, std::size_t n, double k) noexcept { table().scale(a, n, k); }
std::string_view active_backend() noexcept { return table().name; }

}  // namespace ironylab::kernels
