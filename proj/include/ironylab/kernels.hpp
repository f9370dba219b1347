#pragma once

#include <cstddef>
#include <string_view>

// Vector kernels behind cosine similarity and embedding normalization.
// The scalar versions are the reference; SIMD variants are picked once at
// runtime from CPU features (IRONYLAB_SIMD=scalar forces the reference).
namespace ironylab::kernels {

struct DotNorms {
  double dot = 0.0;  // sum a[i]*b[i]
  double aa = 0.0;   // sum a[i]^2
  double bb = 0.0;   // sum b[i]^2
};

DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double k) noexcept;

// "scalar", "avx2" or "neon".
std::string_view active_backend() noexcept;

namespace scalar {
DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double k) noexcept;
}  // namespace scalar

namespace avx2 {
bool available() noexcept;
DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double k) noexcept;
}  // namespace avx2

namespace neon {
bool available() noexcept;
DotNorms dot_norms(const double* a, const double* b, std::size_t n) noexcept;
double sum_squares(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double k) noexcept;
}  // namespace neon

}  // namespace ironylab::kernels
