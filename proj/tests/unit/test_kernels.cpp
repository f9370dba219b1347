#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ironylab/kernels.hpp"

using namespace ironylab;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

template <typename Dot, typename Sum, typename Scale>
void check_against_scalar(Dot dot, Sum sum, Scale scale) {
  std::mt19937_64 rng(77);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    const auto ref = kernels::scalar::dot_norms(a.data(), b.data(), n);
    const auto got = dot(a.data(), b.data(), n);
    CHECK(close(got.dot, ref.dot));
    CHECK(close(got.aa, ref.aa));
    CHECK(close(got.bb, ref.bb));
    CHECK(close(sum(a.data(), n), kernels::scalar::sum_squares(a.data(), n)));
    auto x = a, y = a;
    scale(x.data(), n, 0.37);
    kernels::scalar::scale(y.data(), n, 0.37);
    CHECK(x == y);
  }
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar reference values") {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const auto r = kernels::scalar::dot_norms(a.data(), b.data(), 3);
    CHECK(r.dot == 32.0);
    CHECK(r.aa == 14.0);
    CHECK(r.bb == 77.0);
    CHECK(kernels::scalar::sum_squares(b.data(), 3) == 77.0);
  }

  TEST_CASE("avx2 matches scalar") {
    if (!kernels::avx2::available()) {
      MESSAGE("avx2 not available on this machine");
      return;
    }
    check_against_scalar(kernels::avx2::dot_norms, kernels::avx2::sum_squares, kernels::avx2::scale);
  }

  TEST_CASE("neon matches scalar") {
    if (!kernels::neon::available()) {
      MESSAGE("neon not available on this machine");
      return;
    }
    check_against_scalar(kernels::neon::dot_norms, kernels::neon::sum_squares, kernels::neon::scale);
  }

  TEST_CASE("dispatched entry points match scalar") {
    check_against_scalar(kernels::dot_norms, kernels::sum_squares, kernels::scale);
    const auto backend = kernels::active_backend();
    CHECK((backend == "scalar" || backend == "avx2" || backend == "neon"));
  }
}
