#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "hsu/kernels.hpp"
#include "hsu/rng.hpp"

using namespace hsu;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() * (1.0 + rng.uniform_co());
  return v;
}

// Mixed magnitudes so reassociated sums actually exercise rounding.
std::vector<double> spiky_values(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::pow(10.0, static_cast<double>(rng.below(7)) - 3.0);
    v[i] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * mag * rng.uniform01();
  }
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand values") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, 5.0, 6.0};
  const auto& t = kernels::scalar_table();
  CHECK(t.dot(a.data(), b.data(), 3) == doctest::Approx(32.0));
  CHECK(t.nrm2sq(a.data(), 3) == doctest::Approx(14.0));
  CHECK(t.sqdist(a.data(), b.data(), 3) == doctest::Approx(27.0));
  CHECK(t.sum_abs(b.data(), 3) == doctest::Approx(15.0));
  CHECK(kernels::nrm2(std::vector<double>{3.0, 4.0}.data(), 2) == doctest::Approx(5.0));

  std::vector<double> y{1.0, 1.0, 1.0};
  t.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3.0, 5.0, 7.0});
  t.scale(0.5, y.data(), 3);
  CHECK(y == std::vector<double>{1.5, 2.5, 3.5});
  std::vector<double> prod(3);
  t.hadamard(a.data(), b.data(), prod.data(), 3);
  CHECK(prod == std::vector<double>{4.0, 10.0, 18.0});
}

TEST_CASE("zero-length inputs are safe") {
  for (const auto* t : kernels::available_tables()) {
    CHECK(t->dot(nullptr, nullptr, 0) == 0.0);
    CHECK(t->nrm2sq(nullptr, 0) == 0.0);
    CHECK(t->sqdist(nullptr, nullptr, 0) == 0.0);
    CHECK(t->sum_abs(nullptr, 0) == 0.0);
    t->axpy(2.0, nullptr, nullptr, 0);
    t->scale(2.0, nullptr, 0);
    t->hadamard(nullptr, nullptr, nullptr, 0);
  }
}

TEST_CASE("every available table agrees with the scalar reference") {
  const auto& ref = kernels::scalar_table();
  Rng rng(20240811);
  // Sizes straddle every SIMD width boundary so remainder lanes are hit.
  const std::size_t sizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 100, 257, 1024, 1027};

  for (const auto* table : kernels::available_tables()) {
    CAPTURE(table->name);
    for (std::size_t n : sizes) {
      CAPTURE(n);
      const auto a = spiky_values(rng, n);
      const auto b = random_values(rng, n);

      const double tol = 1e-12 * static_cast<double>(n) + 1e-14;
      CHECK(table->dot(a.data(), b.data(), n) ==
            doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(tol));
      CHECK(table->nrm2sq(a.data(), n) == doctest::Approx(ref.nrm2sq(a.data(), n)).epsilon(tol));
      CHECK(table->sqdist(a.data(), b.data(), n) ==
            doctest::Approx(ref.sqdist(a.data(), b.data(), n)).epsilon(tol));
      CHECK(table->sum_abs(a.data(), n) == doctest::Approx(ref.sum_abs(a.data(), n)).epsilon(tol));

      // Elementwise ops: FMA fusing may shift the last bit, nothing more.
      std::vector<double> y0 = b, y1 = b;
      ref.axpy(1.7, a.data(), y0.data(), n);
      table->axpy(1.7, a.data(), y1.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(y1[i] == doctest::Approx(y0[i]).epsilon(1e-15));

      std::vector<double> s0 = a, s1 = a;
      ref.scale(-0.3, s0.data(), n);
      table->scale(-0.3, s1.data(), n);
      CHECK(s0 == s1);

      std::vector<double> h0(n), h1(n);
      ref.hadamard(a.data(), b.data(), h0.data(), n);
      table->hadamard(a.data(), b.data(), h1.data(), n);
      CHECK(h0 == h1);
    }
  }
}

TEST_CASE("hadamard allows aliased output") {
  for (const auto* table : kernels::available_tables()) {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{2.0, 2.0, 2.0, 2.0, 2.0};
    table->hadamard(a.data(), b.data(), a.data(), a.size());
    CHECK(a == std::vector<double>{2.0, 4.0, 6.0, 8.0, 10.0});
  }
}

TEST_CASE("active table is one of the available ones") {
  const auto& act = kernels::active();
  CHECK(act.name != nullptr);
  bool found = false;
  for (const auto* t : kernels::available_tables()) found = found || (t == &act);
  CHECK(found);

  // The override env var picks the named table when it is available.
  if (const char* forced = std::getenv("HSU_KERNELS")) {
    CHECK(std::string(act.name) == forced);
  }
}
