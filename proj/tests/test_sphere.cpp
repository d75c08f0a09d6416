#include <doctest.h>

#include <cmath>
#include <random>

#include "nbl/sphere.hpp"
#include "nbl/torus.hpp"

using namespace nbl::sphere;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Rodrigues-type series: P_N(x) = 2^{-N} Σ_k (-1)^k C(N,k) C(2N-2k, N) x^{N-2k},
// differentiated m times term by term, times (-1)^m (1-x^2)^{m/2}.
double series_legendre(int N, int m, double x) {
  double sum = 0.0;
  for (int k = 0; 2 * k <= N; ++k) {
    const int p = N - 2 * k;
    if (p < m) continue;
    double falling = 1.0;
    for (int j = 0; j < m; ++j) falling *= p - j;
    sum += (k % 2 ? -1.0 : 1.0) * binom(N, k) * binom(2 * N - 2 * k, N) * falling *
           std::pow(x, p - m);
  }
  return (m % 2 ? -1.0 : 1.0) * std::pow(1.0 - x * x, 0.5 * m) * sum / std::pow(2.0, N);
}

}  // namespace

TEST_SUITE("sphere_counterexample") {

TEST_CASE("Legendre values") {
  for (int N = 0; N <= 8; ++N) CHECK(legendre_p(N, 0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(legendre_p(2, 0, 0.5) == doctest::Approx(-0.125).epsilon(1e-14));
  // P_2^1(x) = -3 x sqrt(1 - x^2) with the Condon–Shortley phase
  CHECK(legendre_p(2, 1, 0.5) == doctest::Approx(-1.5 * std::sqrt(0.75)).epsilon(1e-13));
  CHECK(std::abs(legendre_p(2, 1, 0.5) - series_legendre(2, 1, 0.5)) < 1e-12);
  CHECK(legendre_p(3, 3, 0.0) == doctest::Approx(-15.0).epsilon(1e-14));
}

TEST_CASE("Legendre recurrence matches the explicit series") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, 8);
  for (int i = 0; i < 20; ++i) {
    const int N = deg(rng);
    const int m = std::uniform_int_distribution<int>(0, N)(rng);
    const double t = x(rng);
    CHECK(std::abs(legendre_p(N, m, t) - series_legendre(N, m, t)) < 1e-10);
  }
}

TEST_CASE("Legendre rejects bad indices") {
  CHECK_THROWS_AS(legendre_p(2, 3, 0.1), nbl::Error);
  CHECK_THROWS_AS(legendre_p(-1, 0, 0.1), nbl::Error);
  CHECK_THROWS_AS(legendre_p(2, -1, 0.1), nbl::Error);
  CHECK_THROWS_AS(legendre_p(2, 1, 1.5), nbl::Error);
}

TEST_CASE("interior Legendre roots number N - m") {
  for (int N = 1; N <= 6; ++N)
    for (int m = 0; m <= N; ++m) CHECK(legendre_interior_roots(N, m) == N - m);
}

TEST_CASE("grid places meridian zeros on columns") {
  for (int N = 1; N <= 6; ++N)
    for (int m = 1; m <= N; ++m) {
      const SphereGrid g = default_grid(N, m);
      CHECK(g.n_theta % (4 * m) == 0);
      CHECK(g.n_theta >= 8 * N);
      CHECK(g.n_phi >= 16 * N);
      const SphereHarmonic h = make_harmonic(N, m, g);
      int zeros = 0;
      for (double c : h.meridian) zeros += c == 0.0;
      CHECK(zeros == 2 * m);
    }
}

TEST_CASE("nodal counts of chosen examples") {
  SUBCASE("(N, m) = (2, 1)") {
    const auto r = sphere_nodal_counts(2, 1, default_grid(2, 1));
    CHECK(r.component_count == 1);
    CHECK(r.domain_count == 4);
    CHECK(r.singular_point_count == 4);
  }
  SUBCASE("(N, m) = (4, 2)") {
    const auto r = sphere_nodal_counts(4, 2, default_grid(4, 2));
    CHECK(r.domain_count == 12);
    CHECK(r.component_count == 1);
  }
  SUBCASE("(N, m) = (3, 3): sectoral") {
    const auto r = sphere_nodal_counts(3, 3, default_grid(3, 3));
    CHECK(r.domain_count == 6);
    CHECK(r.singular_point_count == 2);
    CHECK(r.latitude_zero_circles == 0);
  }
}

TEST_CASE("all pairs with N <= 6 match the product oracle and keep the margin ratio") {
  for (int N = 1; N <= 6; ++N)
    for (int m = 1; m <= N; ++m) {
      CAPTURE(N);
      CAPTURE(m);
      const auto a = sphere_nodal_counts(N, m, default_grid(N, m, 0));
      const auto b = sphere_nodal_counts(N, m, default_grid(N, m, 1));
      // oracle: N - m latitude circles and 2m meridian half-planes
      const int L = N - m;
      CHECK(a.latitude_zero_circles == L);
      CHECK(a.meridian_zeros == 2 * m);
      CHECK(a.predicted_domains == 2 * m * (L + 1));
      CHECK(a.predicted_singular_points == 2 * m * L + 2);
      CHECK(a.domain_count == a.predicted_domains);
      CHECK(a.component_count == 1);
      CHECK(a.singular_point_count == a.predicted_singular_points);
      CHECK(b.singular_point_count == a.singular_point_count);
      CHECK(b.domain_count == a.domain_count);
      CHECK(a.nm_expression == N * m);
      CHECK(a.domains_match_nm == (a.domain_count == N * m));
      CHECK(b.min_gradient_margin / a.min_gradient_margin <= 0.6);
    }
}

TEST_CASE("poles: m >= 2 harmonics vanish to first order") {
  for (int N = 2; N <= 6; ++N)
    for (int m = 2; m <= N; ++m) {
      const auto r = fixed_point_vanishing_check(N, m);
      CHECK(r.critical);
      CHECK(std::abs(r.north_value) < 1e-12);
      CHECK(std::abs(r.south_value) < 1e-12);
    }
  const auto r = fixed_point_vanishing_check(3, 2);
  CHECK(r.north_gradient < 1e-12);
  CHECK(r.south_gradient < 1e-12);
}

TEST_CASE("poles: m = 1 harmonics vanish with nonzero gradient") {
  // Re Y_1^1 is proportional to the Cartesian x coordinate; its gradient at
  // the poles has length sqrt(3) in the normalization sqrt(2N+1) P_N^m.
  const auto r = fixed_point_vanishing_check(1, 1);
  CHECK(std::abs(r.north_value) < 1e-12);
  CHECK(std::abs(r.south_value) < 1e-12);
  CHECK(r.north_gradient == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(r.south_gradient == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK_FALSE(r.critical);
  for (int N = 2; N <= 6; ++N) CHECK_FALSE(fixed_point_vanishing_check(N, 1).critical);
}

TEST_CASE("invalid sphere requests") {
  CHECK_THROWS_AS(sphere_nodal_counts(3, 0, default_grid(3, 1)), nbl::Error);
  CHECK_THROWS_AS(sphere_nodal_counts(2, 3, default_grid(3, 3)), nbl::Error);
  CHECK_THROWS_AS(sphere_nodal_counts(4, 2, SphereGrid{16, 8}), nbl::Error);
  CHECK_THROWS_AS(fixed_point_vanishing_check(2, 0), nbl::Error);
  CHECK_THROWS_AS(fixed_point_vanishing_check(1, 2), nbl::Error);
}

}
