#pragma once

// Equivariant eigenfunctions of the rotation action on S^2:
//   Re Y_N^m(θ, φ) = sqrt(2N+1) P_N^m(cos φ) cos mθ,
// φ the colatitude, θ the rotation angle. The rotation has two fixed points
// (the poles), so the bundle picture breaks down there.

#include <optional>
#include <vector>

namespace nbl::sphere {

// Associated Legendre function by upward recurrence from P_m^m, including
// the Condon–Shortley phase (-1)^m:
//   P_m^m(x) = (-1)^m (2m-1)!! (1-x^2)^{m/2}.
// Throws nbl::Error unless 0 <= m <= N and |x| <= 1.
double legendre_p(int N, int m, double x);

struct SphereGrid {
  int n_phi = 0;    // latitude intervals; rows 0 and n_phi are the poles
  int n_theta = 0;  // samples per latitude circle
};

// n_theta: smallest multiple of 4m that is >= 8N, so meridian zeros fall on
// grid columns; n_phi = max(16N, 2 n_theta). `refinement` doubles both.
SphereGrid default_grid(int N, int m, int refinement = 0);

struct SphereHarmonic {
  int N = 0;
  int m = 0;
  SphereGrid grid;
  std::vector<double> latitude;   // sqrt(2N+1) P_N^m(cos φ_r), r = 0..n_phi
  std::vector<double> meridian;   // cos mθ_t, exact zeros on zero columns
  double value(int row, int col) const { return latitude[row] * meridian[col]; }
};

SphereHarmonic make_harmonic(int N, int m, const SphereGrid& grid);

struct SphereNodalReport {
  int N = 0;
  int m = 0;
  SphereGrid grid;
  int component_count = 0;
  int domain_count = 0;
  int singular_point_count = 0;  // singular cell clusters + the two poles
  double min_gradient_margin = 0.0;
  // closed-form product-structure oracle
  int latitude_zero_circles = 0;
  int meridian_zeros = 0;
  int predicted_domains = 0;
  int predicted_singular_points = 0;
  // the "N m" count of the n = 1 discussion, reported side by side
  int nm_expression = 0;
  bool domains_match_nm = false;
  bool singular_match_nm = false;
};

// Number of roots of P_N^m in (-1, 1) located by sign changes on a fine
// Chebyshev sampling; equals N - m.
int legendre_interior_roots(int N, int m);

// Throws nbl::Error when N < m, m < 1, or the grid is too coarse.
SphereNodalReport sphere_nodal_counts(int N, int m, const SphereGrid& grid);

struct FixedPointReport {
  int N = 0;
  int m = 0;
  double north_value = 0.0;
  double south_value = 0.0;
  // max over directions of |central difference across the pole|
  double north_gradient = 0.0;
  double south_gradient = 0.0;
  bool critical = false;
};

// Value and across-the-pole central differences at both poles. Throws for m < 1.
FixedPointReport fixed_point_vanishing_check(int N, int m, double step = 1e-5);

}  // namespace nbl::sphere
