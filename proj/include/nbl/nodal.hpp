#pragma once

// Nodal topology of lifted equivariant eigenfunctions on the total space.
//
// A weight-m section f lifts to the real field
//
//   F(x, θ) = a(x) cos mθ + b(x) sin mθ = Re(f(x) e^{-imθ}),  a + ib = f,
//
// sampled on the lattice (base point, θ_t = 2πt / n_theta). Crossing the
// +x_a wrap of the base cell lands on fiber index t + s with
// s = (n_theta / n) Σ_{b>a} c_ab j_b, where j is the landing point; this is
// the identification F(x + e_a, θ) = F(x, θ + 2π s / n_theta) forced by the
// twist rule of the section.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "nbl/torus.hpp"

namespace nbl {

// Lattice sites with |F| below this join no nodal domain.
inline constexpr double kZeroSite = 1e-13;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

class LiftedField {
 public:
  LiftedField(const Section& s, int n_theta);

  int weight() const { return m_; }
  int n_theta() const { return n_theta_; }
  int dim() const { return grid().dim(); }
  const BaseGrid& grid() const { return conn_->grid(); }
  std::size_t size() const { return values_.size(); }

  std::size_t site(std::size_t base, int t) const {
    return base * static_cast<std::size_t>(n_theta_) + static_cast<std::size_t>(t);
  }
  std::size_t base_of(std::size_t site) const { return site / n_theta_; }
  int fiber_of(std::size_t site) const { return static_cast<int>(site % n_theta_); }

  double value(std::size_t site) const { return values_[site]; }
  const std::vector<double>& values() const { return values_; }
  double theta(int t) const { return kTwoPi * t / n_theta_; }

  // Neighbor along axis (0..d-1 base axes, d = fiber) with step ±1,
  // following the twisted identification on base wraps.
  std::size_t neighbor(std::size_t site, int axis, int step) const;
  // Lattice spacing along axis in coordinate units (h on the base, 2π/n_theta
  // along the fiber).
  double spacing(int axis) const;

  // Corner sites of the cell whose lowest corner is `site` (2^{d+1} entries).
  std::vector<std::size_t> cell_corners(std::size_t site) const;

 private:
  ConnectionPtr conn_;
  int m_;
  int n_theta_;
  std::vector<double> values_;
  // shift_[a][base]: fiber shift when entering `base` across the +a wrap
  std::vector<std::vector<int>> shift_;
};

// Smallest multiple of n that is >= 8 max(|m|, 1).
int auto_n_theta(int n, int m);
// n_theta_request <= 0 selects the auto rule.
LiftedField lift(const Section& s, int n_theta_request = 0);

// Zeros of a cos mθ + b sin mθ on [0, 2π) from the closed-form root formula.
std::vector<double> fiber_zeros(double a, double b, int m);
// Number of distinct fiber zeros, or nullopt when a^2 + b^2 <= tau^2.
// Throws Error for m = 0.
std::optional<int> fiber_zero_count(double a, double b, int m, double tau);

int nodal_domains(const LiftedField& field);
int nodal_set_components(const LiftedField& field);
// Sign domains of Re f on the base grid (periodic adjacency, m = 0 sections).
int base_nodal_domains(const Section& s);

struct WindingReport {
  int count = 0;          // plaquettes with nonzero winding
  int total_winding = 0;  // equals the degree m c_12 for any section
  double min_corner_modulus = 0.0;
};

// d = 2 only. Plaquettes are traversed x_2 first, then x_1, the orientation
// in which the degree of L^m is +m c_12. Throws Error if |f| <= threshold on
// some plaquette corner.
WindingReport section_zero_winding(const Section& s, double threshold = 0.0);

struct CoveringHistogram {
  std::map<int, int> counts;
  int undefined = 0;
  int samples = 0;
  double tau = 0.0;

  // share of the samples with |f| > tau that have `zero_count` zeros
  double fraction(int zero_count) const;
};

// fiber_zero_count at sample_count uniformly random base grid points.
CoveringHistogram covering_survey(const Section& s, int sample_count, double tau,
                                  std::uint64_t seed = 1);

// Minimum over mixed-sign cells of the centered-difference gradient norm of
// F at the cell corner closest to the nodal set. +inf with no mixed cells.
double regularity_margin(const LiftedField& field);

struct NodalOptions {
  int n_theta = 0;
  double tau_relative = 1e-6;
  int sample_count = 500;
  std::uint64_t seed = 1;
};

struct NodalReport {
  int m = 0;
  int n = 0;
  int n_theta = 0;
  std::size_t lattice_size = 0;
  int nodal_domain_count = 0;
  int nodal_set_component_count = 0;
  CoveringHistogram covering;
  std::optional<WindingReport> winding;
  double regularity_margin = 0.0;
  bool takes_both_signs = false;
};

NodalReport analyze_nodal(const Section& s, const NodalOptions& opts = {});

}  // namespace nbl
