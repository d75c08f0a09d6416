#pragma once

// Discretized flat tori T^d (d = 2, 3) carrying a conformal metric e^{2u}δ,
// U(1) connections with integer flux, and weight-m sections of L^m.
//
// Grid points sit at x = (i_0, ..., i_{d-1}) / n with row-major indexing
// (axis 0 slowest). A section of L^m is stored by its values on the
// fundamental cell [0,1)^d; values outside the cell follow the twist rule
//
//   f(x + e_a) = exp(i φ_a(x)) f(x),   φ_a(x) = -2π m Σ_{b>a} c_ab x_b,
//
// which is the transition function of the Landau-type gauge potential
// η = 2π Σ_{a<b} c_ab x_a dx_b (+ a periodic 1-form β).

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nbl {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kMaxConformal = 2.0;
inline constexpr int kMaxDim = 3;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Coords = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

// One term amplitude * cos(2π k·x) or amplitude * sin(2π k·x).
struct FourierTerm {
  Coords k{0, 0, 0};
  double amplitude = 0.0;
  bool sine = false;
};

// A smooth 1-periodic scalar field written as a finite Fourier sum.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(double constant, std::vector<FourierTerm> terms)
      : constant_(constant), terms_(std::move(terms)) {}

  static PeriodicField zero() { return {}; }
  static PeriodicField constant(double value) { return {value, {}}; }
  static PeriodicField cosine(double amplitude, Coords k) {
    return {0.0, {FourierTerm{k, amplitude, false}}};
  }
  // Sum over nonzero wave vectors with |k_a| <= max_mode, each with a cos
  // and a sin coefficient drawn uniformly from [-1, 1], rescaled so that
  // the sum of absolute coefficients equals `amplitude`.
  static PeriodicField random(int dim, int max_mode, double amplitude,
                              std::uint64_t seed);

  double operator()(const Point& x) const;
  // Bound on sup |field| from the coefficient sum.
  double sup_bound() const;
  PeriodicField scaled(double s) const;
  PeriodicField operator+(const PeriodicField& other) const;

  double constant_term() const { return constant_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }

 private:
  double constant_ = 0.0;
  std::vector<FourierTerm> terms_;
};

// Periodic 1-form β = Σ_a β_a dx_a.
struct PeriodicOneForm {
  std::vector<PeriodicField> components;

  static PeriodicOneForm zero(int dim) {
    return {std::vector<PeriodicField>(dim)};
  }
  static PeriodicOneForm random(int dim, int max_mode, double amplitude,
                                std::uint64_t seed);
  PeriodicOneForm scaled(double s) const;
};

class BaseGrid {
 public:
  // Samples u at the grid points. Throws Error when d ∉ {2,3}, n < 8, or
  // |u| > kMaxConformal somewhere.
  BaseGrid(int dim, int n, RVec conformal);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  std::size_t size() const { return size_; }

  const RVec& conformal() const { return conformal_; }
  const RVec& volume_weights() const { return volume_; }

  Coords coords(std::size_t index) const;
  std::size_t index(const Coords& c) const;
  Point point(std::size_t index) const;
  // Neighbor along axis with step ±1, wrapping periodically; `wrapped` is
  // set when the step crosses the boundary of the fundamental cell.
  std::size_t neighbor(std::size_t index, int axis, int step,
                       bool* wrapped = nullptr) const;

  bool same_shape(const BaseGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_;
  int n_;
  std::size_t size_;
  RVec conformal_;
  RVec volume_;
};

using GridPtr = std::shared_ptr<const BaseGrid>;

GridPtr make_base_grid(int dim, int n, const PeriodicField& u);
GridPtr make_base_grid_sampled(int dim, int n, RVec u);
RVec sample(const BaseGrid& grid, const PeriodicField& field);

// Antisymmetric integer matrix of Chern data c_ab.
class FluxMatrix {
 public:
  FluxMatrix() = default;
  explicit FluxMatrix(int dim);
  // Throws Error when `rows` is not a square antisymmetric matrix of size dim.
  static FluxMatrix from_rows(int dim, const std::vector<std::vector<int>>& rows);
  static FluxMatrix planar(int c12) {
    FluxMatrix f(2);
    f.set(0, 1, c12);
    return f;
  }

  int dim() const { return dim_; }
  int operator()(int a, int b) const { return c_[a][b]; }
  void set(int a, int b, int value) {
    c_[a][b] = value;
    c_[b][a] = -value;
  }
  bool trivial() const;
  std::vector<std::vector<int>> rows() const;
  bool operator==(const FluxMatrix&) const = default;

 private:
  int dim_ = 0;
  std::array<std::array<int, kMaxDim>, kMaxDim> c_{};
};

// Discrete 1-form: one real number per (axis, grid point) holding the
// integral along the edge from the point to its +axis neighbor.
struct EdgeField {
  std::vector<RVec> axes;

  static EdgeField zero(const BaseGrid& grid);
  // Midpoint-rule line integrals of a periodic 1-form.
  static EdgeField from_one_form(const BaseGrid& grid, const PeriodicOneForm& form);
  // Exact discrete gradient: χ(x + h e_a) - χ(x).
  static EdgeField gradient(const BaseGrid& grid, const RVec& chi);

  EdgeField operator+(const EdgeField& other) const;
  EdgeField scaled(double s) const;
};

class Connection {
 public:
  Connection(GridPtr grid, FluxMatrix flux, EdgeField beta);

  const BaseGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const FluxMatrix& flux() const { return flux_; }
  // Periodic part β on edges (Landau part excluded).
  const EdgeField& beta() const { return beta_; }

  // ∫ η along the edge from `index` to its +axis neighbor, in unwrapped
  // coordinates (Landau part by exact integration, β part as stored).
  double edge_integral(std::size_t index, int axis) const;
  // φ_a(x) / m: twist angle for weight-1 sections at a point with
  // coordinates in unwrapped lattice units (entries may equal n).
  double twist_angle(int axis, const Coords& lattice_coords) const;
  // Phase exp(i m φ_a(x)) multiplying f(x) when x crosses the +axis wrap.
  cplx twist(int axis, const Coords& lattice_coords, int m) const;
  // Fiber-index shift across the +axis wrap landing at lattice point `c`
  // for a fiber sampled with n_theta points. Throws Error if not integral.
  int fiber_shift(int axis, const Coords& c, int n_theta) const;

  // Sum of plaquette phases of the m = 1 link field in the (a, b) plane,
  // each plaquette phase taken as its principal value.
  double plaquette_flux(int a, int b) const;
  // Largest deviation from the cocycle identity over all corners of the
  // period lattice.
  double cocycle_defect(int m) const;

 private:
  GridPtr grid_;
  FluxMatrix flux_;
  EdgeField beta_;
};

using ConnectionPtr = std::shared_ptr<const Connection>;

// Rejects non-antisymmetric flux or dimension mismatch.
ConnectionPtr make_connection(GridPtr grid, const FluxMatrix& flux,
                              const PeriodicOneForm& beta);
ConnectionPtr make_connection(GridPtr grid, const FluxMatrix& flux,
                              EdgeField beta);

// A weight-m section of L^m in the unitary frame.
class Section {
 public:
  Section(ConnectionPtr conn, int m, CVec values);

  int weight() const { return m_; }
  const Connection& connection() const { return *conn_; }
  const ConnectionPtr& connection_ptr() const { return conn_; }
  const BaseGrid& grid() const { return conn_->grid(); }
  const CVec& values() const { return values_; }
  CVec& values() { return values_; }

  // Value at unwrapped lattice coordinates (entries in [0, n]), applying
  // the twist rule for each coordinate equal to n.
  cplx value_at(const Coords& lattice_coords) const;

  double norm() const;
  void normalize();
  // Σ conj(f_i) g_i w_i (volume-weighted).
  cplx inner(const Section& other) const;

  bool compatible(const Section& other) const;

 private:
  ConnectionPtr conn_;
  int m_;
  CVec values_;
};

// Change of unitary frame by exp(i m χ): η' = η - dχ (discrete gradient),
// f' = exp(i m χ) f. Flux unchanged.
std::pair<ConnectionPtr, Section> gauge_transform(const ConnectionPtr& conn,
                                                  const Section& s,
                                                  const RVec& chi);
ConnectionPtr gauge_transform(const ConnectionPtr& conn, const RVec& chi);

}  // namespace nbl
