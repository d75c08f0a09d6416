#include "nbl/torus.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace nbl {

namespace {

double phase_of(const FourierTerm& t, const Point& x) {
  double arg = 0.0;
  for (int a = 0; a < kMaxDim; ++a) arg += t.k[a] * x[a];
  return kTwoPi * arg;
}

std::vector<Coords> wave_vectors(int dim, int max_mode) {
  std::vector<Coords> out;
  const int lo = -max_mode, hi = max_mode;
  for (int k0 = lo; k0 <= hi; ++k0)
    for (int k1 = lo; k1 <= hi; ++k1)
      for (int k2 = (dim == 3 ? lo : 0); k2 <= (dim == 3 ? hi : 0); ++k2) {
        Coords k{k0, k1, k2};
        // keep one representative of ±k
        bool positive = false, decided = false;
        for (int a = 0; a < kMaxDim && !decided; ++a) {
          if (k[a] != 0) {
            positive = k[a] > 0;
            decided = true;
          }
        }
        if (decided && positive) out.push_back(k);
      }
  return out;
}

}  // namespace

PeriodicField PeriodicField::random(int dim, int max_mode, double amplitude,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<FourierTerm> terms;
  double total = 0.0;
  for (const auto& k : wave_vectors(dim, max_mode)) {
    for (bool sine : {false, true}) {
      FourierTerm t{k, coef(rng), sine};
      total += std::abs(t.amplitude);
      terms.push_back(t);
    }
  }
  if (total > 0.0)
    for (auto& t : terms) t.amplitude *= amplitude / total;
  return {0.0, std::move(terms)};
}

double PeriodicField::operator()(const Point& x) const {
  double v = constant_;
  for (const auto& t : terms_) {
    const double p = phase_of(t, x);
    v += t.amplitude * (t.sine ? std::sin(p) : std::cos(p));
  }
  return v;
}

double PeriodicField::sup_bound() const {
  double s = std::abs(constant_);
  for (const auto& t : terms_) s += std::abs(t.amplitude);
  return s;
}

PeriodicField PeriodicField::scaled(double s) const {
  PeriodicField out = *this;
  out.constant_ *= s;
  for (auto& t : out.terms_) t.amplitude *= s;
  return out;
}

PeriodicField PeriodicField::operator+(const PeriodicField& other) const {
  PeriodicField out = *this;
  out.constant_ += other.constant_;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

PeriodicOneForm PeriodicOneForm::random(int dim, int max_mode, double amplitude,
                                        std::uint64_t seed) {
  PeriodicOneForm out;
  std::seed_seq seq{seed, static_cast<std::uint64_t>(0x5eed)};
  std::vector<std::uint64_t> seeds(dim);
  seq.generate(seeds.begin(), seeds.end());
  for (int a = 0; a < dim; ++a)
    out.components.push_back(PeriodicField::random(dim, max_mode, amplitude, seeds[a]));
  return out;
}

PeriodicOneForm PeriodicOneForm::scaled(double s) const {
  PeriodicOneForm out;
  for (const auto& c : components) out.components.push_back(c.scaled(s));
  return out;
}

// ---------------------------------------------------------------------------

BaseGrid::BaseGrid(int dim, int n, RVec conformal)
    : dim_(dim), n_(n), conformal_(std::move(conformal)) {
  if (dim != 2 && dim != 3)
    throw Error("base grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (n < 8) throw Error("base grid needs n >= 8, got " + std::to_string(n));
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
  if (static_cast<std::size_t>(conformal_.size()) != size_)
    throw Error("conformal factor has wrong number of samples");
  const double cell = std::pow(spacing(), dim);
  volume_.resize(static_cast<Eigen::Index>(size_));
  for (std::size_t i = 0; i < size_; ++i) {
    const double u = conformal_[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(u) || std::abs(u) > kMaxConformal) {
      std::ostringstream msg;
      msg << "conformal factor |u| = " << std::abs(u) << " exceeds bound "
          << kMaxConformal << " at grid point " << i;
      throw Error(msg.str());
    }
    volume_[static_cast<Eigen::Index>(i)] = std::exp(dim * u) * cell;
  }
}

Coords BaseGrid::coords(std::size_t index) const {
  Coords c{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    c[a] = static_cast<int>(index % n_);
    index /= n_;
  }
  return c;
}

std::size_t BaseGrid::index(const Coords& c) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    const int ca = ((c[a] % n_) + n_) % n_;
    idx = idx * n_ + static_cast<std::size_t>(ca);
  }
  return idx;
}

Point BaseGrid::point(std::size_t index) const {
  const Coords c = coords(index);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = c[a] * spacing();
  return p;
}

std::size_t BaseGrid::neighbor(std::size_t index, int axis, int step,
                               bool* wrapped) const {
  Coords c = coords(index);
  const int next = c[axis] + step;
  if (wrapped) *wrapped = next < 0 || next >= n_;
  c[axis] = next;
  return this->index(c);
}

RVec sample(const BaseGrid& grid, const PeriodicField& field) {
  RVec out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = field(grid.point(i));
  return out;
}

GridPtr make_base_grid_sampled(int dim, int n, RVec u) {
  return std::make_shared<const BaseGrid>(dim, n, std::move(u));
}

GridPtr make_base_grid(int dim, int n, const PeriodicField& u) {
  if (dim != 2 && dim != 3)
    throw Error("base grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (n < 8) throw Error("base grid needs n >= 8, got " + std::to_string(n));
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
  RVec values(static_cast<Eigen::Index>(size));
  const double h = 1.0 / n;
  for (std::size_t i = 0; i < size; ++i) {
    Point p{0.0, 0.0, 0.0};
    std::size_t rest = i;
    for (int a = dim - 1; a >= 0; --a) {
      p[a] = static_cast<double>(rest % n) * h;
      rest /= n;
    }
    values[static_cast<Eigen::Index>(i)] = u(p);
  }
  return make_base_grid_sampled(dim, n, std::move(values));
}

// ---------------------------------------------------------------------------

FluxMatrix::FluxMatrix(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3)
    throw Error("flux matrix dimension must be 2 or 3");
}

FluxMatrix FluxMatrix::from_rows(int dim, const std::vector<std::vector<int>>& rows) {
  FluxMatrix f(dim);
  if (static_cast<int>(rows.size()) != dim)
    throw Error("flux matrix must have " + std::to_string(dim) + " rows");
  for (int a = 0; a < dim; ++a) {
    if (static_cast<int>(rows[a].size()) != dim)
      throw Error("flux matrix row " + std::to_string(a) + " has wrong length");
  }
  for (int a = 0; a < dim; ++a) {
    if (rows[a][a] != 0) throw Error("flux matrix must have zero diagonal");
    for (int b = a + 1; b < dim; ++b) {
      if (rows[a][b] != -rows[b][a])
        throw Error("flux matrix must be antisymmetric");
      f.set(a, b, rows[a][b]);
    }
  }
  return f;
}

bool FluxMatrix::trivial() const {
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      if (c_[a][b] != 0) return false;
  return true;
}

std::vector<std::vector<int>> FluxMatrix::rows() const {
  std::vector<std::vector<int>> out(dim_, std::vector<int>(dim_, 0));
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) out[a][b] = c_[a][b];
  return out;
}

// ---------------------------------------------------------------------------

EdgeField EdgeField::zero(const BaseGrid& grid) {
  EdgeField e;
  e.axes.assign(grid.dim(), RVec::Zero(static_cast<Eigen::Index>(grid.size())));
  return e;
}

EdgeField EdgeField::from_one_form(const BaseGrid& grid, const PeriodicOneForm& form) {
  if (static_cast<int>(form.components.size()) != grid.dim())
    throw Error("1-form has wrong number of components for the grid");
  EdgeField e = zero(grid);
  const double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) {
      Point mid = p;
      mid[a] += 0.5 * h;
      e.axes[a][static_cast<Eigen::Index>(i)] = h * form.components[a](mid);
    }
  }
  return e;
}

EdgeField EdgeField::gradient(const BaseGrid& grid, const RVec& chi) {
  if (static_cast<std::size_t>(chi.size()) != grid.size())
    throw Error("gauge function sampled on a different grid");
  EdgeField e = zero(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) {
      const auto j = grid.neighbor(i, a, +1);
      e.axes[a][static_cast<Eigen::Index>(i)] =
          chi[static_cast<Eigen::Index>(j)] - chi[static_cast<Eigen::Index>(i)];
    }
  }
  return e;
}

EdgeField EdgeField::operator+(const EdgeField& other) const {
  if (axes.size() != other.axes.size()) throw Error("edge field dimension mismatch");
  EdgeField out = *this;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].size() != other.axes[a].size()) throw Error("edge field grid mismatch");
    out.axes[a] += other.axes[a];
  }
  return out;
}

EdgeField EdgeField::scaled(double s) const {
  EdgeField out = *this;
  for (auto& v : out.axes) v *= s;
  return out;
}

// ---------------------------------------------------------------------------

Connection::Connection(GridPtr grid, FluxMatrix flux, EdgeField beta)
    : grid_(std::move(grid)), flux_(flux), beta_(std::move(beta)) {
  if (!grid_) throw Error("connection needs a grid");
  if (flux_.dim() != grid_->dim())
    throw Error("flux matrix dimension does not match the grid");
  if (static_cast<int>(beta_.axes.size()) != grid_->dim())
    throw Error("gauge 1-form dimension does not match the grid");
  for (const auto& v : beta_.axes)
    if (static_cast<std::size_t>(v.size()) != grid_->size())
      throw Error("gauge 1-form sampled on a different grid");
}

double Connection::edge_integral(std::size_t index, int axis) const {
  // η_axis = 2π Σ_{b<axis} c_{b,axis} x_b is constant along the edge.
  const Coords c = grid_->coords(index);
  const double h = grid_->spacing();
  double landau = 0.0;
  for (int b = 0; b < axis; ++b) landau += flux_(b, axis) * c[b] * h;
  return kTwoPi * landau * h + beta_.axes[axis][static_cast<Eigen::Index>(index)];
}

double Connection::twist_angle(int axis, const Coords& lattice_coords) const {
  const double h = grid_->spacing();
  double s = 0.0;
  for (int b = axis + 1; b < grid_->dim(); ++b)
    s += flux_(axis, b) * lattice_coords[b] * h;
  return -kTwoPi * s;
}

cplx Connection::twist(int axis, const Coords& lattice_coords, int m) const {
  // Reduce the integer part exactly before taking the exponential.
  const int n = grid_->n();
  long long num = 0;
  for (int b = axis + 1; b < grid_->dim(); ++b)
    num += static_cast<long long>(flux_(axis, b)) * lattice_coords[b];
  num *= m;
  const long long r = ((num % n) + n) % n;
  return std::polar(1.0, -kTwoPi * static_cast<double>(r) / n);
}

int Connection::fiber_shift(int axis, const Coords& c, int n_theta) const {
  const int n = grid_->n();
  long long num = 0;
  for (int b = axis + 1; b < grid_->dim(); ++b)
    num += static_cast<long long>(flux_(axis, b)) * c[b];
  num *= n_theta;
  if (num % n != 0)
    throw Error("fiber shift is not integral; n_theta must be a multiple of n");
  const long long s = ((num / n) % n_theta + n_theta) % n_theta;
  return static_cast<int>(s);
}

double Connection::plaquette_flux(int a, int b) const {
  if (a == b) return 0.0;
  const bool swapped = a > b;
  if (swapped) std::swap(a, b);
  auto link = [&](std::size_t i, int axis) {
    bool wrapped = false;
    const auto j = grid_->neighbor(i, axis, +1, &wrapped);
    cplx u = std::polar(1.0, -edge_integral(i, axis));
    if (wrapped) u *= std::conj(twist(axis, grid_->coords(j), 1));
    return std::pair{u, j};
  };
  double total = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const auto [ua, ia] = link(i, a);
    const auto [ub_a, iab] = link(ia, b);
    const auto [ub, ib] = link(i, b);
    const auto [ua_b, iba] = link(ib, a);
    (void)iab;
    (void)iba;
    const cplx hol = ua * ub_a * std::conj(ua_b) * std::conj(ub);
    total -= std::arg(hol);
  }
  return swapped ? -total : total;
}

double Connection::cocycle_defect(int m) const {
  const int d = grid_->dim();
  const int n = grid_->n();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const Coords x = grid_->coords(i);
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        Coords xa = x, xb = x;
        xa[a] += n;
        xb[b] += n;
        const cplx path1 = twist(a, xb, m) * twist(b, x, m);
        const cplx path2 = twist(b, xa, m) * twist(a, x, m);
        worst = std::max(worst, std::abs(path1 - path2));
      }
    }
  }
  return worst;
}

ConnectionPtr make_connection(GridPtr grid, const FluxMatrix& flux,
                              const PeriodicOneForm& beta) {
  if (!grid) throw Error("connection needs a grid");
  const EdgeField e = beta.components.empty()
                          ? EdgeField::zero(*grid)
                          : EdgeField::from_one_form(*grid, beta);
  return std::make_shared<const Connection>(grid, flux, e);
}

ConnectionPtr make_connection(GridPtr grid, const FluxMatrix& flux, EdgeField beta) {
  return std::make_shared<const Connection>(std::move(grid), flux, std::move(beta));
}

// ---------------------------------------------------------------------------

Section::Section(ConnectionPtr conn, int m, CVec values)
    : conn_(std::move(conn)), m_(m), values_(std::move(values)) {
  if (!conn_) throw Error("section needs a connection");
  if (static_cast<std::size_t>(values_.size()) != conn_->grid().size())
    throw Error("section values do not match the grid size");
}

cplx Section::value_at(const Coords& lattice_coords) const {
  const BaseGrid& g = grid();
  const int n = g.n();
  Coords c = lattice_coords;
  cplx phase{1.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    if (c[a] == n) {
      c[a] = 0;
      phase *= conn_->twist(a, c, m_);
    }
  }
  return phase * values_[static_cast<Eigen::Index>(g.index(c))];
}

double Section::norm() const {
  const RVec& w = grid().volume_weights();
  return std::sqrt((values_.cwiseAbs2().array() * w.array()).sum());
}

void Section::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0)) throw Error("cannot normalize a zero section");
  values_ /= nrm;
}

cplx Section::inner(const Section& other) const {
  if (!compatible(other)) throw Error("inner product of incompatible sections");
  const RVec& w = grid().volume_weights();
  cplx acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    acc += std::conj(values_[i]) * other.values_[i] * w[i];
  return acc;
}

bool Section::compatible(const Section& other) const {
  return m_ == other.m_ && conn_ == other.conn_;
}

// ---------------------------------------------------------------------------

ConnectionPtr gauge_transform(const ConnectionPtr& conn, const RVec& chi) {
  const BaseGrid& g = conn->grid();
  if (static_cast<std::size_t>(chi.size()) != g.size())
    throw Error("gauge function sampled on a different grid");
  EdgeField beta = conn->beta() + EdgeField::gradient(g, chi).scaled(-1.0);
  return make_connection(conn->grid_ptr(), conn->flux(), std::move(beta));
}

std::pair<ConnectionPtr, Section> gauge_transform(const ConnectionPtr& conn,
                                                  const Section& s,
                                                  const RVec& chi) {
  if (s.connection_ptr() != conn)
    throw Error("section does not belong to the connection being transformed");
  ConnectionPtr next = gauge_transform(conn, chi);
  CVec values = s.values();
  const int m = s.weight();
  for (Eigen::Index i = 0; i < values.size(); ++i)
    values[i] *= std::polar(1.0, m * chi[i]);
  return {next, Section(next, m, std::move(values))};
}

}  // namespace nbl
