#include "nbl/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

namespace nbl {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
}

// ---------------------------------------------------------------------------

int auto_n_theta(int n, int m) {
  const int target = 8 * std::max(std::abs(m), 1);
  return ((target + n - 1) / n) * n;
}

LiftedField::LiftedField(const Section& s, int n_theta)
    : conn_(s.connection_ptr()), m_(s.weight()), n_theta_(n_theta) {
  const BaseGrid& g = grid();
  if (n_theta < 2) throw Error("n_theta must be at least 2");
  shift_.assign(g.dim(), std::vector<int>(g.size(), 0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coords c = g.coords(i);
    for (int a = 0; a < g.dim(); ++a)
      if (c[a] == 0) shift_[a][i] = conn_->fiber_shift(a, c, n_theta);
  }

  values_.resize(g.size() * static_cast<std::size_t>(n_theta));
  std::vector<double> cs(n_theta), sn(n_theta);
  for (int t = 0; t < n_theta; ++t) {
    const double th = m_ * theta(t);
    cs[t] = std::cos(th);
    sn[t] = std::sin(th);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx f = s.values()[static_cast<Eigen::Index>(i)];
    for (int t = 0; t < n_theta; ++t)
      values_[site(i, t)] = f.real() * cs[t] + f.imag() * sn[t];
  }
}

std::size_t LiftedField::neighbor(std::size_t st, int axis, int step) const {
  const std::size_t base = base_of(st);
  int t = fiber_of(st);
  if (axis == dim()) {
    t = ((t + step) % n_theta_ + n_theta_) % n_theta_;
    return site(base, t);
  }
  bool wrapped = false;
  const std::size_t next = grid().neighbor(base, axis, step, &wrapped);
  if (wrapped) {
    // entering `next` forward, or leaving `base` backward
    t += step > 0 ? shift_[axis][next] : -shift_[axis][base];
    t = ((t % n_theta_) + n_theta_) % n_theta_;
  }
  return site(next, t);
}

double LiftedField::spacing(int axis) const {
  return axis == dim() ? kTwoPi / n_theta_ : grid().spacing();
}

std::vector<std::size_t> LiftedField::cell_corners(std::size_t st) const {
  std::vector<std::size_t> corners{st};
  corners.reserve(std::size_t{1} << (dim() + 1));
  for (int axis = 0; axis <= dim(); ++axis) {
    const std::size_t count = corners.size();
    for (std::size_t c = 0; c < count; ++c) corners.push_back(neighbor(corners[c], axis, +1));
  }
  return corners;
}

LiftedField lift(const Section& s, int n_theta_request) {
  const int n = s.grid().n();
  const int n_theta = n_theta_request > 0 ? n_theta_request : auto_n_theta(n, s.weight());
  return LiftedField(s, n_theta);
}

// ---------------------------------------------------------------------------

std::vector<double> fiber_zeros(double a, double b, int m) {
  if (m == 0) throw Error("fiber zeros are undefined for weight 0");
  const int am = std::abs(m);
  if (m < 0) b = -b;
  // a cos kθ + b sin kθ = R cos(kθ - ψ) vanishes at kθ = ψ + π/2 + jπ
  const double psi = std::atan2(b, a);
  std::vector<double> roots;
  for (int j = 0; j < 2 * am; ++j) {
    double th = std::fmod((psi + 0.5 * kPi + j * kPi) / am, kTwoPi);
    if (th < 0.0) th += kTwoPi;
    if (th >= kTwoPi) th -= kTwoPi;
    roots.push_back(th);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> distinct;
  for (double r : roots) {
    if (distinct.empty() || r - distinct.back() > 1e-12) distinct.push_back(r);
  }
  if (distinct.size() > 1 && distinct.front() + kTwoPi - distinct.back() <= 1e-12)
    distinct.pop_back();
  return distinct;
}

std::optional<int> fiber_zero_count(double a, double b, int m, double tau) {
  if (m == 0) throw Error("fiber zero count is undefined for weight 0");
  if (a * a + b * b <= tau * tau) return std::nullopt;
  const auto roots = fiber_zeros(a, b, m);
  const double r = std::hypot(a, b);
  int count = 0;
  for (double th : roots) {
    if (std::abs(a * std::cos(m * th) + b * std::sin(m * th)) <= 1e-9 * r) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------

namespace {

void require_usable(const LiftedField& field) {
  std::size_t nonzero = 0;
  for (double v : field.values())
    if (std::abs(v) >= kZeroSite) ++nonzero;
  if (nonzero == 0) throw Error("lifted field vanishes identically");
  if (2 * nonzero < field.size())
    throw Error("lifted field vanishes on a majority of lattice sites");
}

int sign_of(double v) { return v >= kZeroSite ? 1 : (v <= -kZeroSite ? -1 : 0); }

bool mixed_cell(const LiftedField& field, const std::vector<std::size_t>& corners) {
  bool pos = false, neg = false;
  for (auto c : corners) {
    const int s = sign_of(field.value(c));
    if (s == 0) return true;
    pos |= s > 0;
    neg |= s < 0;
  }
  return pos && neg;
}

std::size_t count_roots(DisjointSets& sets, const std::vector<char>& active) {
  std::size_t roots = 0;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i] && sets.find(i) == i) ++roots;
  return roots;
}

}  // namespace

int nodal_domains(const LiftedField& field) {
  require_usable(field);
  const std::size_t n = field.size();
  DisjointSets sets(n);
  std::vector<char> active(n, 0);
  for (std::size_t s = 0; s < n; ++s) active[s] = sign_of(field.value(s)) != 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!active[s]) continue;
    const int sg = sign_of(field.value(s));
    for (int axis = 0; axis <= field.dim(); ++axis) {
      const std::size_t t = field.neighbor(s, axis, +1);
      if (sign_of(field.value(t)) == sg) sets.unite(s, t);
    }
  }
  return static_cast<int>(count_roots(sets, active));
}

int nodal_set_components(const LiftedField& field) {
  require_usable(field);
  const std::size_t n = field.size();
  std::vector<char> mixed(n, 0);
  for (std::size_t s = 0; s < n; ++s) mixed[s] = mixed_cell(field, field.cell_corners(s));
  DisjointSets sets(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!mixed[s]) continue;
    for (int axis = 0; axis <= field.dim(); ++axis) {
      const std::size_t t = field.neighbor(s, axis, +1);
      if (mixed[t]) sets.unite(s, t);
    }
  }
  return static_cast<int>(count_roots(sets, mixed));
}

int base_nodal_domains(const Section& s) {
  const BaseGrid& g = s.grid();
  const CVec& f = s.values();
  std::vector<char> active(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    active[i] = sign_of(f[static_cast<Eigen::Index>(i)].real()) != 0;
  DisjointSets sets(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!active[i]) continue;
    const int sg = sign_of(f[static_cast<Eigen::Index>(i)].real());
    for (int a = 0; a < g.dim(); ++a) {
      const auto j = g.neighbor(i, a, +1);
      if (sign_of(f[static_cast<Eigen::Index>(j)].real()) == sg) sets.unite(i, j);
    }
  }
  return static_cast<int>(count_roots(sets, active));
}

// ---------------------------------------------------------------------------

WindingReport section_zero_winding(const Section& s, double threshold) {
  const BaseGrid& g = s.grid();
  if (g.dim() != 2) throw Error("section winding is defined for d = 2 only");
  WindingReport report;
  report.min_corner_modulus = std::numeric_limits<double>::infinity();
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::array<Coords, 4> corners{Coords{i, j, 0}, Coords{i, j + 1, 0},
                                          Coords{i + 1, j + 1, 0}, Coords{i + 1, j, 0}};
      std::array<cplx, 4> v;
      for (int c = 0; c < 4; ++c) {
        v[c] = s.value_at(corners[c]);
        const double mod = std::abs(v[c]);
        report.min_corner_modulus = std::min(report.min_corner_modulus, mod);
        if (mod <= threshold || mod == 0.0)
          throw Error("section vanishes at a plaquette corner; modulus " +
                      std::to_string(mod) + " <= threshold " + std::to_string(threshold));
      }
      double turn = 0.0;
      for (int c = 0; c < 4; ++c) turn += std::arg(v[(c + 1) % 4] / v[c]);
      const int w = static_cast<int>(std::lround(turn / kTwoPi));
      if (w != 0) {
        ++report.count;
        report.total_winding += w;
      }
    }
  }
  return report;
}

double CoveringHistogram::fraction(int zero_count) const {
  const auto it = counts.find(zero_count);
  const int defined = samples - undefined;
  return defined == 0 || it == counts.end() ? 0.0 : static_cast<double>(it->second) / defined;
}

CoveringHistogram covering_survey(const Section& s, int sample_count, double tau,
                                  std::uint64_t seed) {
  if (s.weight() == 0) throw Error("covering survey needs a nonzero weight");
  CoveringHistogram hist;
  hist.samples = sample_count;
  hist.tau = tau;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, s.grid().size() - 1);
  for (int k = 0; k < sample_count; ++k) {
    const cplx f = s.values()[static_cast<Eigen::Index>(pick(rng))];
    const auto count = fiber_zero_count(f.real(), f.imag(), s.weight(), tau);
    if (count)
      ++hist.counts[*count];
    else
      ++hist.undefined;
  }
  return hist;
}

double regularity_margin(const LiftedField& field) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < field.size(); ++s) {
    const auto corners = field.cell_corners(s);
    if (!mixed_cell(field, corners)) continue;
    std::size_t best = corners.front();
    for (auto c : corners)
      if (std::abs(field.value(c)) < std::abs(field.value(best))) best = c;
    double g2 = 0.0;
    for (int axis = 0; axis <= field.dim(); ++axis) {
      const double fwd = field.value(field.neighbor(best, axis, +1));
      const double bwd = field.value(field.neighbor(best, axis, -1));
      const double d = (fwd - bwd) / (2.0 * field.spacing(axis));
      g2 += d * d;
    }
    margin = std::min(margin, std::sqrt(g2));
  }
  return margin;
}

NodalReport analyze_nodal(const Section& s, const NodalOptions& opts) {
  NodalReport report;
  report.m = s.weight();
  report.n = s.grid().n();
  const LiftedField field = lift(s, opts.n_theta);
  report.n_theta = field.n_theta();
  report.lattice_size = field.size();
  bool pos = false, neg = false;
  for (double v : field.values()) {
    pos |= v >= kZeroSite;
    neg |= v <= -kZeroSite;
  }
  report.takes_both_signs = pos && neg;
  report.nodal_domain_count = nodal_domains(field);
  report.nodal_set_component_count = nodal_set_components(field);
  report.regularity_margin = regularity_margin(field);
  if (s.weight() != 0) {
    const double fmax = s.values().cwiseAbs().maxCoeff();
    report.covering = covering_survey(s, opts.sample_count, opts.tau_relative * fmax, opts.seed);
  }
  if (s.grid().dim() == 2) {
    try {
      report.winding = section_zero_winding(s);
    } catch (const Error&) {
      report.winding.reset();
    }
  }
  return report;
}

}  // namespace nbl
