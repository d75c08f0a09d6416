#include "nbl/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nbl/nodal.hpp"
#include "nbl/torus.hpp"

namespace nbl::sphere {

double legendre_p(int N, int m, double x) {
  if (m < 0 || m > N)
    throw Error("legendre_p needs 0 <= m <= N, got N=" + std::to_string(N) +
                " m=" + std::to_string(m));
  if (!(std::abs(x) <= 1.0)) throw Error("legendre_p needs |x| <= 1");
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    double odd = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= -odd * s;
      odd += 2.0;
    }
  }
  if (N == m) return pmm;
  double prev = pmm;
  double cur = x * (2 * m + 1) * pmm;
  for (int l = m + 2; l <= N; ++l) {
    const double next = (x * (2 * l - 1) * cur - (l + m - 1) * prev) / (l - m);
    prev = cur;
    cur = next;
  }
  return cur;
}

SphereGrid default_grid(int N, int m, int refinement) {
  if (m < 1) throw Error("sphere grid needs m >= 1");
  const int step = 4 * m;
  SphereGrid g;
  g.n_theta = ((8 * N + step - 1) / step) * step;
  g.n_phi = std::max(16 * N, 2 * g.n_theta);
  for (int r = 0; r < refinement; ++r) {
    g.n_theta *= 2;
    g.n_phi *= 2;
  }
  return g;
}

namespace {

// cos(π num / den) with exact zeros at odd multiples of π/2.
double cos_pi_fraction(long long num, long long den) {
  num %= 2 * den;
  if (num < 0) num += 2 * den;
  if (2 * num == den || 2 * num == 3 * den) return 0.0;
  return std::cos(kPi * static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

SphereHarmonic make_harmonic(int N, int m, const SphereGrid& grid) {
  SphereHarmonic h;
  h.N = N;
  h.m = m;
  h.grid = grid;
  const double norm = std::sqrt(2.0 * N + 1.0);
  h.latitude.resize(grid.n_phi + 1);
  for (int r = 0; r <= grid.n_phi; ++r)
    h.latitude[r] = norm * legendre_p(N, m, cos_pi_fraction(r, grid.n_phi));
  h.meridian.resize(grid.n_theta);
  for (int t = 0; t < grid.n_theta; ++t)
    h.meridian[t] = cos_pi_fraction(2LL * m * t, grid.n_theta);
  return h;
}

int legendre_interior_roots(int N, int m) {
  const int samples = 4000;
  int roots = 0;
  double prev = legendre_p(N, m, std::cos(kPi * 0.5 / samples));
  for (int i = 1; i < samples; ++i) {
    const double v = legendre_p(N, m, std::cos(kPi * (i + 0.5) / samples));
    if ((prev < 0.0) != (v < 0.0)) ++roots;
    prev = v;
  }
  return roots;
}

namespace {

int sign_of(double v) { return v >= kZeroSite ? 1 : (v <= -kZeroSite ? -1 : 0); }

// Site layout: 0 = north pole, 1 + (r-1) n_theta + t for rows 1..n_phi-1,
// last = south pole.
struct SphereLattice {
  const SphereHarmonic& h;
  int n_phi, n_theta;
  std::size_t north = 0, south;

  explicit SphereLattice(const SphereHarmonic& harmonic)
      : h(harmonic), n_phi(harmonic.grid.n_phi), n_theta(harmonic.grid.n_theta) {
    south = 1 + static_cast<std::size_t>(n_phi - 1) * n_theta;
  }
  std::size_t size() const { return south + 1; }
  std::size_t site(int r, int t) const {
    if (r == 0) return north;
    if (r == n_phi) return south;
    t = ((t % n_theta) + n_theta) % n_theta;
    return 1 + static_cast<std::size_t>(r - 1) * n_theta + t;
  }
  double value(int r, int t) const {
    t = ((t % n_theta) + n_theta) % n_theta;
    return h.value(r, t);
  }
};

// Cells: quads (r, t) for rows r = 1..n_phi-2 and the two polar fans.
struct CellLayout {
  int n_phi, n_theta;
  std::size_t quads, total;
  CellLayout(int np, int nt) : n_phi(np), n_theta(nt) {
    quads = static_cast<std::size_t>(n_phi - 2) * n_theta;
    total = quads + 2 * static_cast<std::size_t>(n_theta);
  }
  std::size_t quad(int r, int t) const {
    t = ((t % n_theta) + n_theta) % n_theta;
    return static_cast<std::size_t>(r - 1) * n_theta + t;
  }
  std::size_t north_fan(int t) const {
    return quads + static_cast<std::size_t>(((t % n_theta) + n_theta) % n_theta);
  }
  std::size_t south_fan(int t) const {
    return quads + n_theta + static_cast<std::size_t>(((t % n_theta) + n_theta) % n_theta);
  }
};

bool mixed(std::initializer_list<double> values) {
  bool pos = false, neg = false;
  for (double v : values) {
    const int s = sign_of(v);
    if (s == 0) return true;
    pos |= s > 0;
    neg |= s < 0;
  }
  return pos && neg;
}

bool changes_or_vanishes(double a, double b) {
  return a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0);
}

}  // namespace

SphereNodalReport sphere_nodal_counts(int N, int m, const SphereGrid& grid) {
  if (m < 1 || N < m)
    throw Error("sphere nodal counts need N >= m >= 1, got N=" + std::to_string(N) +
                " m=" + std::to_string(m));
  if (grid.n_phi < 16 * N || grid.n_theta < 4 * m)
    throw Error("sphere grid too coarse: need n_phi >= 16 N and n_theta >= 4 m");

  SphereNodalReport rep;
  rep.N = N;
  rep.m = m;
  rep.grid = grid;
  rep.latitude_zero_circles = legendre_interior_roots(N, m);
  rep.meridian_zeros = 2 * m;
  rep.predicted_domains = 2 * m * (N - m + 1);
  rep.predicted_singular_points = 2 * m * (N - m) + 2;
  rep.nm_expression = N * m;

  const SphereHarmonic h = make_harmonic(N, m, grid);
  // every latitude zero must show up as a sign change between rows
  int resolved = 0;
  for (int r = 1; r + 1 < grid.n_phi; ++r) {
    const double a = h.latitude[r], b = h.latitude[r + 1];
    if (a == 0.0 || (b != 0.0 && (a < 0.0) != (b < 0.0))) ++resolved;
  }
  if (resolved != rep.latitude_zero_circles)
    throw Error("sphere grid too coarse: resolved " + std::to_string(resolved) + " of " +
                std::to_string(rep.latitude_zero_circles) + " latitude zero circles");

  const SphereLattice lat(h);
  const int np = grid.n_phi, nt = grid.n_theta;

  // nodal domains
  {
    DisjointSets sets(lat.size());
    std::vector<char> active(lat.size(), 0);
    for (int r = 0; r <= np; ++r)
      for (int t = 0; t < (r == 0 || r == np ? 1 : nt); ++t)
        active[lat.site(r, t)] = sign_of(lat.value(r, t)) != 0;
    for (int r = 0; r < np; ++r) {
      for (int t = 0; t < nt; ++t) {
        const double v = lat.value(r, t);
        const int s = sign_of(v);
        if (s == 0) continue;
        if (r > 0 && sign_of(lat.value(r, t + 1)) == s) sets.unite(lat.site(r, t), lat.site(r, t + 1));
        if (sign_of(lat.value(r + 1, t)) == s) sets.unite(lat.site(r, t), lat.site(r + 1, t));
      }
    }
    int count = 0;
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (active[i] && sets.find(i) == i) ++count;
    rep.domain_count = count;
  }

  // nodal-set components and gradient margin over mixed cells
  const CellLayout cells(np, nt);
  std::vector<char> is_mixed(cells.total, 0);
  const double dphi = kPi / np, dtheta = kTwoPi / nt;
  double margin = std::numeric_limits<double>::infinity();
  auto consider = [&](double gphi, double gtheta) {
    margin = std::min(margin, std::hypot(gphi, gtheta));
  };
  for (int r = 1; r + 1 < np; ++r) {
    for (int t = 0; t < nt; ++t) {
      const double a = lat.value(r, t), b = lat.value(r, t + 1);
      const double c = lat.value(r + 1, t), d = lat.value(r + 1, t + 1);
      if (!mixed({a, b, c, d})) continue;
      is_mixed[cells.quad(r, t)] = 1;
      consider((c + d - a - b) / (2.0 * dphi), (b + d - a - c) / (2.0 * dtheta));
    }
  }
  for (int t = 0; t < nt; ++t) {
    const double pn = lat.value(0, 0), a = lat.value(1, t), b = lat.value(1, t + 1);
    if (mixed({pn, a, b})) {
      is_mixed[cells.north_fan(t)] = 1;
      consider((0.5 * (a + b) - pn) / dphi, (b - a) / dtheta);
    }
    const double ps = lat.value(np, 0), c = lat.value(np - 1, t), d = lat.value(np - 1, t + 1);
    if (mixed({ps, c, d})) {
      is_mixed[cells.south_fan(t)] = 1;
      consider((ps - 0.5 * (c + d)) / dphi, (d - c) / dtheta);
    }
  }
  rep.min_gradient_margin = margin;

  {
    DisjointSets sets(cells.total);
    auto link = [&](std::size_t x, std::size_t y) {
      if (is_mixed[x] && is_mixed[y]) sets.unite(x, y);
    };
    for (int r = 1; r + 1 < np; ++r) {
      for (int t = 0; t < nt; ++t) {
        link(cells.quad(r, t), cells.quad(r, t + 1));
        if (r + 2 < np) link(cells.quad(r, t), cells.quad(r + 1, t));
      }
    }
    for (int t = 0; t < nt; ++t) {
      link(cells.north_fan(t), cells.north_fan(t + 1));
      link(cells.south_fan(t), cells.south_fan(t + 1));
      link(cells.north_fan(t), cells.quad(1, t));
      link(cells.south_fan(t), cells.quad(np - 2, t));
    }
    int count = 0;
    for (std::size_t i = 0; i < cells.total; ++i)
      if (is_mixed[i] && sets.find(i) == i) ++count;
    rep.component_count = count;
  }

  // singular cells: both product factors vanish inside the quad
  {
    std::vector<char> singular(cells.quads, 0);
    for (int r = 1; r + 1 < np; ++r) {
      if (!changes_or_vanishes(h.latitude[r], h.latitude[r + 1])) continue;
      for (int t = 0; t < nt; ++t) {
        if (changes_or_vanishes(h.meridian[t], h.meridian[(t + 1) % nt]))
          singular[cells.quad(r, t)] = 1;
      }
    }
    DisjointSets sets(cells.quads);
    for (int r = 1; r + 1 < np; ++r) {
      for (int t = 0; t < nt; ++t) {
        const auto q = cells.quad(r, t);
        if (!singular[q]) continue;
        if (singular[cells.quad(r, t + 1)]) sets.unite(q, cells.quad(r, t + 1));
        if (r + 2 < np && singular[cells.quad(r + 1, t)]) sets.unite(q, cells.quad(r + 1, t));
      }
    }
    int clusters = 0;
    for (std::size_t i = 0; i < cells.quads; ++i)
      if (singular[i] && sets.find(i) == i) ++clusters;
    rep.singular_point_count = clusters + 2;
  }

  rep.domains_match_nm = rep.domain_count == rep.nm_expression;
  rep.singular_match_nm = rep.singular_point_count == rep.nm_expression;
  return rep;
}

FixedPointReport fixed_point_vanishing_check(int N, int m, double step) {
  if (m < 1) throw Error("fixed-point check needs m >= 1 (invariant harmonics excluded)");
  if (N < m) throw Error("fixed-point check needs N >= m");
  FixedPointReport rep;
  rep.N = N;
  rep.m = m;
  const double norm = std::sqrt(2.0 * N + 1.0);
  auto field = [&](double phi, double theta) {
    return norm * legendre_p(N, m, std::cos(phi)) * std::cos(m * theta);
  };
  rep.north_value = norm * legendre_p(N, m, 1.0);
  rep.south_value = norm * legendre_p(N, m, -1.0);
  const int directions = 16;
  for (int k = 0; k < directions; ++k) {
    const double th = kPi * k / directions;
    // great circle through the pole: (step, θ) and (step, θ + π)
    const double gn = (field(step, th) - field(step, th + kPi)) / (2.0 * step);
    const double gs = (field(kPi - step, th) - field(kPi - step, th + kPi)) / (2.0 * step);
    rep.north_gradient = std::max(rep.north_gradient, std::abs(gn));
    rep.south_gradient = std::max(rep.south_gradient, std::abs(gs));
  }
  double scale = 0.0;
  for (int k = 0; k <= 64; ++k) scale = std::max(scale, std::abs(norm * legendre_p(N, m, std::cos(kPi * k / 64))));
  const double tol = 1e-6 * std::max(scale, 1.0);
  rep.critical = std::abs(rep.north_value) <= tol && std::abs(rep.south_value) <= tol &&
                 rep.north_gradient <= tol && rep.south_gradient <= tol;
  return rep;
}

}  // namespace nbl::sphere
