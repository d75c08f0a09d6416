#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nbl/operator.hpp"

using namespace nbl;

TEST_SUITE("torus_geometry") {

TEST_CASE("flat grid has uniform volume weights 1/n^2") {
  const GridPtr g = make_base_grid(2, 16, PeriodicField::zero());
  CHECK(g->size() == 256);
  for (Eigen::Index i = 0; i < g->volume_weights().size(); ++i)
    CHECK(g->volume_weights()[i] == doctest::Approx(1.0 / 256).epsilon(1e-15));
}

TEST_CASE("constant conformal factor scales weights by e^{2k}") {
  const double k = 0.4;
  const GridPtr g = make_base_grid(2, 16, PeriodicField::constant(k));
  for (Eigen::Index i = 0; i < g->volume_weights().size(); ++i)
    CHECK(g->volume_weights()[i] == doctest::Approx(std::exp(2 * k) / 256).epsilon(1e-14));
}

TEST_CASE("d = 3 cosine conformal factor: weights and min/max ratio") {
  const GridPtr g = make_base_grid(3, 12, PeriodicField::cosine(0.1, {1, 0, 0}));
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x1 = g->coords(i)[0] / 12.0;
    const double expect = std::exp(0.3 * std::cos(2 * M_PI * x1)) / 1728.0;
    CHECK(g->volume_weights()[static_cast<Eigen::Index>(i)] == doctest::Approx(expect).epsilon(1e-13));
    lo = std::min(lo, g->volume_weights()[static_cast<Eigen::Index>(i)]);
    hi = std::max(hi, g->volume_weights()[static_cast<Eigen::Index>(i)]);
  }
  CHECK(lo / hi == doctest::Approx(std::exp(-0.6)).epsilon(1e-13));
}

TEST_CASE("grid construction rejects bad inputs") {
  CHECK_THROWS_AS(make_base_grid(4, 16, PeriodicField::zero()), Error);
  CHECK_THROWS_AS(make_base_grid(1, 16, PeriodicField::zero()), Error);
  CHECK_THROWS_AS(make_base_grid(2, 7, PeriodicField::zero()), Error);
  CHECK_THROWS_AS(make_base_grid(2, 16, PeriodicField::constant(2.5)), Error);
  CHECK_NOTHROW(make_base_grid(2, 8, PeriodicField::constant(2.0)));
}

TEST_CASE("random conformal factor is deterministic in the seed") {
  const GridPtr a = make_base_grid(2, 16, PeriodicField::random(2, 2, 0.3, 5));
  const GridPtr b = make_base_grid(2, 16, PeriodicField::random(2, 2, 0.3, 5));
  const GridPtr c = make_base_grid(2, 16, PeriodicField::random(2, 2, 0.3, 6));
  CHECK(a->conformal() == b->conformal());
  CHECK(a->conformal() != c->conformal());
  CHECK(a->conformal().cwiseAbs().maxCoeff() <= 0.3 + 1e-15);
}

TEST_CASE("periodic neighbors wrap on every axis") {
  const GridPtr g = make_base_grid(3, 8, PeriodicField::zero());
  bool wrapped = false;
  const std::size_t last = g->index({7, 3, 5});
  CHECK(g->neighbor(last, 0, +1, &wrapped) == g->index({0, 3, 5}));
  CHECK(wrapped);
  CHECK(g->neighbor(g->index({2, 0, 5}), 1, -1, &wrapped) == g->index({2, 7, 5}));
  CHECK(wrapped);
  CHECK(g->neighbor(g->index({2, 3, 5}), 2, +1, &wrapped) == g->index({2, 3, 6}));
  CHECK_FALSE(wrapped);
}

TEST_CASE("flux matrix must be antisymmetric") {
  CHECK_THROWS_AS(FluxMatrix::from_rows(2, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(FluxMatrix::from_rows(2, {{1, 1}, {-1, 0}}), Error);
  CHECK_THROWS_AS(FluxMatrix::from_rows(3, {{0, 1}, {-1, 0}}), Error);
  const FluxMatrix f = FluxMatrix::from_rows(3, {{0, 1, 0}, {-1, 0, 2}, {0, -2, 0}});
  CHECK(f(1, 2) == 2);
  CHECK(f(2, 1) == -2);
}

TEST_CASE("trivial bundle has unit twists") {
  const ConnectionPtr c = testing::flat(16, 0);
  for (int m : {-2, 1, 3})
    for (int j = 0; j <= 16; ++j) {
      CHECK(std::abs(c->twist(0, {16, j, 0}, m) - cplx(1, 0)) < 1e-15);
      CHECK(std::abs(c->twist(1, {j, 16, 0}, m) - cplx(1, 0)) < 1e-15);
    }
}

TEST_CASE("Landau gauge: x1-wrap twist is exp(-2 pi i m x2)") {
  const int n = 16;
  const ConnectionPtr c = testing::flat(n, 1);
  for (int m : {1, 2, -3})
    for (int j = 0; j < n; ++j) {
      const cplx expect = std::polar(1.0, -2 * M_PI * m * j / n);
      CHECK(std::abs(c->twist(0, {n, j, 0}, m) - expect) < 1e-13);
      // the x2-wrap carries no twist in this gauge
      CHECK(std::abs(c->twist(1, {j, n, 0}, m) - cplx(1, 0)) < 1e-13);
    }
}

// Independent plaquette summation from the m = 1 links over the (a, b)
// coordinate slice through `base`.
double summed_flux(const Connection& conn, int a, int b, std::size_t base = 0) {
  const BaseGrid& g = conn.grid();
  const Coords o = g.coords(base);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coords c = g.coords(i);
    bool on_slice = true;
    for (int e = 0; e < g.dim(); ++e)
      if (e != a && e != b && c[e] != o[e]) on_slice = false;
    if (!on_slice) continue;
    const std::size_t ia = g.neighbor(i, a, +1), ib = g.neighbor(i, b, +1);
    const cplx hol = edge_link(conn, i, a, 1) * edge_link(conn, ia, b, 1) *
                     std::conj(edge_link(conn, ib, a, 1)) * std::conj(edge_link(conn, i, b, 1));
    total -= std::arg(hol);
  }
  return total;
}

TEST_CASE("plaquette flux sums to 2 pi c (d = 2)") {
  for (int c : {0, 1, 2, -3}) {
    const ConnectionPtr conn = testing::perturbed(16, c);
    CHECK(summed_flux(*conn, 0, 1) == doctest::Approx(2 * M_PI * c).epsilon(1e-12));
    CHECK(conn->plaquette_flux(0, 1) == doctest::Approx(2 * M_PI * c).epsilon(1e-12));
  }
}

TEST_CASE("plaquette flux per plane in d = 3 is (2 pi, 0, 4 pi)") {
  const FluxMatrix f = FluxMatrix::from_rows(3, {{0, 1, 0}, {-1, 0, 2}, {0, -2, 0}});
  const ConnectionPtr conn = make_connection(make_base_grid(3, 8, PeriodicField::zero()), f,
                                             PeriodicOneForm::random(3, 1, 0.2, 4));
  for (std::size_t base : {std::size_t{0}, conn->grid().index({3, 5, 6})}) {
    CHECK(summed_flux(*conn, 0, 1, base) == doctest::Approx(2 * M_PI).epsilon(1e-12));
    CHECK(std::abs(summed_flux(*conn, 0, 2, base)) < 1e-10);
    CHECK(summed_flux(*conn, 1, 2, base) == doctest::Approx(4 * M_PI).epsilon(1e-12));
  }
}

TEST_CASE("twist rules satisfy the cocycle identity") {
  const FluxMatrix f = FluxMatrix::from_rows(3, {{0, 1, -1}, {-1, 0, 2}, {1, -2, 0}});
  const ConnectionPtr conn = make_connection(make_base_grid(3, 8, PeriodicField::zero()), f,
                                             PeriodicOneForm::zero(3));
  for (int m : {1, 2, 5}) CHECK(conn->cocycle_defect(m) < 1e-12);
  CHECK(testing::perturbed(12, 3)->cocycle_defect(2) < 1e-12);
}

TEST_CASE("constant gauge multiplies the section by one phase and keeps eta") {
  const ConnectionPtr conn = testing::perturbed(12, 1);
  const auto eig = testing::solve(conn, 1, 2).front();
  const RVec chi = RVec::Constant(144, 0.7);
  const auto [moved, s] = gauge_transform(conn, eig.section, chi);
  const cplx phase = std::polar(1.0, 0.7);
  CHECK((s.values() - phase * eig.section.values()).norm() < 1e-14);
  for (std::size_t i = 0; i < 144; ++i)
    for (int a = 0; a < 2; ++a)
      CHECK(moved->edge_integral(i, a) == doctest::Approx(conn->edge_integral(i, a)).epsilon(1e-14));
}

TEST_CASE("gauge transform is unitary and changes eta by the discrete gradient") {
  const ConnectionPtr conn = testing::perturbed(12, 1);
  const GridPtr g = conn->grid_ptr();
  const RVec chi = sample(*g, PeriodicField(0.0, {FourierTerm{{0, 1, 0}, 0.3, true}}));
  Section s(conn, 2, CVec::Random(144));
  const auto [moved, s2] = gauge_transform(conn, s, chi);
  CHECK(s2.norm() == doctest::Approx(s.norm()).epsilon(1e-14));
  CHECK(moved->flux() == conn->flux());
  for (std::size_t i = 0; i < g->size(); ++i)
    for (int a = 0; a < 2; ++a) {
      const double dchi = chi[static_cast<Eigen::Index>(g->neighbor(i, a, +1))] -
                          chi[static_cast<Eigen::Index>(i)];
      CHECK(moved->edge_integral(i, a) ==
            doctest::Approx(conn->edge_integral(i, a) - dchi).epsilon(1e-13));
    }
}

TEST_CASE("gauge transform rejects a field on another grid") {
  const ConnectionPtr conn = testing::flat(12, 1);
  CHECK_THROWS_AS(gauge_transform(conn, RVec::Zero(100)), Error);
}

TEST_CASE("sections normalize and refuse mixing") {
  const ConnectionPtr a = testing::perturbed(12, 1);
  const ConnectionPtr b = testing::perturbed(12, 1);
  Section s(a, 1, CVec::Random(144));
  s.normalize();
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.compatible(Section(a, 1, CVec::Ones(144))));
  CHECK_FALSE(s.compatible(Section(a, 2, CVec::Ones(144))));
  CHECK_FALSE(s.compatible(Section(b, 1, CVec::Ones(144))));
  CHECK_THROWS_AS(s.inner(Section(a, 2, CVec::Ones(144))), Error);
  CHECK_THROWS_AS(Section(a, 1, CVec::Ones(10)), Error);
}

TEST_CASE("section values past the cell follow the twist rule") {
  const int n = 12;
  const ConnectionPtr conn = testing::flat(n, 1);
  Section s(conn, 2, CVec::Random(n * n));
  for (int j = 0; j < n; ++j) {
    const cplx inside = s.values()[static_cast<Eigen::Index>(conn->grid().index({0, j, 0}))];
    CHECK(std::abs(s.value_at({n, j, 0}) - conn->twist(0, {n, j, 0}, 2) * inside) < 1e-14);
  }
}

}
