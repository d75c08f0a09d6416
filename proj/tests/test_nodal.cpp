#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "nbl/nodal.hpp"

using namespace nbl;

TEST_SUITE("nodal_topology") {

TEST_CASE("automatic fiber resolution") {
  CHECK(auto_n_theta(32, 1) == 32);
  CHECK(auto_n_theta(8, 1) == 8);
  CHECK(auto_n_theta(8, 2) == 16);
  CHECK(auto_n_theta(12, 3) == 24);
  CHECK(auto_n_theta(12, 0) == 12);
  CHECK(auto_n_theta(16, -3) == 32);
}

TEST_CASE("trivial bundle, f = 1, m = 1: the lift is cos theta") {
  const Section s(testing::flat(8, 0), 1, CVec::Ones(64));
  const LiftedField F = lift(s, 8);
  for (std::size_t i = 0; i < 64; ++i)
    for (int t = 0; t < 8; ++t)
      CHECK(F.value(F.site(i, t)) == doctest::Approx(std::cos(2 * M_PI * t / 8)).epsilon(1e-15));
}

TEST_CASE("lift matches a cos m theta + b sin m theta sitewise") {
  const auto eig = testing::solve(testing::perturbed(16, 1), 2, 2).front();
  const LiftedField F = lift(eig.section);
  for (std::size_t i = 0; i < 256; ++i) {
    const cplx f = eig.section.values()[static_cast<Eigen::Index>(i)];
    for (int t = 0; t < F.n_theta(); ++t) {
      const double th = F.theta(t);
      CHECK(std::abs(F.value(F.site(i, t)) - (f.real() * std::cos(2 * th) + f.imag() * std::sin(2 * th))) < 1e-14);
    }
  }
}

TEST_CASE("wrap neighbors realize the twist rule exactly") {
  // Crossing the x1 wrap into (0, j): the neighbor value must equal the
  // lifted twisted continuation f(n, j) = twist * f(0, j) at the same θ.
  for (int m : {1, 2, -1}) {
    const int n = 16;
    const ConnectionPtr c = testing::perturbed(n, 1);
    const Section s(c, m, CVec::Random(n * n));
    const LiftedField F = lift(s);
    for (int j = 0; j < n; ++j) {
      const std::size_t edge = c->grid().index({n - 1, j, 0});
      const cplx cont = s.value_at({n, j, 0});
      for (int t = 0; t < F.n_theta(); ++t) {
        const std::size_t nb = F.neighbor(F.site(edge, t), 0, +1);
        CHECK(F.base_of(nb) == c->grid().index({0, j, 0}));
        const double expect = (cont * std::polar(1.0, -m * F.theta(t))).real();
        CHECK(std::abs(F.value(nb) - expect) < 1e-13);
        CHECK(F.neighbor(nb, 0, -1) == F.site(edge, t));
      }
    }
  }
}

TEST_CASE("fiber shift across the x1 wrap is j n_theta / n") {
  const ConnectionPtr c = testing::flat(16, 1);
  for (int j = 0; j < 16; ++j) CHECK(c->fiber_shift(0, {0, j, 0}, 32) == 2 * j);
  CHECK_THROWS_AS(c->fiber_shift(0, {0, 1, 0}, 24), Error);
  const Section s(c, 1, CVec::Ones(256));
  CHECK_THROWS_AS(lift(s, 24), Error);
}

TEST_CASE("m = 0 lift is constant along fibers") {
  const auto eig = testing::solve(testing::perturbed(16, 1), 0, 3)[1];
  const LiftedField F = lift(eig.section);
  for (std::size_t i = 0; i < 256; ++i)
    for (int t = 1; t < F.n_theta(); ++t) CHECK(F.value(F.site(i, t)) == F.value(F.site(i, 0)));
}

TEST_CASE("fiber zero counts") {
  CHECK(fiber_zero_count(1, 0, 2, 1e-12) == 4);
  CHECK(fiber_zero_count(1, 1, 1, 1e-12) == 2);
  CHECK_FALSE(fiber_zero_count(0, 0, 3, 1e-12).has_value());
  CHECK(fiber_zero_count(0.3, -0.2, -3, 1e-12) == 6);
  CHECK_THROWS_AS(fiber_zero_count(1, 0, 0, 1e-12), Error);
  const auto z = fiber_zeros(1, 1, 1);
  REQUIRE(z.size() == 2);
  CHECK(z[0] == doctest::Approx(3 * M_PI / 4).epsilon(1e-14));
  CHECK(z[1] == doctest::Approx(7 * M_PI / 4).epsilon(1e-14));
  for (int m : {1, 2, 5}) {
    const double a = 0.4, b = -1.3;
    for (double th : fiber_zeros(a, b, m))
      CHECK(std::abs(a * std::cos(m * th) + b * std::sin(m * th)) < 1e-12);
  }
}

TEST_CASE("trivial bundle product field: 2 domains, 2 nodal components, margin near 1") {
  const Section s(testing::flat(8, 0), 1, CVec::Ones(64));
  const LiftedField F = lift(s, 8);
  CHECK(nodal_domains(F) == 2);
  CHECK(nodal_set_components(F) == 2);
  const LiftedField fine = lift(s, 64);
  CHECK(regularity_margin(fine) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("degenerate fields are rejected") {
  const Section zero(testing::flat(8, 1), 1, CVec::Zero(64));
  CHECK_THROWS_AS(nodal_domains(lift(zero)), Error);
  CHECK_THROWS_AS(nodal_set_components(lift(zero)), Error);
}

TEST_CASE("section zero winding") {
  SUBCASE("trivial bundle, nonvanishing section") {
    const Section s(testing::flat(12, 0), 1, CVec::Constant(144, cplx(0.3, 0.4)));
    const WindingReport w = section_zero_winding(s);
    CHECK(w.count == 0);
    CHECK(w.total_winding == 0);
  }
  SUBCASE("total winding equals m c") {
    for (int c : {1, 2})
      for (int m : {1, 2, 3}) {
        if (m * c > 3) continue;
        const auto eig = testing::solve(testing::perturbed(24, c), m, 2).front();
        const WindingReport w = section_zero_winding(eig.section);
        CHECK(w.total_winding == m * c);
        CHECK(w.count >= m * c);
      }
  }
  SUBCASE("d = 3 is rejected") {
    const Section s(testing::flat(8, 1, 3), 1, CVec::Ones(512));
    CHECK_THROWS_AS(section_zero_winding(s), Error);
  }
}

TEST_CASE("covering survey") {
  const ConnectionPtr c = testing::perturbed(24, 1);
  SUBCASE("nonvanishing section, m = 1: every sample has 2 zeros") {
    const Section s(testing::flat(24, 0), 1, CVec::Constant(576, cplx(1, 2)));
    const auto h = covering_survey(s, 500, 1e-6);
    CHECK(h.counts.size() == 1);
    CHECK(h.counts.at(2) == 500);
    CHECK(h.fraction(2) == 1.0);
  }
  SUBCASE("m = 3 eigensection: 6 zeros wherever defined") {
    const auto eig = testing::solve(c, 3, 2).front();
    const double tau = 1e-6 * eig.section.values().cwiseAbs().maxCoeff();
    const auto h = covering_survey(eig.section, 500, tau);
    for (const auto& [k, v] : h.counts) CHECK(k == 6);
    CHECK(h.fraction(6) >= 0.99);
  }
  SUBCASE("large tau leaves samples undefined") {
    const auto eig = testing::solve(c, 1, 2).front();
    const double tau = 0.5 * eig.section.values().cwiseAbs().maxCoeff();
    const auto h = covering_survey(eig.section, 500, tau);
    CHECK(h.undefined > 0);
    for (const auto& [k, v] : h.counts) CHECK(k % 2 == 0);
  }
  SUBCASE("m = 0 is rejected") {
    const Section s(c, 0, CVec::Ones(576));
    CHECK_THROWS_AS(covering_survey(s, 10, 0.0), Error);
  }
}

TEST_CASE("two-domain law for perturbed c = 1 eigenfunctions, stable across resolutions") {
  for (int m : {1, 2}) {
    std::vector<std::pair<int, int>> seen[2];
    int r = 0;
    for (int n : {32, 48}) {
      const auto eigs = testing::solve(testing::perturbed(n, 1), m, 4);
      const ClusterReport cl = detect_clusters(eigs, 1e-6);
      for (int i = 0; i < 3; ++i) {
        REQUIRE(cl.simple(i));
        const NodalReport rep = analyze_nodal(eigs[i].section);
        CHECK(rep.nodal_domain_count == 2);
        CHECK(rep.nodal_set_component_count == 1);
        CHECK(rep.regularity_margin > 0.0);
        CHECK(rep.takes_both_signs);
        seen[r].emplace_back(rep.nodal_domain_count, rep.nodal_set_component_count);
      }
      ++r;
    }
    CHECK(seen[0] == seen[1]);
  }
}

TEST_CASE("m = 0 eigenfunctions: lifted domains are preimages of base domains") {
  const auto eigs = testing::solve(testing::perturbed(24, 1), 0, 6);
  std::set<int> counts;
  for (const auto& e : eigs) {
    const int base = base_nodal_domains(e.section);
    CHECK(nodal_domains(lift(e.section)) == base);
    counts.insert(base);
  }
  CHECK(counts.size() >= 2);
}

TEST_CASE("nodal report fields") {
  const auto eig = testing::solve(testing::perturbed(16, 1), 1, 2).front();
  NodalOptions o;
  o.sample_count = 200;
  const NodalReport r = analyze_nodal(eig.section, o);
  CHECK(r.m == 1);
  CHECK(r.n == 16);
  CHECK(r.n_theta == 16);
  CHECK(r.lattice_size == 256u * 16u);
  CHECK(r.covering.samples == 200);
  REQUIRE(r.winding.has_value());
  CHECK(r.winding->total_winding == 1);
  CHECK(r.nodal_domain_count >= 2);
}

}
