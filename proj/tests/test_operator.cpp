#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "helpers.hpp"

using namespace nbl;

namespace {

Eigen::MatrixXcd dense(const SparseC& k) { return Eigen::MatrixXcd(k); }

// Generalized eigenvalues of (K, M) by a dense solve, ascending.
Eigen::VectorXd dense_spectrum(const OperatorPair& op) {
  const RVec s = op.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd a = s.asDiagonal() * dense(op.stiffness) * s.asDiagonal();
  a = 0.5 * (a + a.adjoint().eval());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_SUITE("operator_assembly") {

TEST_CASE("flat trivial m = 0 stiffness is the 5-point graph Laplacian") {
  const int n = 12;
  const OperatorPair op = assemble_forms(testing::flat(n, 0), 0);
  const Eigen::MatrixXcd k = dense(op.stiffness);
  const GridPtr g = op.connection->grid_ptr();
  for (std::size_t i = 0; i < g->size(); ++i) {
    for (std::size_t j = 0; j < g->size(); ++j) {
      double expect = 0.0;
      if (i == j) expect = 4.0;
      for (int a = 0; a < 2; ++a)
        for (int s : {-1, 1})
          if (g->neighbor(i, a, s) == j) expect -= 1.0;
      CHECK(std::abs(k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expect) < 1e-14);
    }
  }
  CHECK((op.stiffness * CVec::Ones(n * n)).norm() < 1e-13);
}

TEST_CASE("5-point dispersion: smallest nonzero eigenvalue 2n^2(1 - cos(2pi/n))") {
  const int n = 16;
  const Eigen::VectorXd ev = dense_spectrum(assemble_forms(testing::flat(n, 0), 0));
  const double oracle = 2.0 * n * n * (1.0 - std::cos(2 * M_PI / n));
  CHECK(oracle == doctest::Approx(38.97).epsilon(1e-3));
  CHECK(std::abs(ev[0]) < 1e-10);
  for (int i = 1; i <= 4; ++i) CHECK(ev[i] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(ev[5] > oracle * 1.5);
}

TEST_CASE("plane waves satisfy the discrete eigen-relation") {
  const int n = 16;
  const OperatorPair op = assemble_forms(testing::flat(n, 0), 0);
  const GridPtr g = op.connection->grid_ptr();
  for (auto [k1, k2] : {std::pair{1, 0}, std::pair{2, 3}, std::pair{-1, 5}}) {
    CVec f(n * n);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto c = g->coords(i);
      f[static_cast<Eigen::Index>(i)] = std::polar(1.0, 2 * M_PI * (k1 * c[0] + k2 * c[1]) / n);
    }
    const double lam = 2.0 * n * n * (2.0 - std::cos(2 * M_PI * k1 / n) - std::cos(2 * M_PI * k2 / n));
    const CVec r = op.stiffness * f - lam * (op.mass.asDiagonal() * f);
    CHECK(r.norm() < 1e-12 * lam);
  }
}

TEST_CASE("constant section is in the kernel for m = 0, c = 0") {
  const OperatorPair op = assemble_forms(testing::flat(12, 0), 0);
  const Section s(op.connection, 0, CVec::Ones(144));
  CHECK(apply_operator(op, s).values().norm() < 1e-13);
  CHECK(std::abs(rayleigh_quotient(op, s)) < 1e-14);
}

TEST_CASE("stiffness is exactly Hermitian and positive semidefinite") {
  for (int m : {1, 2, -1}) {
    const OperatorPair op = assemble_forms(testing::perturbed(12, 1), m);
    CHECK(hermiticity_defect(op.stiffness) == 0.0);
    CHECK(op.mass.minCoeff() > 0.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 1000; ++trial) {
      CVec f(op.dim());
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = cplx(g(rng), g(rng));
      CHECK(rayleigh_quotient(op, Section(op.connection, m, f)) >= 0.0);
    }
  }
}

TEST_CASE("<Ks, t> = <s, Kt> for random sections") {
  const OperatorPair op = assemble_forms(testing::perturbed(16, 2), 3);
  const CVec s = CVec::Random(op.dim()), t = CVec::Random(op.dim());
  const cplx lhs = (op.stiffness * s).dot(t);
  const cplx rhs = s.dot(op.stiffness * t);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * s.norm() * t.norm());
}

TEST_CASE("edge-sum quadratic form equals f* K f") {
  const OperatorPair op = assemble_forms(testing::perturbed(12, 1), 2);
  const CVec f = CVec::Random(op.dim());
  const double direct = f.dot(op.stiffness * f).real();
  CHECK(quadratic_form(op, f) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("edge weights: e^{(d-2)u} h^{d-2} averaged over endpoints") {
  const GridPtr g3 = make_base_grid(3, 8, PeriodicField::cosine(0.2, {1, 0, 0}));
  for (std::size_t i = 0; i < g3->size(); i += 37) {
    const auto j = g3->neighbor(i, 0, +1);
    const double expect = 0.5 * (std::exp(g3->conformal()[static_cast<Eigen::Index>(i)]) +
                                 std::exp(g3->conformal()[static_cast<Eigen::Index>(j)])) / 8.0;
    CHECK(edge_weight(*g3, i, 0) == doctest::Approx(expect).epsilon(1e-14));
  }
  const GridPtr g2 = make_base_grid(2, 8, PeriodicField::random(2, 2, 0.5, 1));
  for (std::size_t i = 0; i < g2->size(); ++i) CHECK(edge_weight(*g2, i, 1) == 1.0);
}

TEST_CASE("m and -m spectra coincide") {
  for (int m : {1, 2}) {
    const ConnectionPtr c = testing::perturbed(12, 1);
    const Eigen::VectorXd a = dense_spectrum(assemble_forms(c, m));
    const Eigen::VectorXd b = dense_spectrum(assemble_forms(c, -m));
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("m = 0 with a conformal metric keeps the constant zero mode") {
  const auto eigs = testing::solve(testing::perturbed(16, 1), 0, 2);
  CHECK(std::abs(eigs[0].lambda) < 1e-10);
  const CVec& f = eigs[0].section.values();
  CHECK((f.array() - f[0]).abs().maxCoeff() < 1e-8);
}

TEST_CASE("d = 2 constant conformal factor scales the spectrum by e^{-2k}") {
  const double k = 0.35;
  const ConnectionPtr flat = testing::flat(12, 1);
  const ConnectionPtr scaled = make_connection(make_base_grid(2, 12, PeriodicField::constant(k)),
                                               FluxMatrix::planar(1), PeriodicOneForm::zero(2));
  const Eigen::VectorXd a = dense_spectrum(assemble_forms(flat, 1));
  const Eigen::VectorXd b = dense_spectrum(assemble_forms(scaled, 1));
  CHECK((b - std::exp(-2 * k) * a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Landau ground state at n = 48 is near 2 pi and simple") {
  const auto eigs = testing::solve(testing::flat(48, 1), 1, 4);
  CHECK(std::abs(eigs[0].lambda - 2 * M_PI) / (2 * M_PI) < 0.05);
  CHECK(eigs[1].lambda - eigs[0].lambda > eigs[0].lambda);
}

TEST_CASE("ground eigenvalue changes by at most 2% from n = 48 to n = 96") {
  const double a = testing::solve(testing::perturbed(48, 1), 1, 2)[0].lambda;
  const double b = testing::solve(testing::perturbed(96, 1), 1, 2)[0].lambda;
  CHECK(std::abs(b - a) / b <= 0.02);
}

TEST_CASE("total eigenvalue adds m^2") {
  CHECK(total_eigenvalue(0.0, 0) == 0.0);
  CHECK(total_eigenvalue(2 * M_PI, 1) == doctest::Approx(2 * M_PI + 1));
  // flat trivial product: base mode e^{2 pi i x1} (4 pi^2 in the continuum)
  // times the fiber mode e^{2 i theta}
  CHECK(total_eigenvalue(4 * M_PI * M_PI, 2) == doctest::Approx(4 * M_PI * M_PI + 4));
}

TEST_CASE("operator application checks the weight") {
  const OperatorPair op = assemble_forms(testing::flat(12, 1), 1);
  CHECK_THROWS_AS(apply_operator(op, Section(op.connection, 2, CVec::Ones(144))), Error);
  CHECK_THROWS_AS(rayleigh_quotient(op, Section(op.connection, 1, CVec::Zero(144))), Error);
}

}
