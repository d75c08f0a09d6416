#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nbl/perturbation.hpp"

using namespace nbl;

namespace {

Model landau(int n, int c, int m) {
  return Model::build(2, n, PeriodicField::zero(), FluxMatrix::planar(c), PeriodicOneForm::zero(2), m);
}

Model generic(int n, int m, int dim = 2) {
  FluxMatrix f(dim);
  f.set(0, 1, 1);
  return Model::build(dim, n, PeriodicField::random(dim, 2, 0.3, 11), f,
                      PeriodicOneForm::random(dim, 2, 0.5, 12), m);
}

std::vector<EigenPair> eigs_of(const OperatorPair& op, int k) {
  SolverOptions o;
  o.k = k;
  return lowest_eigenpairs(op, o);
}

SolverOptions with_k(int k) {
  SolverOptions o;
  o.k = k;
  return o;
}

}  // namespace

TEST_SUITE("perturbation_lab") {

TEST_CASE("constant conformal direction in d = 2: shift is -2 k lambda") {
  const Model model = generic(24, 1);
  const OperatorPair op = model.assemble();
  const auto eigs = eigs_of(op, 4);
  const double k = 0.7;
  const MetricVariation var{RVec::Constant(op.dim(), k)};
  for (int i = 0; i < 2; ++i) {
    const FirstOrderShift s = metric_first_order_shift(op, eigs, i, var);
    CHECK(s.discrete == doctest::Approx(-2 * k * eigs[i].lambda).epsilon(1e-9));
  }
}

TEST_CASE("d = 2 metric shift equals the conformal identity") {
  const Model model = generic(32, 1);
  const OperatorPair op = model.assemble();
  const auto eigs = eigs_of(op, 4);
  const auto var = MetricVariation::from_field(op.grid(), PeriodicField::cosine(0.2, {1, 0}));
  const FirstOrderShift s = metric_first_order_shift(op, eigs, 0, var);
  const double id = conformal_identity_shift(eigs[0], var);
  CHECK(std::abs(s.discrete - id) <= 1e-8 * std::abs(id));
}

TEST_CASE("metric and connection shifts match central differences with O(eps^2) convergence") {
  const Model model = generic(32, 1);
  const OperatorPair op = model.assemble();
  const auto eigs = eigs_of(op, 4);
  const BaseGrid& g = op.grid();

  SUBCASE("metric") {
    const auto var = MetricVariation::from_field(g, PeriodicField::random(2, 2, 0.1, 21));
    const double a = metric_first_order_shift(op, eigs, 0, var).discrete;
    const auto fd = finite_difference_check(model, 0, &var, nullptr, 1e-4, with_k(4), 1e-2);
    CHECK(fd.analytic == doctest::Approx(a).epsilon(1e-14));
    CHECK(fd.relative_error <= 1e-4);
    CHECK(fd.richardson_ratio >= 3.5);
    CHECK(fd.richardson_ratio <= 4.5);
  }
  SUBCASE("connection, beta-dot = 0.1 cos(2 pi x2) dx1") {
    PeriodicOneForm form = PeriodicOneForm::zero(2);
    form.components[0] = PeriodicField(0.0, {FourierTerm{{0, 1}, 0.1, false}});
    const auto var = ConnectionVariation::from_one_form(g, form);
    CHECK(var.flux_defect(g) < 1e-13);
    const auto fd = finite_difference_check(model, 0, nullptr, &var, 1e-4, with_k(4), 1e-2);
    CHECK(fd.relative_error <= 1e-4);
    CHECK(fd.richardson_ratio >= 3.5);
    CHECK(fd.richardson_ratio <= 4.5);
  }
}

TEST_CASE("d = 3 metric shift matches central differences") {
  const Model model = generic(10, 1, 3);
  const OperatorPair op = model.assemble();
  const auto var = MetricVariation::from_field(op.grid(), PeriodicField::random(3, 1, 0.1, 5));
  const auto fd = finite_difference_check(model, 0, &var, nullptr, 1e-4, with_k(4), 1e-2);
  CHECK(fd.relative_error <= 1e-4);
}

TEST_CASE("pure-gauge and zero connection directions do not move eigenvalues") {
  const Model model = generic(32, 2);
  const OperatorPair op = model.assemble();
  const auto eigs = eigs_of(op, 4);
  const BaseGrid& g = op.grid();
  const auto gauge = ConnectionVariation::pure_gauge(g, sample(g, PeriodicField::random(2, 2, 1.0, 3)));
  CHECK(gauge.flux_defect(g) < 1e-12);
  for (int i = 0; i < 3; ++i) {
    const FirstOrderShift s = connection_first_order_shift(op, eigs, i, gauge);
    CHECK(std::abs(s.discrete) <= 1e-10 * eigs[i].lambda);
    const FirstOrderShift z = connection_first_order_shift(op, eigs, i, ConnectionVariation{EdgeField::zero(g)});
    CHECK(z.discrete == 0.0);
  }
}

// The connection pairing with centered covariant differences sums by parts to
// the discrete derivative exactly; the metric pairing only converges.
TEST_CASE("continuum pairings against the discrete derivative") {
  double err_metric[2], err_conn[2];
  int r = 0;
  for (int n : {24, 48}) {
    const Model model = generic(n, 1);
    const OperatorPair op = model.assemble();
    const auto eigs = eigs_of(op, 3);
    const BaseGrid& g = op.grid();
    const auto mv = MetricVariation::from_field(g, PeriodicField::cosine(0.1, {1, 1}));
    PeriodicOneForm form = PeriodicOneForm::zero(2);
    form.components[1] = PeriodicField(0.0, {FourierTerm{{1, 0}, 0.2, true}});
    const auto cv = ConnectionVariation::from_one_form(g, form);
    const auto ms = metric_first_order_shift(op, eigs, 0, mv);
    const auto cs = connection_first_order_shift(op, eigs, 0, cv);
    err_metric[r] = std::abs(ms.continuum - ms.discrete) / std::abs(ms.discrete);
    err_conn[r] = std::abs(cs.continuum - cs.discrete) / std::abs(cs.discrete);
    CHECK(std::abs(cs.continuum_imag) <= 1e-12 * std::abs(cs.discrete));
    ++r;
  }
  CHECK(err_metric[1] < err_metric[0]);
  CHECK(err_metric[1] < 0.05);
  CHECK(err_conn[0] < 1e-12);
  CHECK(err_conn[1] < 1e-12);
}

TEST_CASE("degenerate eigenvalues are refused by the first-order formula") {
  const OperatorPair op = landau(24, 2, 1).assemble();
  const auto eigs = eigs_of(op, 4);
  const auto var = MetricVariation::from_field(op.grid(), PeriodicField::cosine(0.1, {1, 0}));
  try {
    metric_first_order_shift(op, eigs, 0, var);
    FAIL("expected DegenerateEigenvalueError");
  } catch (const DegenerateEigenvalueError& e) {
    CHECK(e.index() == 0);
    CHECK(e.cluster().size == 2);
  }
  CHECK_THROWS_AS(metric_first_order_shift(op, eigs, 7, var), Error);
}

TEST_CASE("direction names round-trip") {
  for (Direction d : {Direction::Metric, Direction::Connection, Direction::Both, Direction::PureGauge})
    CHECK(direction_from_string(to_string(d)) == d);
  CHECK_THROWS_AS(direction_from_string("sideways"), Error);
}

TEST_CASE("Landau multiplet splits under a generic connection perturbation") {
  SplitConfig cfg;
  cfg.n = 24;
  cfg.flux = 2;
  cfg.direction = Direction::Connection;
  cfg.epsilons = {1e-2, 1e-3};
  const SplitReport r = splitting_experiment(cfg);
  CHECK(r.multiplet_size == 2);
  REQUIRE(r.steps.size() == 2);
  for (const auto& s : r.steps) {
    CHECK(s.split);
    CHECK(s.gap > 0.0);
  }
  // first-order splitting is linear in ε
  const double ratio = r.steps[0].gap / r.steps[1].gap;
  CHECK(ratio > 8.0);
  CHECK(ratio < 12.0);
  CHECK(r.trace_relative_error <= 1e-6);
}

TEST_CASE("eps = 0 leaves the multiplet intact") {
  SplitConfig cfg;
  cfg.n = 24;
  cfg.flux = 2;
  cfg.epsilons = {0.0};
  cfg.sum_rule = false;
  const SplitReport r = splitting_experiment(cfg);
  REQUIRE(r.steps.size() == 1);
  CHECK_FALSE(r.steps[0].split);
  CHECK(r.steps[0].eigenvalues == r.eigenvalues_before);
}

TEST_CASE("pure-gauge splitting leaves the multiplet degenerate") {
  SplitConfig cfg;
  cfg.n = 24;
  cfg.flux = 2;
  cfg.direction = Direction::PureGauge;
  cfg.epsilons = {1e-2};
  const SplitReport r = splitting_experiment(cfg);
  CHECK(r.steps[0].gap < 1e-10);
  CHECK_FALSE(r.steps[0].split);
  CHECK(r.trace_relative_error <= 1e-6);
}

TEST_CASE("random connection directions preserve the Chern class") {
  const GridPtr g = make_base_grid(2, 24, PeriodicField::zero());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SplitConfig cfg;
    cfg.seed = seed;
    CHECK(random_connection_direction(*g, cfg).flux_defect(*g) < 1e-12);
    cfg.direction = Direction::PureGauge;
    CHECK(random_connection_direction(*g, cfg).flux_defect(*g) < 1e-12);
  }
}

}
