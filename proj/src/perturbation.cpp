#include "nbl/perturbation.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace nbl {

Model Model::build(int dim, int n, const PeriodicField& u, const FluxMatrix& flux,
                   const PeriodicOneForm& beta, int m) {
  const GridPtr grid = make_base_grid(dim, n, u);
  Model model;
  model.dim = dim;
  model.n = n;
  model.conformal = grid->conformal();
  model.flux = flux;
  model.beta = beta.components.empty() ? EdgeField::zero(*grid)
                                       : EdgeField::from_one_form(*grid, beta);
  model.m = m;
  return model;
}

ConnectionPtr Model::connection() const {
  return make_connection(make_base_grid_sampled(dim, n, conformal), flux, beta);
}

MetricVariation MetricVariation::from_field(const BaseGrid& grid, const PeriodicField& field) {
  return {sample(grid, field)};
}

ConnectionVariation ConnectionVariation::from_one_form(const BaseGrid& grid,
                                                       const PeriodicOneForm& form) {
  return {EdgeField::from_one_form(grid, form)};
}

ConnectionVariation ConnectionVariation::pure_gauge(const BaseGrid& grid, const RVec& chi) {
  return {EdgeField::gradient(grid, chi)};
}

double ConnectionVariation::flux_defect(const BaseGrid& grid) const {
  double worst = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    for (int b = a + 1; b < grid.dim(); ++b) {
      double total = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto ia = grid.neighbor(i, a, +1);
        const auto ib = grid.neighbor(i, b, +1);
        total += beta_dot.axes[a][static_cast<Eigen::Index>(i)] +
                 beta_dot.axes[b][static_cast<Eigen::Index>(ia)] -
                 beta_dot.axes[a][static_cast<Eigen::Index>(ib)] -
                 beta_dot.axes[b][static_cast<Eigen::Index>(i)];
      }
      worst = std::max(worst, std::abs(total));
    }
  }
  return worst;
}

Model perturbed(const Model& base, double t, const MetricVariation* metric,
                const ConnectionVariation* connection) {
  Model out = base;
  if (metric) out.conformal = base.conformal + t * metric->u_dot;
  if (connection) out.beta = base.beta + connection->beta_dot.scaled(t);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_simple(const std::vector<EigenPair>& eigs, int index, double gap_tol) {
  if (index < 0 || index >= static_cast<int>(eigs.size()))
    throw Error("eigenpair index " + std::to_string(index) + " out of range");
  const ClusterReport clusters = detect_clusters(eigs, gap_tol);
  const Cluster& c = clusters.groups[clusters.cluster_of(index)];
  if (c.size > 1) {
    throw DegenerateEigenvalueError(
        "eigenvalue " + std::to_string(index) + " lies in a cluster of size " +
            std::to_string(c.size) + "; the first-order formula needs a simple eigenvalue",
        index, c);
  }
}

// Covariant centered difference D_a f at point i.
cplx covariant_difference(const OperatorPair& op, const CVec& f, std::size_t i, int a) {
  const BaseGrid& g = op.grid();
  const auto fwd = g.neighbor(i, a, +1);
  const auto bwd = g.neighbor(i, a, -1);
  const cplx link_fwd = op.edges[i * g.dim() + a].link;
  const cplx link_bwd = op.edges[bwd * g.dim() + a].link;
  return (std::conj(link_fwd) * f[at(fwd)] - link_bwd * f[at(bwd)]) / (2.0 * g.spacing());
}

double metric_continuum(const OperatorPair& op, const CVec& f, const MetricVariation& var) {
  // ∫ (Df, Df)_{b g*} dV_g + ½ ∫ (Df, f d Tr b)_{g*} dV_g with b = -2u̇.
  const BaseGrid& g = op.grid();
  const int d = g.dim();
  const double h = g.spacing();
  const RVec& u = g.conformal();
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dv = op.mass[at(i)];
    const double inv_g = std::exp(-2.0 * u[at(i)]);
    double df2 = 0.0;
    cplx cross{0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const cplx dfa = covariant_difference(op, f, i, a);
      df2 += std::norm(dfa);
      const double dtrb = -2.0 * d *
                          (var.u_dot[at(g.neighbor(i, a, +1))] -
                           var.u_dot[at(g.neighbor(i, a, -1))]) /
                          (2.0 * h);
      cross += dfa * std::conj(f[at(i)] * dtrb);
    }
    total += dv * inv_g * (-2.0 * var.u_dot[at(i)] * df2 + 0.5 * cross.real());
  }
  return total;
}

cplx connection_continuum(const OperatorPair& op, const CVec& f,
                          const ConnectionVariation& var) {
  // <δL f, f> with δL f = m(-2i <β̇, df> + i f d*β̇) + 2m^2 <β̇, η> f,
  // written through Df = df + i m f η as i m |f|^2 d*β̇ - 2i m conj(f) <β̇, Df>.
  const BaseGrid& g = op.grid();
  const int d = g.dim();
  const double h = g.spacing();
  const RVec& u = g.conformal();
  const int m = op.m;
  cplx total{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dv = op.mass[at(i)];
    const double inv_g = std::exp(-2.0 * u[at(i)]);
    double div = 0.0;
    cplx pair{0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const auto bwd = g.neighbor(i, a, -1);
      const double b_fwd = var.beta_dot.axes[a][at(i)];
      const double b_bwd = var.beta_dot.axes[a][at(bwd)];
      const double beta_a = 0.5 * (b_fwd + b_bwd) / h;
      pair += beta_a * covariant_difference(op, f, i, a);
      // ρ = e^{(d-2)u} h^{d-2} on edges is the stored edge weight
      const double rho_fwd = op.edges[i * d + a].weight / std::pow(h, d - 2);
      const double rho_bwd = op.edges[bwd * d + a].weight / std::pow(h, d - 2);
      div += (rho_fwd * b_fwd / h - rho_bwd * b_bwd / h) / h;
    }
    const double codiff = -std::exp(-d * u[at(i)]) * div;
    const cplx fi = f[at(i)];
    const cplx integrand = cplx(0.0, m) * std::norm(fi) * codiff -
                           cplx(0.0, 2.0 * m) * std::conj(fi) * inv_g * pair;
    total += dv * integrand;
  }
  return total;
}

}  // namespace

double form_derivative(const OperatorPair& op, const CVec& f, double lambda,
                       const MetricVariation* metric, const ConnectionVariation* connection) {
  const BaseGrid& g = op.grid();
  const int d = g.dim();
  const double hd2 = std::pow(g.spacing(), d - 2);
  const RVec& u = g.conformal();
  double total = 0.0;
  for (const auto& e : op.edges) {
    const cplx z = f[at(e.to)] - e.link * f[at(e.from)];
    if (metric && d != 2) {
      const double wdot = 0.5 * (d - 2) *
                          (metric->u_dot[at(e.from)] * std::exp((d - 2) * u[at(e.from)]) +
                           metric->u_dot[at(e.to)] * std::exp((d - 2) * u[at(e.to)])) *
                          hd2;
      total += wdot * std::norm(z);
    }
    if (connection) {
      const double b = connection->beta_dot.axes[e.axis][at(e.from)];
      const cplx zdot = cplx(0.0, op.m * b) * e.link * f[at(e.from)];
      total += e.weight * 2.0 * (std::conj(z) * zdot).real();
    }
  }
  if (metric) {
    double mass_dot = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      mass_dot += d * metric->u_dot[i] * op.mass[i] * std::norm(f[i]);
    total -= lambda * mass_dot;
  }
  return total;
}

FirstOrderShift metric_first_order_shift(const OperatorPair& op,
                                         const std::vector<EigenPair>& eigs, int index,
                                         const MetricVariation& var, double gap_tol) {
  require_simple(eigs, index, gap_tol);
  const EigenPair& e = eigs[index];
  if (static_cast<std::size_t>(var.u_dot.size()) != op.grid().size())
    throw Error("metric variation sampled on a different grid");
  FirstOrderShift out;
  out.discrete = form_derivative(op, e.section.values(), e.lambda, &var, nullptr);
  out.continuum = metric_continuum(op, e.section.values(), var);
  return out;
}

FirstOrderShift connection_first_order_shift(const OperatorPair& op,
                                             const std::vector<EigenPair>& eigs, int index,
                                             const ConnectionVariation& var,
                                             double gap_tol) {
  require_simple(eigs, index, gap_tol);
  const EigenPair& e = eigs[index];
  if (static_cast<int>(var.beta_dot.axes.size()) != op.grid().dim())
    throw Error("connection variation has the wrong dimension");
  FirstOrderShift out;
  out.discrete = form_derivative(op, e.section.values(), e.lambda, nullptr, &var);
  const cplx c = connection_continuum(op, e.section.values(), var);
  out.continuum = c.real();
  out.continuum_imag = c.imag();
  return out;
}

double conformal_identity_shift(const EigenPair& eig, const MetricVariation& var) {
  const RVec& w = eig.section.grid().volume_weights();
  const CVec& f = eig.section.values();
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += var.u_dot[i] * std::norm(f[i]) * w[i];
  return -2.0 * eig.lambda * s;
}

FiniteDifferenceCheck finite_difference_check(const Model& model, int index,
                                              const MetricVariation* metric,
                                              const ConnectionVariation* connection,
                                              double epsilon, const SolverOptions& solver,
                                              double richardson_epsilon) {
  FiniteDifferenceCheck out;
  out.epsilon = epsilon;
  out.richardson_epsilon = richardson_epsilon;
  auto eigenvalue_at = [&](double t) {
    const Model p = perturbed(model, t, metric, connection);
    return lowest_eigenpairs(p.assemble(), solver).at(index).lambda;
  };
  const OperatorPair op = model.assemble();
  const auto eigs = lowest_eigenpairs(op, solver);
  require_simple(eigs, index, 1e-6);
  out.analytic = form_derivative(op, eigs[index].section.values(), eigs[index].lambda,
                                 metric, connection);
  auto central = [&](double e) { return (eigenvalue_at(e) - eigenvalue_at(-e)) / (2.0 * e); };
  out.fd = central(epsilon);
  const double scale = std::max(std::abs(out.analytic), std::numeric_limits<double>::min());
  out.relative_error = std::abs(out.fd - out.analytic) / scale;
  out.fd_richardson = central(richardson_epsilon);
  out.fd_richardson_half = central(0.5 * richardson_epsilon);
  const double err_half = std::abs(out.fd_richardson_half - out.analytic);
  out.richardson_ratio = err_half > 0.0 ? std::abs(out.fd_richardson - out.analytic) / err_half
                                        : std::numeric_limits<double>::infinity();
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Metric: return "metric";
    case Direction::Connection: return "connection";
    case Direction::Both: return "both";
    case Direction::PureGauge: return "pure_gauge";
  }
  return "?";
}

Direction direction_from_string(const std::string& s) {
  if (s == "metric") return Direction::Metric;
  if (s == "connection") return Direction::Connection;
  if (s == "both") return Direction::Both;
  if (s == "pure_gauge") return Direction::PureGauge;
  throw Error("unknown perturbation direction '" + s + "'");
}

MetricVariation random_metric_direction(const BaseGrid& grid, const SplitConfig& cfg) {
  return MetricVariation::from_field(
      grid, PeriodicField::random(grid.dim(), cfg.max_mode, cfg.amplitude, cfg.seed));
}

ConnectionVariation random_connection_direction(const BaseGrid& grid, const SplitConfig& cfg) {
  if (cfg.direction == Direction::PureGauge) {
    const PeriodicField chi =
        PeriodicField::random(grid.dim(), cfg.max_mode, cfg.amplitude, cfg.seed ^ 0x9e3779b9ULL);
    return ConnectionVariation::pure_gauge(grid, sample(grid, chi));
  }
  return ConnectionVariation::from_one_form(
      grid, PeriodicOneForm::random(grid.dim(), cfg.max_mode, cfg.amplitude,
                                    cfg.seed ^ 0x9e3779b9ULL));
}

SplitReport splitting_experiment(const SplitConfig& cfg, const SolverOptions& solver_in) {
  SplitReport report;
  report.config = cfg;
  SolverOptions solver = solver_in;
  solver.k = cfg.k;
  solver.seed = cfg.seed;

  const Model model = Model::build(2, cfg.n, PeriodicField::zero(), FluxMatrix::planar(cfg.flux),
                                   PeriodicOneForm::zero(2), cfg.m);
  const OperatorPair op = model.assemble();
  const auto before = lowest_eigenpairs(op, solver);
  for (const auto& e : before) report.eigenvalues_before.push_back(e.lambda);
  report.clusters_before = detect_clusters(before, cfg.gap_tol);
  report.multiplet_size = report.clusters_before.groups.front().size;

  const BaseGrid& grid = op.grid();
  std::optional<MetricVariation> metric;
  std::optional<ConnectionVariation> connection;
  if (cfg.direction == Direction::Metric || cfg.direction == Direction::Both)
    metric = random_metric_direction(grid, cfg);
  if (cfg.direction != Direction::Metric) connection = random_connection_direction(grid, cfg);
  const MetricVariation* mp = metric ? &*metric : nullptr;
  const ConnectionVariation* cp = connection ? &*connection : nullptr;

  const int s = report.multiplet_size;
  for (double eps : cfg.epsilons) {
    SplitStep step;
    step.epsilon = eps;
    const auto after = lowest_eigenpairs(perturbed(model, eps, mp, cp).assemble(), solver);
    for (const auto& e : after) step.eigenvalues.push_back(e.lambda);
    step.clusters = detect_clusters(step.eigenvalues, cfg.gap_tol);
    step.split = true;
    for (int j = 0; j < s; ++j) step.split = step.split && step.clusters.simple(j);
    step.gap = step.eigenvalues[s - 1] - step.eigenvalues[0];
    step.min_gap = std::numeric_limits<double>::infinity();
    for (int j = 1; j < s; ++j)
      step.min_gap = std::min(step.min_gap, step.eigenvalues[j] - step.eigenvalues[j - 1]);
    if (s == 1) step.min_gap = 0.0;
    report.steps.push_back(std::move(step));
  }

  if (!cfg.sum_rule) return report;

  // first-order sum rule over the multiplet
  double trace = 0.0;
  for (int j = 0; j < s; ++j)
    trace += form_derivative(op, before[j].section.values(), before[j].lambda, mp, cp);
  report.trace_derivative = trace;
  const double h = 1e-4;
  auto multiplet_sum = [&](double t) {
    const auto e = lowest_eigenpairs(perturbed(model, t, mp, cp).assemble(), solver);
    double sum = 0.0;
    for (int j = 0; j < s; ++j) sum += e[j].lambda;
    return sum;
  };
  report.trace_fd = (multiplet_sum(h) - multiplet_sum(-h)) / (2.0 * h);
  // below the roundoff level of the difference quotient the ratio carries no information
  double magnitude = 0.0;
  for (int j = 0; j < s; ++j) magnitude += std::abs(before[j].lambda);
  const double roundoff = 100.0 * std::numeric_limits<double>::epsilon() * magnitude / h;
  const double scale = std::max(std::abs(trace), std::abs(report.trace_fd));
  report.trace_relative_error =
      scale < roundoff ? 0.0 : std::abs(report.trace_fd - trace) / scale;
  return report;
}

}  // namespace nbl
