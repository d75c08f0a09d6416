#include "nbl/gate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "nbl/pipeline.hpp"
#include "nbl/sphere.hpp"

namespace nbl {

namespace lim = gate_limits;

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inapplicable: return "inapplicable";
  }
  return "?";
}

bool GateReport::ok() const {
  for (const auto& c : criteria)
    if (c.status == Status::Fail) return false;
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Eigenpairs of criteria 1-3: the configured d = 2 geometry at n = 32 and
// 48, weights 1..3, the six lowest simple eigenpairs of each.
struct TwoDomainCase {
  int n = 0;
  int m = 0;
  int index = 0;
  double lambda = 0.0;
  NodalReport nodal;
};

struct TwoDomainData {
  std::vector<TwoDomainCase> cases;
  std::vector<std::string> shortfalls;  // fewer than six simple eigenpairs
  double seconds = 0.0;
};

constexpr int kSimplePerWeight = 6;

TwoDomainData two_domain_data(const RunConfig& cfg) {
  TwoDomainData data;
  const auto t0 = Clock::now();
  for (int n : {32, 48}) {
    GeometryConfig g = cfg.geometry;
    g.n = n;
    const ConnectionPtr conn = g.connection();
    for (int m : {1, 2, 3}) {
      SolverOptions opts = cfg.solver.options();
      opts.k = kSimplePerWeight + 4;
      const auto eigs = lowest_eigenpairs(assemble_forms(conn, m), opts);
      const ClusterReport clusters = detect_clusters(eigs, cfg.solver.gap_tol);
      int taken = 0;
      // the last computed value has no upper neighbor to certify simplicity
      for (int i = 0; i + 1 < static_cast<int>(eigs.size()) && taken < kSimplePerWeight; ++i) {
        if (!clusters.simple(i)) continue;
        TwoDomainCase c;
        c.n = n;
        c.m = m;
        c.index = i;
        c.lambda = eigs[i].lambda;
        c.nodal = analyze_nodal(eigs[i].section, cfg.nodal.options(cfg.solver.seed));
        data.cases.push_back(std::move(c));
        ++taken;
      }
      if (taken < kSimplePerWeight)
        data.shortfalls.push_back("n=" + std::to_string(n) + " m=" + std::to_string(m) + ": only " +
                                  std::to_string(taken) + " simple eigenpairs");
    }
  }
  data.seconds = since(t0);
  return data;
}

int planar_flux(const RunConfig& cfg) { return cfg.geometry.flux_matrix()(0, 1); }

CriterionResult two_domain_law(const RunConfig& cfg, const TwoDomainData& data) {
  CriterionResult r;
  r.id = 1;
  r.name = "two-domain law";
  if (cfg.geometry.dim != 2) {
    r.status = Status::Inapplicable;
    r.detail = "stated for d = 2";
    return r;
  }
  if (planar_flux(cfg) == 0) {
    r.status = Status::Inapplicable;
    r.detail = "hypothesis unmet: trivial bundle (c12 = 0)";
    return r;
  }
  bool ok = data.shortfalls.empty();
  int bad = 0;
  Json rows = Json::array();
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_weight;
  for (const auto& c : data.cases) {
    const bool law = c.nodal.nodal_domain_count == 2 && c.nodal.nodal_set_component_count == 1;
    if (!law) ++bad;
    by_weight[{c.m, c.n}].emplace_back(c.nodal.nodal_domain_count,
                                       c.nodal.nodal_set_component_count);
    rows.push_back({{"n", c.n},
                    {"m", c.m},
                    {"index", c.index},
                    {"domains", c.nodal.nodal_domain_count},
                    {"components", c.nodal.nodal_set_component_count}});
  }
  bool identical = true;
  for (int m : {1, 2, 3}) identical = identical && by_weight[{m, 32}] == by_weight[{m, 48}];
  ok = ok && bad == 0 && identical && data.seconds <= lim::kBudgetTwoDomain;
  r.status = ok ? Status::Pass : Status::Fail;
  std::ostringstream d;
  d << data.cases.size() << " eigenpairs, " << bad << " violations, resolutions "
    << (identical ? "agree" : "differ") << ", " << fmt("%.1f", data.seconds) << " s";
  for (const auto& s : data.shortfalls) d << "; " << s;
  r.detail = d.str();
  r.data = {{"cases", rows}, {"shortfalls", data.shortfalls}, {"compute_seconds", data.seconds}};
  return r;
}

CriterionResult covering_degree(const RunConfig& cfg, const TwoDomainData& data) {
  CriterionResult r;
  r.id = 2;
  r.name = "covering degree";
  if (cfg.geometry.dim != 2) {
    r.status = Status::Inapplicable;
    r.detail = "stated for d = 2";
    return r;
  }
  double worst = 1.0;
  int undefined = 0;
  Json rows = Json::array();
  for (const auto& c : data.cases) {
    const double f = c.nodal.covering.fraction(2 * c.m);
    worst = std::min(worst, f);
    undefined += c.nodal.covering.undefined;
    rows.push_back({{"n", c.n}, {"m", c.m}, {"index", c.index}, {"fraction", f},
                    {"undefined", c.nodal.covering.undefined}});
  }
  const bool ok = !data.cases.empty() && worst >= lim::kCoveringFraction;
  r.status = ok ? Status::Pass : Status::Fail;
  r.detail = "worst fraction with 2m fiber zeros " + fmt("%.4f", worst) + ", " +
             std::to_string(undefined) + " samples flagged near section zeros";
  r.data = {{"cases", rows}};
  return r;
}

CriterionResult winding(const RunConfig& cfg, const TwoDomainData& data) {
  CriterionResult r;
  r.id = 3;
  r.name = "Chern/winding consistency";
  if (cfg.geometry.dim != 2 || planar_flux(cfg) == 0) {
    r.status = Status::Inapplicable;
    r.detail = cfg.geometry.dim != 2 ? "stated for d = 2" : "needs m c12 in {1, 2, 3}";
    return r;
  }
  const int c12 = planar_flux(cfg);
  int checked = 0, bad = 0;
  Json rows = Json::array();
  for (const auto& c : data.cases) {
    const int degree = c.m * c12;
    if (degree < 1 || degree > 3) continue;
    ++checked;
    const int total = c.nodal.winding ? c.nodal.winding->total_winding : 0;
    const bool ok = c.nodal.winding && total == degree;
    if (!ok) ++bad;
    rows.push_back({{"n", c.n}, {"m", c.m}, {"index", c.index}, {"total_winding", total},
                    {"expected", degree}});
  }
  if (checked == 0) {
    r.status = Status::Inapplicable;
    r.detail = "no weight with m c12 in {1, 2, 3}";
    return r;
  }
  r.status = bad == 0 ? Status::Pass : Status::Fail;
  r.detail = std::to_string(checked) + " sections, " + std::to_string(bad) + " mismatches";
  r.data = {{"cases", rows}};
  return r;
}

CriterionResult landau(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 4;
  r.name = "Landau oracle";
  const auto t0 = Clock::now();
  bool ok = true;
  Json rows = Json::array();
  std::ostringstream d;
  for (int m : {1, 2, 3}) {
    const int size = m;  // m c with c = 1
    const double target = kTwoPi * m;
    double err[2] = {0, 0};
    int k = 0;
    for (int n : {48, 96}) {
      const ConnectionPtr conn = make_connection(make_base_grid(2, n, PeriodicField::zero()),
                                                 FluxMatrix::planar(1), PeriodicOneForm::zero(2));
      SolverOptions opts = cfg.solver.options();
      opts.k = size + 2;
      const auto eigs = lowest_eigenpairs(assemble_forms(conn, m), opts);
      const ClusterReport cl = detect_clusters(eigs, cfg.solver.gap_tol);
      const Cluster& low = cl.groups.front();
      err[k] = std::abs(low.mean - target) / target;
      const double tol = n == 48 ? lim::kLandauTolCoarse : lim::kLandauTolFine;
      const bool row_ok = low.size == size && err[k] <= tol;
      ok = ok && row_ok;
      rows.push_back({{"m", m}, {"n", n}, {"cluster_size", low.size}, {"mean", low.mean},
                      {"target", target}, {"relative_error", err[k]}});
      ++k;
    }
    const bool monotone = err[1] < err[0];
    ok = ok && monotone;
    d << "m=" << m << ": " << fmt("%.2e", err[0]) << " -> " << fmt("%.2e", err[1])
      << (monotone ? "" : " (not monotone)") << "; ";
  }
  r.seconds = since(t0);
  ok = ok && r.seconds <= lim::kBudgetLandau;
  r.status = ok ? Status::Pass : Status::Fail;
  d << fmt("%.1f s", r.seconds);
  r.detail = d.str();
  r.data = {{"rows", rows}};
  return r;
}

// max relative eigenvalue change under a seeded random gauge transform
double gauge_change(const ConnectionPtr& conn, int m, const SolverOptions& opts,
                    std::uint64_t seed, Json& rows) {
  const BaseGrid& g = conn->grid();
  const RVec chi = sample(g, PeriodicField::random(g.dim(), 3, 2.0, seed));
  const ConnectionPtr moved = gauge_transform(conn, chi);
  const auto before = lowest_eigenpairs(assemble_forms(conn, m), opts);
  const auto after = lowest_eigenpairs(assemble_forms(moved, m), opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double rel = std::abs(after[i].lambda - before[i].lambda) /
                       std::max(std::abs(before[i].lambda), 1.0);
    worst = std::max(worst, rel);
  }
  rows.push_back({{"m", m}, {"n", g.n()}, {"dim", g.dim()}, {"max_relative_change", worst}});
  return worst;
}

CriterionResult gauge(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 5;
  r.name = "gauge invariance";
  GeometryConfig g = cfg.geometry;
  g.n = 32;
  const ConnectionPtr conn = g.connection();
  SolverOptions opts = cfg.solver.options();
  Json rows = Json::array();
  double worst = 0.0;
  for (int m : {0, 1, 2}) worst = std::max(worst, gauge_change(conn, m, opts, 77 + m, rows));
  r.status = worst <= lim::kGaugeRelative ? Status::Pass : Status::Fail;
  r.detail = "max relative eigenvalue change " + fmt("%.2e", worst);
  r.data = {{"rows", rows}};
  return r;
}

CriterionResult perturbation(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 6;
  r.name = "perturbation formulas";
  GeometryConfig g = cfg.geometry;
  g.dim = 2;
  g.n = 32;
  if (cfg.geometry.dim != 2) {
    g.flux = {{0, 1}, {-1, 0}};
    g.u_spec = GeometryConfig{}.u_spec;
    g.beta_spec = GeometryConfig{}.beta_spec;
  }
  const Model model = g.model(1);
  SolverOptions opts = cfg.solver.options();
  opts.k = 4;
  const OperatorPair op = model.assemble();
  const auto eigs = lowest_eigenpairs(op, opts);
  const BaseGrid& grid = op.grid();
  const int index = 0;

  SplitConfig dir;
  dir.seed = cfg.solver.seed;
  dir.amplitude = 0.1;
  const MetricVariation metric = random_metric_direction(grid, dir);
  const ConnectionVariation connection = random_connection_direction(grid, dir);
  dir.direction = Direction::PureGauge;
  const ConnectionVariation gauge_dir = random_connection_direction(grid, dir);

  bool ok = true;
  std::ostringstream d;
  Json data;
  auto fd_ok = [&](const char* label, const MetricVariation* mp, const ConnectionVariation* cp) {
    const auto c = finite_difference_check(model, index, mp, cp, lim::kFdEpsilon, opts,
                                           lim::kRichardsonEpsilon);
    const bool good = c.relative_error <= lim::kFdRelative &&
                      c.richardson_ratio >= lim::kRichardsonLow &&
                      c.richardson_ratio <= lim::kRichardsonHigh;
    ok = ok && good;
    d << label << ": rel " << fmt("%.1e", c.relative_error) << ", Richardson "
      << fmt("%.2f", c.richardson_ratio) << "; ";
    data[label] = to_json(c);
  };
  fd_ok("metric", &metric, nullptr);
  fd_ok("connection", nullptr, &connection);

  const double pure = form_derivative(op, eigs[index].section.values(), eigs[index].lambda,
                                      nullptr, &gauge_dir);
  ok = ok && std::abs(pure) <= lim::kPureGaugeShift;
  d << "pure gauge " << fmt("%.1e", std::abs(pure)) << "; ";
  data["pure_gauge_shift"] = pure;

  const auto shift = metric_first_order_shift(op, eigs, index, metric, cfg.solver.gap_tol);
  const double identity = conformal_identity_shift(eigs[index], metric);
  const double id_err = std::abs(shift.discrete - identity) / std::max(std::abs(identity), 1.0);
  ok = ok && id_err <= lim::kConformalIdentity;
  d << "conformal identity " << fmt("%.1e", id_err);
  data["conformal_identity"] = {{"discrete", shift.discrete}, {"identity", identity},
                                {"error", id_err}};

  r.status = ok ? Status::Pass : Status::Fail;
  r.detail = d.str();
  r.data = data;
  return r;
}

CriterionResult genericity(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 7;
  r.name = "genericity shadow";
  SolverOptions opts = cfg.solver.options();
  int split = 0, gauge_split = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gauge_gap = 0.0;
  Json gaps = Json::array(), gauge_gaps = Json::array();
  bool before_ok = true;
  for (int s = 1; s <= lim::kSplitSeeds; ++s) {
    for (Direction dir : {Direction::Both, Direction::PureGauge}) {
      SplitConfig sc;
      sc.n = 32;
      sc.flux = 2;
      sc.m = 1;
      sc.direction = dir;
      sc.epsilons = {lim::kSplitEpsilon};
      sc.seed = static_cast<std::uint64_t>(s);
      sc.gap_tol = cfg.solver.gap_tol;
      sc.sum_rule = false;
      const SplitReport rep = splitting_experiment(sc, opts);
      before_ok = before_ok && rep.multiplet_size == 2;
      const SplitStep& step = rep.steps.front();
      if (dir == Direction::Both) {
        if (step.split && step.gap > 0.0) ++split;
        min_gap = std::min(min_gap, step.gap);
        gaps.push_back(step.gap);
      } else {
        if (step.split || step.gap >= lim::kPureGaugeGap) ++gauge_split;
        max_gauge_gap = std::max(max_gauge_gap, step.gap);
        gauge_gaps.push_back(step.gap);
      }
    }
  }
  const double frac = static_cast<double>(split) / lim::kSplitSeeds;
  const bool ok = before_ok && frac >= lim::kSplitFraction && gauge_split == 0;
  r.status = ok ? Status::Pass : Status::Fail;
  r.detail = std::to_string(split) + "/" + std::to_string(lim::kSplitSeeds) +
             " seeds split (min gap " + fmt("%.2e", min_gap) + "), pure gauge split " +
             std::to_string(gauge_split) + " (max gap " + fmt("%.1e", max_gauge_gap) + ")" +
             (before_ok ? "" : "; unperturbed multiplet is not a doublet");
  r.data = {{"gaps", gaps}, {"pure_gauge_gaps", gauge_gaps}};
  return r;
}

CriterionResult controls(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 8;
  r.name = "trivial-bundle and m=0 controls";
  SolverOptions opts = cfg.solver.options();
  NodalOptions nopts = cfg.nodal.options(cfg.solver.seed);
  bool ok = true;
  std::ostringstream d;

  // c = 0, flat: the lowest weight-1 section is constant, a product field
  const ConnectionPtr trivial = make_connection(make_base_grid(2, 32, PeriodicField::zero()),
                                                FluxMatrix::planar(0), PeriodicOneForm::zero(2));
  opts.k = 4;
  const auto t_eigs = lowest_eigenpairs(assemble_forms(trivial, 1), opts);
  const NodalReport tr = analyze_nodal(t_eigs[0].section, nopts);
  const bool t_ok = tr.nodal_set_component_count == 2;
  ok = ok && t_ok;
  d << "c=0: " << tr.nodal_domain_count << " domains, " << tr.nodal_set_component_count
    << " components; ";

  GeometryConfig g = cfg.geometry;
  if (g.dim != 2) g = GeometryConfig{};
  g.n = 32;
  const ConnectionPtr conn = g.connection();
  opts.k = 6;
  const auto eigs = lowest_eigenpairs(assemble_forms(conn, 0), opts);
  Json rows = Json::array();
  int mismatches = 0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const int base = base_nodal_domains(eigs[i].section);
    const int lifted = nodal_domains(lift(eigs[i].section, cfg.nodal.n_theta));
    if (base != lifted) ++mismatches;
    rows.push_back({{"index", i}, {"base_domains", base}, {"lifted_domains", lifted}});
  }
  ok = ok && mismatches == 0;
  d << "m=0: " << eigs.size() << " eigenfunctions, " << mismatches << " domain-count mismatches";
  r.status = ok ? Status::Pass : Status::Fail;
  r.detail = d.str();
  r.data = {{"trivial_bundle", to_json(tr)}, {"weight_zero", rows}};
  return r;
}

CriterionResult sphere_counterexample(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 9;
  r.name = "sphere counterexample";
  int bad = 0, nm_domains = 0, nm_singular = 0, pairs = 0;
  double worst_ratio = 0.0;
  Json rows = Json::array();
  for (int N = 1; N <= 6; ++N) {
    for (int m = 1; m <= N; ++m) {
      ++pairs;
      bool ok = true;
      double prev = 0.0;
      Json ratios = Json::array();
      sphere::SphereNodalReport last;
      for (int level = 0; level <= std::max(cfg.sphere.refinements, 1); ++level) {
        const auto rep = sphere::sphere_nodal_counts(N, m, sphere::default_grid(N, m, level));
        ok = ok && rep.component_count == 1 && rep.domain_count == rep.predicted_domains &&
             rep.singular_point_count == rep.predicted_singular_points;
        if (level > 0) {
          const double ratio = rep.min_gradient_margin / prev;
          worst_ratio = std::max(worst_ratio, ratio);
          ok = ok && ratio <= lim::kMarginRatio;
          ratios.push_back(ratio);
        }
        prev = rep.min_gradient_margin;
        last = rep;
      }
      if (!ok) ++bad;
      nm_domains += last.domains_match_nm;
      nm_singular += last.singular_match_nm;
      Json row = to_json(last);
      row["margin_ratios"] = ratios;
      row["nm_mismatch"] = !last.domains_match_nm || !last.singular_match_nm;
      rows.push_back(row);
    }
  }
  r.status = bad == 0 ? Status::Pass : Status::Fail;
  r.detail = std::to_string(pairs) + " (N, m) pairs, " + std::to_string(bad) +
             " failures, worst margin ratio " + fmt("%.3f", worst_ratio) +
             "; N m expression equals the measured domains for " + std::to_string(nm_domains) +
             " and the singular points for " + std::to_string(nm_singular) + " pairs";
  r.data = {{"pairs", rows}};
  return r;
}

CriterionResult smoke3d(const RunConfig& cfg) {
  CriterionResult r;
  r.id = 10;
  r.name = "d=3 smoke";
  const auto t0 = Clock::now();
  GeometryConfig g;
  g.dim = 3;
  g.n = 16;
  g.flux = {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}};
  const ConnectionPtr conn = g.connection();
  const OperatorPair op = assemble_forms(conn, 1);
  double kmax = 0.0;
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (SparseC::InnerIterator it(op.stiffness, k); it; ++it) kmax = std::max(kmax, std::abs(it.value()));
  const double herm = hermiticity_defect(op.stiffness) / kmax;

  SolverOptions opts = cfg.solver.options();
  opts.k = 4;
  Json rows = Json::array();
  const double gauge_rel = gauge_change(conn, 1, opts, 91, rows);

  const auto eigs = lowest_eigenpairs(op, opts);
  const ClusterReport cl = detect_clusters(eigs, cfg.solver.gap_tol);
  std::optional<NodalReport> nr;
  int index = -1;
  for (int i = 0; i + 1 < static_cast<int>(eigs.size()); ++i) {
    if (cl.simple(i)) {
      index = i;
      nr = analyze_nodal(eigs[i].section, cfg.nodal.options(cfg.solver.seed));
      break;
    }
  }
  r.seconds = since(t0);
  const bool law = nr && nr->nodal_domain_count == 2 && nr->nodal_set_component_count == 1;
  const bool ok = herm <= lim::kHermiticity && gauge_rel <= lim::kGaugeRelative && law &&
                  r.seconds <= lim::kBudgetSmoke3d;
  r.status = ok ? Status::Pass : Status::Fail;
  std::ostringstream d;
  d << "hermiticity " << fmt("%.1e", herm) << ", gauge " << fmt("%.1e", gauge_rel);
  if (nr)
    d << ", eigenpair " << index << ": " << nr->nodal_domain_count << " domains, "
      << nr->nodal_set_component_count << " components";
  else
    d << ", no simple eigenpair among the lowest " << opts.k;
  d << ", " << fmt("%.1f s", r.seconds);
  r.detail = d.str();
  r.data = {{"hermiticity", herm}, {"gauge", rows}, {"index", index},
            {"nodal", nr ? to_json(*nr) : Json(nullptr)}};
  return r;
}

CriterionResult timed(int id, const std::function<CriterionResult()>& f) {
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r.id = id;
    r.name = r.name.empty() ? "criterion " + std::to_string(id) : r.name;
    r.status = Status::Fail;
    r.detail = std::string("error: ") + e.what();
  }
  if (r.seconds == 0.0) r.seconds = since(t0);
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const RunConfig& cfg) {
  switch (id) {
    case 1: case 2: case 3: {
      const auto t0 = Clock::now();
      const TwoDomainData data = cfg.geometry.dim == 2 ? two_domain_data(cfg) : TwoDomainData{};
      CriterionResult r = id == 1 ? two_domain_law(cfg, data)
                          : id == 2 ? covering_degree(cfg, data)
                                    : winding(cfg, data);
      r.seconds = since(t0);
      return r;
    }
    case 4: return landau(cfg);
    case 5: return gauge(cfg);
    case 6: return perturbation(cfg);
    case 7: return genericity(cfg);
    case 8: return controls(cfg);
    case 9: return sphere_counterexample(cfg);
    case 10: return smoke3d(cfg);
    default: throw Error("no criterion " + std::to_string(id));
  }
}

GateReport run_gate(const RunConfig& cfg,
                    const std::function<void(const CriterionResult&)>& progress) {
  GateReport report;
  const auto t0 = Clock::now();
  auto record = [&](CriterionResult r) {
    if (progress) progress(r);
    report.criteria.push_back(std::move(r));
  };

  std::optional<TwoDomainData> data;
  std::string data_error;
  const auto td0 = Clock::now();
  try {
    if (cfg.geometry.dim == 2) data = two_domain_data(cfg);
  } catch (const std::exception& e) {
    data_error = e.what();
  }
  const double td_seconds = since(td0);
  for (int id : {1, 2, 3}) {
    CriterionResult r = timed(id, [&] {
      if (!data_error.empty()) throw Error(data_error);
      const TwoDomainData empty;
      const TwoDomainData& d = data ? *data : empty;
      return id == 1 ? two_domain_law(cfg, d) : id == 2 ? covering_degree(cfg, d) : winding(cfg, d);
    });
    r.seconds += id == 1 ? td_seconds : 0.0;
    record(std::move(r));
  }
  for (int id = 4; id <= 10; ++id) record(timed(id, [&] { return run_criterion(id, cfg); }));
  report.seconds = since(t0);
  return report;
}

Json to_json(const GateReport& r, const RunConfig& cfg) {
  Json crit = Json::array();
  for (const auto& c : r.criteria)
    crit.push_back({{"id", c.id},
                    {"name", c.name},
                    {"status", to_string(c.status)},
                    {"detail", c.detail},
                    {"seconds", c.seconds},
                    {"data", c.data}});
  return {{"kind", "gate"},
          {"meta", report_meta(cfg)},
          {"ok", r.ok()},
          {"wall_clock_seconds", r.seconds},
          {"criteria", crit}};
}

}  // namespace nbl
