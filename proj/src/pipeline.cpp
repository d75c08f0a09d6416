#include "nbl/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>

#include "nbl/svg.hpp"

namespace nbl {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_report(const OutputOptions& out, const std::string& name, const Json& j) {
  write_file_atomic(join(out.dir, name), dump_report(j));
}

SplitConfig split_config(const RunConfig& cfg, Direction d, std::uint64_t seed) {
  SplitConfig s;
  s.n = cfg.perturb.split_n;
  s.flux = cfg.perturb.split_flux;
  s.m = cfg.perturb.split_m;
  s.direction = d;
  s.epsilons = cfg.perturb.epsilons;
  s.seed = seed;
  s.gap_tol = cfg.solver.gap_tol;
  s.amplitude = 1.0;
  s.max_mode = cfg.perturb.max_mode;
  return s;
}

}  // namespace

Json report_meta(const RunConfig& cfg) {
  return {{"config_hash", cfg.hash_hex()},
          {"seed", cfg.solver.seed},
          {"resolution", {{"dim", cfg.geometry.dim}, {"n", cfg.geometry.n}}},
          {"tool_version", kToolVersion}};
}

Json to_json(const ClusterReport& c) {
  Json arr = Json::array();
  for (const auto& g : c.groups)
    arr.push_back({{"start", g.start},
                   {"size", g.size},
                   {"mean", g.mean},
                   {"spread", g.spread},
                   {"gap", finite_or_null(g.gap)}});
  return arr;
}

Json to_json(const NodalReport& r) {
  Json hist = Json::object();
  for (const auto& [zeros, count] : r.covering.counts) hist[std::to_string(zeros)] = count;
  Json j = {{"m", r.m},
            {"n", r.n},
            {"n_theta", r.n_theta},
            {"lattice_size", r.lattice_size},
            {"domains", r.nodal_domain_count},
            {"components", r.nodal_set_component_count},
            {"takes_both_signs", r.takes_both_signs},
            {"regularity_margin", finite_or_null(r.regularity_margin)},
            {"covering",
             {{"samples", r.covering.samples},
              {"undefined", r.covering.undefined},
              {"tau", r.covering.tau},
              {"histogram", hist},
              {"fraction_2m", r.m != 0 ? r.covering.fraction(2 * std::abs(r.m)) : 0.0}}}};
  if (r.winding)
    j["winding"] = {{"zero_plaquettes", r.winding->count},
                    {"total", r.winding->total_winding},
                    {"min_corner_modulus", r.winding->min_corner_modulus}};
  else
    j["winding"] = nullptr;
  return j;
}

Json to_json(const FirstOrderShift& s) {
  return {{"discrete", s.discrete}, {"continuum", s.continuum}, {"continuum_imag", s.continuum_imag}};
}

Json to_json(const FiniteDifferenceCheck& c) {
  return {{"analytic", c.analytic},
          {"epsilon", c.epsilon},
          {"fd", c.fd},
          {"relative_error", c.relative_error},
          {"richardson_epsilon", c.richardson_epsilon},
          {"fd_richardson", c.fd_richardson},
          {"fd_richardson_half", c.fd_richardson_half},
          {"richardson_ratio", finite_or_null(c.richardson_ratio)}};
}

Json to_json(const SplitReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"epsilon", s.epsilon},
                     {"eigenvalues", s.eigenvalues},
                     {"clusters", to_json(s.clusters)},
                     {"gap", s.gap},
                     {"min_gap", s.min_gap},
                     {"gap_over_epsilon", s.epsilon > 0.0 ? Json(s.gap / s.epsilon) : Json(nullptr)},
                     {"split", s.split}});
  return {{"direction", to_string(r.config.direction)},
          {"seed", r.config.seed},
          {"n", r.config.n},
          {"flux", r.config.flux},
          {"m", r.config.m},
          {"eigenvalues_before", r.eigenvalues_before},
          {"clusters_before", to_json(r.clusters_before)},
          {"multiplet_size", r.multiplet_size},
          {"steps", steps},
          {"trace_derivative", r.trace_derivative},
          {"trace_fd", r.trace_fd},
          {"trace_relative_error", r.trace_relative_error}};
}

Json to_json(const sphere::SphereNodalReport& r) {
  return {{"N", r.N},
          {"m", r.m},
          {"n_phi", r.grid.n_phi},
          {"n_theta", r.grid.n_theta},
          {"components", r.component_count},
          {"domains", r.domain_count},
          {"singular_points", r.singular_point_count},
          {"min_gradient_margin", finite_or_null(r.min_gradient_margin)},
          {"latitude_zero_circles", r.latitude_zero_circles},
          {"meridian_zeros", r.meridian_zeros},
          {"predicted_domains", r.predicted_domains},
          {"predicted_singular_points", r.predicted_singular_points},
          {"nm_expression", r.nm_expression},
          {"domains_match_nm", r.domains_match_nm},
          {"singular_match_nm", r.singular_match_nm}};
}

Json to_json(const sphere::FixedPointReport& r) {
  return {{"N", r.N},
          {"m", r.m},
          {"north_value", r.north_value},
          {"south_value", r.south_value},
          {"north_gradient", r.north_gradient},
          {"south_gradient", r.south_gradient},
          {"critical", r.critical}};
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

std::string cache_name(int m) { return "spectrum_m" + std::to_string(m) + ".nbl"; }

Json run_spectrum(const RunConfig& cfg, const OutputOptions& out) {
  const ConnectionPtr conn = cfg.geometry.connection();
  const SolverOptions opts = cfg.solver.options();
  Json weights = Json::array();
  std::map<int, std::vector<double>> by_weight;
  for (int m : cfg.solver.weights) {
    const OperatorPair op = assemble_forms(conn, m);
    std::vector<EigenPair> eigs;
    try {
      eigs = lowest_eigenpairs(op, opts);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("weight m=" + std::to_string(m) + ": " + e.what(),
                             e.first_unconverged());
    }
    write_cache(join(out.dir, cache_name(m)), make_cache(eigs, cfg.solver.seed, cfg.hash()));
    std::vector<double> lambdas, totals, residuals;
    for (const auto& e : eigs) {
      lambdas.push_back(e.lambda);
      totals.push_back(total_eigenvalue(e.lambda, m));
      residuals.push_back(e.residual);
    }
    by_weight[m] = lambdas;
    weights.push_back({{"m", m},
                       {"eigenvalues", lambdas},
                       {"total_eigenvalues", totals},
                       {"residuals", residuals},
                       {"clusters", to_json(detect_clusters(lambdas, cfg.solver.gap_tol))},
                       {"hermiticity_defect", hermiticity_defect(op.stiffness)},
                       {"cache", cache_name(m)}});
  }
  const DisjointnessReport dj = cross_weight_disjointness(by_weight, cfg.solver.gap_tol);
  Json collisions = Json::array();
  for (const auto& c : dj.collisions)
    collisions.push_back({{"m1", c.m1}, {"index1", c.index1}, {"m2", c.m2},
                          {"index2", c.index2}, {"distance", c.distance}});
  Json j = {{"kind", "spectrum"},
            {"meta", report_meta(cfg)},
            {"flux", cfg.geometry.flux},
            {"weights", weights},
            {"disjointness",
             {{"min_distance", finite_or_null(dj.min_distance)}, {"collisions", collisions}}}};
  write_report(out, "spectrum.json", j);
  return j;
}

NodalOutcome run_nodal(const RunConfig& cfg, const std::string& cache_path, int index,
                       bool force, const OutputOptions& out) {
  const CacheFile cache = read_cache(cache_path, cfg.hash());
  const ConnectionPtr conn = cfg.geometry.connection();
  const BaseGrid& g = conn->grid();
  if (cache.dim != static_cast<std::uint32_t>(g.dim()) ||
      cache.n != static_cast<std::uint32_t>(g.n()))
    throw Error("cache grid does not match the configured geometry");
  if (index < 0 || index >= static_cast<int>(cache.count()))
    throw Error("eigenpair index " + std::to_string(index) + " out of range; cache holds " +
                std::to_string(cache.count()));
  const ClusterReport clusters = detect_clusters(cache.eigenvalues, cfg.solver.gap_tol);
  const Cluster cluster = clusters.groups[clusters.cluster_of(index)];
  const bool simple = cluster.size == 1;
  if (!simple && !force)
    throw DegenerateEigenvalueError("eigenvalue " + std::to_string(index) +
                                        " is degenerate (cluster size " +
                                        std::to_string(cluster.size) + "); pass --force",
                                    index, cluster);

  const Section s(conn, cache.m, cache.sections[index]);
  const NodalReport r = analyze_nodal(s, cfg.nodal.options(cfg.solver.seed));

  NodalOutcome o;
  o.qualifying = simple && cache.m != 0 && !conn->flux().trivial();
  o.law_holds = r.nodal_domain_count == 2 && r.nodal_set_component_count == 1;
  Json j = {{"kind", "nodal"},
            {"meta", report_meta(cfg)},
            {"index", index},
            {"eigenvalue", cache.eigenvalues[index]},
            {"simple", simple},
            {"forced", !simple},
            {"qualifying", o.qualifying},
            {"two_domain_law", o.qualifying ? Json(o.law_holds) : Json(nullptr)},
            {"report", to_json(r)}};
  if (cache.m == 0) {
    const int base = base_nodal_domains(s);
    j["base_domains"] = base;
    j["matches_base_domains"] = base == r.nodal_domain_count;
  }
  const std::string stem = "nodal_m" + std::to_string(cache.m) + "_i" + std::to_string(index);
  if (out.svg) {
    const LiftedField field = lift(s, cfg.nodal.n_theta);
    write_file_atomic(join(out.dir, stem + ".svg"),
                      nodal_slices_svg(field, "m = " + std::to_string(cache.m) + ", eigenpair " +
                                                  std::to_string(index)));
    j["svg"] = stem + ".svg";
  }
  write_report(out, stem + ".json", j);
  o.report = j;
  return o;
}

Json run_perturb(const RunConfig& cfg, const OutputOptions& out) {
  const int m = cfg.solver.weights.front();
  const Model model = cfg.geometry.model(m);
  SolverOptions solver = cfg.solver.options();
  solver.k = std::max(solver.k, cfg.perturb.index + 2);
  const OperatorPair op = model.assemble();
  const auto eigs = lowest_eigenpairs(op, solver);
  const BaseGrid& g = op.grid();

  Json checks = Json::array();
  for (const auto& name : cfg.perturb.directions) {
    const Direction d = direction_from_string(name);
    SplitConfig dir_cfg = split_config(cfg, d, cfg.solver.seed);
    dir_cfg.amplitude = cfg.perturb.amplitude;
    std::optional<MetricVariation> metric;
    std::optional<ConnectionVariation> connection;
    if (d == Direction::Metric || d == Direction::Both) metric = random_metric_direction(g, dir_cfg);
    if (d != Direction::Metric) connection = random_connection_direction(g, dir_cfg);
    const MetricVariation* mp = metric ? &*metric : nullptr;
    const ConnectionVariation* cp = connection ? &*connection : nullptr;

    Json entry = {{"direction", name}, {"index", cfg.perturb.index}};
    const auto fd = finite_difference_check(model, cfg.perturb.index, mp, cp,
                                            cfg.perturb.fd_epsilon, solver,
                                            cfg.perturb.richardson_epsilon);
    entry["finite_difference"] = to_json(fd);
    if (mp) {
      const auto shift = metric_first_order_shift(op, eigs, cfg.perturb.index, *mp,
                                                  cfg.solver.gap_tol);
      entry["metric_shift"] = to_json(shift);
      if (g.dim() == 2)
        entry["conformal_identity"] = conformal_identity_shift(eigs[cfg.perturb.index], *mp);
    }
    if (cp) {
      entry["connection_shift"] = to_json(connection_first_order_shift(
          op, eigs, cfg.perturb.index, *cp, cfg.solver.gap_tol));
      entry["flux_defect"] = cp->flux_defect(g);
    }
    checks.push_back(entry);
  }

  Json splits = Json::array();
  for (const auto& name : cfg.perturb.directions) {
    const Direction d = direction_from_string(name);
    for (int s = 1; s <= cfg.perturb.split_seeds; ++s) {
      const SplitReport r = splitting_experiment(
          split_config(cfg, d, static_cast<std::uint64_t>(s)), cfg.solver.options());
      splits.push_back(to_json(r));
    }
  }

  Json j = {{"kind", "perturb"},
            {"meta", report_meta(cfg)},
            {"m", m},
            {"eigenvalues", [&] {
               std::vector<double> v;
               for (const auto& e : eigs) v.push_back(e.lambda);
               return v;
             }()},
            {"first_order", checks},
            {"splitting", splits}};
  write_report(out, "perturb.json", j);
  return j;
}

Json run_sphere(const RunConfig& cfg, const OutputOptions& out) {
  Json entries = Json::array();
  for (const auto& [N, m] : cfg.sphere.resolved_pairs()) {
    Json levels = Json::array();
    Json ratios = Json::array();
    double prev = 0.0;
    for (int r = 0; r <= cfg.sphere.refinements; ++r) {
      const auto rep = sphere::sphere_nodal_counts(N, m, sphere::default_grid(N, m, r));
      levels.push_back(to_json(rep));
      if (r > 0) ratios.push_back(rep.min_gradient_margin / prev);
      prev = rep.min_gradient_margin;
    }
    Json e = {{"N", N},
              {"m", m},
              {"levels", levels},
              {"margin_ratios", ratios},
              {"fixed_point", to_json(sphere::fixed_point_vanishing_check(N, m))}};
    if (out.svg) {
      const std::string name = "sphere_N" + std::to_string(N) + "_m" + std::to_string(m) + ".svg";
      write_file_atomic(join(out.dir, name),
                        sphere_svg(sphere::make_harmonic(N, m, sphere::default_grid(N, m, 0)),
                                   "Re Y, N = " + std::to_string(N) + ", m = " + std::to_string(m)));
      e["svg"] = name;
    }
    entries.push_back(e);
  }
  Json j = {{"kind", "sphere_counterexample"}, {"meta", report_meta(cfg)}, {"pairs", entries}};
  write_report(out, "sphere.json", j);
  return j;
}

}  // namespace nbl
