// nbl: command-line front end.
//
//   nbl spectrum [--config FILE] [overrides] [--out DIR]
//   nbl nodal    --cache FILE --index I [--force] [--gate] [--svg]
//   nbl perturb  [--directions metric,connection] [--epsilons 1e-2,1e-3]
//   nbl sphere   [--N 4 --m 2] [--svg]
//   nbl gate     [--criteria 1,4,9]
//
// Flags named after config keys override the file. Exit status: 0 on
// success, 1 on a failed check, 2 on a usage or runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "nbl/gate.hpp"
#include "nbl/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> dim, n, flux, k, n_theta, sample_count, index, split_seeds;
  std::optional<double> tol, gap_tol, tau, fd_epsilon, richardson_epsilon, amplitude;
  std::optional<std::uint64_t> seed;
  std::vector<int> weights;
  std::vector<double> epsilons;
  std::vector<std::string> directions;
  std::optional<int> sphere_N, sphere_m, refinements;
};

void add_common(CLI::App* app, Overrides& o, nbl::OutputOptions& out) {
  app->add_option("--config", o.config_path, "JSON run configuration");
  app->add_option("--out", out.dir, "output directory")->capture_default_str();
  app->add_flag("--svg", out.svg, "also write SVG figures");
  app->add_option("--dim", o.dim, "geometry.dim");
  app->add_option("--n", o.n, "geometry.n");
  app->add_option("--flux", o.flux, "geometry.flux as c12 (d = 2; d = 3 sets c12 only)");
  app->add_option("--k", o.k, "solver.k");
  app->add_option("--tol", o.tol, "solver.tol");
  app->add_option("--seed", o.seed, "solver.seed");
  app->add_option("--weights", o.weights, "solver.weights")->delimiter(',');
  app->add_option("--gap-tol", o.gap_tol, "solver.gap_tol");
  app->add_option("--n-theta", o.n_theta, "nodal.n_theta (0 = automatic)");
  app->add_option("--tau", o.tau, "nodal.tau");
  app->add_option("--sample-count", o.sample_count, "nodal.sample_count");
}

nbl::RunConfig resolve(const Overrides& o) {
  nbl::RunConfig c = o.config_path.empty() ? nbl::RunConfig{} : nbl::RunConfig::load(o.config_path);
  auto& g = c.geometry;
  if (o.dim && *o.dim != g.dim) {
    g.dim = *o.dim;
    g.flux.assign(g.dim, std::vector<int>(g.dim, 0));
    g.flux[0][1] = 1;
    g.flux[1][0] = -1;
    if (g.beta_spec.type == "components") g.beta_spec = nbl::OneFormSpec{};
  }
  if (o.n) g.n = *o.n;
  if (o.flux) {
    g.flux.assign(g.dim, std::vector<int>(g.dim, 0));
    g.flux[0][1] = *o.flux;
    g.flux[1][0] = -*o.flux;
  }
  if (o.k) c.solver.k = *o.k;
  if (o.tol) c.solver.tol = *o.tol;
  if (o.seed) c.solver.seed = *o.seed;
  if (!o.weights.empty()) c.solver.weights = o.weights;
  if (o.gap_tol) c.solver.gap_tol = *o.gap_tol;
  if (o.n_theta) c.nodal.n_theta = *o.n_theta;
  if (o.tau) c.nodal.tau = *o.tau;
  if (o.sample_count) c.nodal.sample_count = *o.sample_count;
  if (!o.directions.empty()) c.perturb.directions = o.directions;
  if (!o.epsilons.empty()) c.perturb.epsilons = o.epsilons;
  if (o.fd_epsilon) c.perturb.fd_epsilon = *o.fd_epsilon;
  if (o.richardson_epsilon) c.perturb.richardson_epsilon = *o.richardson_epsilon;
  if (o.amplitude) c.perturb.amplitude = *o.amplitude;
  if (o.index) c.perturb.index = *o.index;
  if (o.split_seeds) c.perturb.split_seeds = *o.split_seeds;
  if (o.sphere_N || o.sphere_m) {
    if (!o.sphere_N || !o.sphere_m) throw nbl::Error("--N and --m go together");
    c.sphere.pairs = {{*o.sphere_N, *o.sphere_m}};
  }
  if (o.refinements) c.sphere.refinements = *o.refinements;
  c.validate();
  return c;
}

void print_summary(const nbl::Json& j) {
  std::cout << "config " << j["meta"]["config_hash"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant horizontal Laplacians on circle bundles over flat tori"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nbl::kToolVersion);

  Overrides o;
  nbl::OutputOptions out;

  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenpairs per weight, cached");
  add_common(spectrum, o, out);

  auto* nodal = app.add_subcommand("nodal", "nodal topology of one cached eigenpair");
  add_common(nodal, o, out);
  std::string cache_path;
  int nodal_index = 0;
  bool force = false, gate_mode = false;
  nodal->add_option("--cache", cache_path, "cache file from 'spectrum'")->required();
  nodal->add_option("--index", nodal_index, "eigenpair index")->required();
  nodal->add_flag("--force", force, "analyze degenerate eigenvalues anyway");
  nodal->add_flag("--gate", gate_mode, "exit 1 when a qualifying eigenfunction breaks the two-domain law");

  auto* perturb = app.add_subcommand("perturb", "first-order shifts and splitting experiments");
  add_common(perturb, o, out);
  perturb->add_option("--directions", o.directions, "perturb.directions")->delimiter(',');
  perturb->add_option("--epsilons", o.epsilons, "perturb.epsilons")->delimiter(',');
  perturb->add_option("--fd-epsilon", o.fd_epsilon, "perturb.fd_epsilon");
  perturb->add_option("--richardson-epsilon", o.richardson_epsilon, "perturb.richardson_epsilon");
  perturb->add_option("--amplitude", o.amplitude, "perturb.amplitude");
  perturb->add_option("--index", o.index, "perturb.index");
  perturb->add_option("--split-seeds", o.split_seeds, "perturb.split_seeds");

  auto* sphere = app.add_subcommand("sphere", "nodal counts of Re Y_N^m on S^2");
  add_common(sphere, o, out);
  sphere->add_option("--N", o.sphere_N, "degree (with --m; default all 1 <= m <= N <= 6)");
  sphere->add_option("--m", o.sphere_m, "order");
  sphere->add_option("--refinements", o.refinements, "sphere.refinements");

  auto* gate = app.add_subcommand("gate", "acceptance battery");
  add_common(gate, o, out);
  std::vector<int> only;
  gate->add_option("--criteria", only, "subset of criteria to run")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const nbl::RunConfig cfg = resolve(o);
    if (spectrum->parsed()) {
      const nbl::Json j = nbl::run_spectrum(cfg, out);
      print_summary(j);
      for (const auto& w : j["weights"]) {
        std::cout << "m=" << w["m"].get<int>() << ":";
        for (const auto& v : w["eigenvalues"]) std::printf(" %.10g", v.get<double>());
        std::cout << "  -> " << out.dir << "/" << w["cache"].get<std::string>() << "\n";
      }
      return 0;
    }
    if (nodal->parsed()) {
      const nbl::NodalOutcome r = nbl::run_nodal(cfg, cache_path, nodal_index, force, out);
      print_summary(r.report);
      const auto& rep = r.report["report"];
      std::cout << "domains " << rep["domains"] << ", components " << rep["components"]
                << (r.qualifying ? (r.law_holds ? "  (two-domain law holds)"
                                                : "  (two-domain law FAILS)")
                                 : "  (not qualifying)")
                << "\n";
      return gate_mode && r.qualifying && !r.law_holds ? 1 : 0;
    }
    if (perturb->parsed()) {
      const nbl::Json j = nbl::run_perturb(cfg, out);
      print_summary(j);
      for (const auto& c : j["first_order"])
        std::cout << c["direction"].get<std::string>() << ": analytic "
                  << c["finite_difference"]["analytic"] << ", fd "
                  << c["finite_difference"]["fd"] << ", Richardson "
                  << c["finite_difference"]["richardson_ratio"] << "\n";
      std::cout << j["splitting"].size() << " splitting experiments -> " << out.dir
                << "/perturb.json\n";
      return 0;
    }
    if (sphere->parsed()) {
      const nbl::Json j = nbl::run_sphere(cfg, out);
      print_summary(j);
      for (const auto& p : j["pairs"]) {
        const auto& last = p["levels"].back();
        std::cout << "N=" << p["N"] << " m=" << p["m"] << ": components " << last["components"]
                  << ", domains " << last["domains"] << " (oracle " << last["predicted_domains"]
                  << "), singular points " << last["singular_points"] << " (oracle "
                  << last["predicted_singular_points"] << "), N m = " << last["nm_expression"]
                  << "\n";
      }
      return 0;
    }
    if (gate->parsed()) {
      auto show = [](const nbl::CriterionResult& r) {
        std::printf("[%-12s] %2d %s: %s (%.1f s)\n", nbl::to_string(r.status), r.id,
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
      };
      nbl::GateReport report;
      if (only.empty()) {
        report = nbl::run_gate(cfg, show);
      } else {
        for (int id : only) {
          report.criteria.push_back(nbl::run_criterion(id, cfg));
          show(report.criteria.back());
          report.seconds += report.criteria.back().seconds;
        }
      }
      const nbl::Json j = nbl::to_json(report, cfg);
      nbl::write_file_atomic(out.dir + "/gate.json", nbl::dump_report(j));
      std::printf("gate %s in %.1f s\n", report.ok() ? "passed" : "FAILED", report.seconds);
      return report.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "nbl: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
