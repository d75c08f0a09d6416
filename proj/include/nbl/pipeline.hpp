#pragma once

// Orchestration behind the CLI verbs. Every report carries a "meta" block
// with the config hash, seed, resolution and tool version; files are
// written atomically into the output directory.

#include <optional>
#include <string>

#include "nbl/cache.hpp"
#include "nbl/config.hpp"
#include "nbl/sphere.hpp"

namespace nbl {

struct OutputOptions {
  std::string dir = "out";
  bool svg = false;
};

Json report_meta(const RunConfig& cfg);

Json to_json(const ClusterReport& c);
Json to_json(const NodalReport& r);
Json to_json(const FirstOrderShift& s);
Json to_json(const FiniteDifferenceCheck& c);
Json to_json(const SplitReport& r);
Json to_json(const sphere::SphereNodalReport& r);
Json to_json(const sphere::FixedPointReport& r);

// Doubles are written with 17 significant digits, so reports round-trip.
std::string dump_report(const Json& j);

std::string cache_name(int m);

// Solves every configured weight, writes spectrum_m<m>.nbl caches and
// spectrum.json. Solver failures are rethrown with the weight in the message.
Json run_spectrum(const RunConfig& cfg, const OutputOptions& out);

struct NodalOutcome {
  Json report;
  bool qualifying = false;  // nontrivial flux, m != 0, simple eigenvalue
  bool law_holds = false;   // 2 domains and 1 nodal-set component
};

// Loads eigenpair `index` from a cache written for this config (hash
// checked) and analyzes its nodal topology. Degenerate eigenvalues are
// rejected unless `force`.
NodalOutcome run_nodal(const RunConfig& cfg, const std::string& cache_path, int index,
                       bool force, const OutputOptions& out);

Json run_perturb(const RunConfig& cfg, const OutputOptions& out);

Json run_sphere(const RunConfig& cfg, const OutputOptions& out);

}  // namespace nbl
