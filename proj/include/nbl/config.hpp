#pragma once

// Run configuration: a JSON document with the blocks geometry, solver,
// nodal, perturb and sphere. Missing keys take defaults, unknown keys are
// rejected, and the hash is taken over the fully populated document so
// that spelling a default explicitly does not change it.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nbl/nodal.hpp"
#include "nbl/perturbation.hpp"

namespace nbl {

inline constexpr const char* kToolVersion = "0.3.0";

using Json = nlohmann::ordered_json;

// Scalar field description for u (and each component of β).
//   {"type": "zero"}
//   {"type": "constant", "value": 0.1}
//   {"type": "fourier", "constant": 0, "terms": [{"k": [1, 0], "amplitude": 0.3, "kind": "cos"}]}
//   {"type": "random", "max_mode": 2, "amplitude": 0.3, "seed": 11}
struct FieldSpec {
  std::string type = "zero";
  double value = 0.0;
  std::vector<FourierTerm> terms;
  int max_mode = 2;
  double amplitude = 0.0;
  std::uint64_t seed = 1;

  PeriodicField field(int dim) const;
};

// {"type": "zero"}, {"type": "random", ...} as above, or
// {"type": "components", "components": [FieldSpec, ...]} with one per axis.
struct OneFormSpec {
  std::string type = "zero";
  std::vector<FieldSpec> components;
  int max_mode = 2;
  double amplitude = 0.0;
  std::uint64_t seed = 1;

  PeriodicOneForm form(int dim) const;
};

struct GeometryConfig {
  int dim = 2;
  int n = 32;
  // integer c_12 shorthand in the file is accepted for d = 2
  std::vector<std::vector<int>> flux{{0, 1}, {-1, 0}};
  FieldSpec u_spec{"random", 0.0, {}, 2, 0.3, 11};
  OneFormSpec beta_spec{"random", {}, 2, 0.5, 12};

  FluxMatrix flux_matrix() const { return FluxMatrix::from_rows(dim, flux); }
  ConnectionPtr connection() const;
  Model model(int m) const;
};

struct SolverConfig {
  int k = 8;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::vector<int> weights{1};
  double gap_tol = 1e-6;

  SolverOptions options() const;
};

struct NodalConfig {
  int n_theta = 0;
  double tau = 1e-6;  // relative to max |f|
  int sample_count = 500;

  NodalOptions options(std::uint64_t seed) const;
};

struct PerturbConfig {
  std::vector<std::string> directions{"metric", "connection", "pure_gauge"};
  std::vector<double> epsilons{1e-2, 1e-3};
  double fd_epsilon = 1e-4;
  double richardson_epsilon = 1e-2;
  int index = 0;
  double amplitude = 0.1;
  int max_mode = 2;
  // splitting battery on the flat degenerate configuration
  int split_n = 32;
  int split_flux = 2;
  int split_m = 1;
  int split_seeds = 4;
};

struct SphereConfig {
  std::vector<std::pair<int, int>> pairs;  // (N, m); empty means all 1 <= m <= N <= 6
  int refinements = 2;

  std::vector<std::pair<int, int>> resolved_pairs() const;
};

struct RunConfig {
  GeometryConfig geometry;
  SolverConfig solver;
  NodalConfig nodal;
  PerturbConfig perturb;
  SphereConfig sphere;

  // Throws Error naming the offending key.
  static RunConfig from_json(const Json& j);
  static RunConfig load(const std::string& path);
  Json to_json() const;
  // Structural checks beyond the schema (antisymmetry, ranges).
  void validate() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace nbl
