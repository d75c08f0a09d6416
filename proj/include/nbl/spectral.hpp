#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nbl/operator.hpp"

namespace nbl {

struct EigenPair {
  int m = 0;
  double lambda = 0.0;
  Section section;  // M-normalized
  double residual = 0.0;
};

struct SolverOptions {
  int k = 8;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  // 0 means 500 * k block Krylov steps.
  int max_iterations = 0;
  // Problems up to this size use a dense Hermitian eigensolver.
  Eigen::Index dense_threshold = 300;
  // Shift σ of the shift-invert operator (K + σM)^{-1} M.
  double shift = 1.0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int first_unconverged)
      : Error(what), first_unconverged_(first_unconverged) {}
  int first_unconverged() const { return first_unconverged_; }

 private:
  int first_unconverged_;
};

// The k lowest eigenpairs of K f = λ M f, ascending, each with
// ‖M^{-1/2}(K f - λ M f)‖ <= tol (λ + 1).
std::vector<EigenPair> lowest_eigenpairs(const OperatorPair& op,
                                         const SolverOptions& opts = {});

double residual_norm(const OperatorPair& op, const CVec& f, double lambda);

struct Cluster {
  int start = 0;
  int size = 0;
  double mean = 0.0;
  double spread = 0.0;
  // Distance to the next cluster; +inf for the last one.
  double gap = 0.0;
};

struct ClusterReport {
  std::vector<Cluster> groups;

  int cluster_of(int index) const;
  bool simple(int index) const { return groups.at(cluster_of(index)).size == 1; }
};

ClusterReport detect_clusters(const std::vector<double>& eigenvalues, double gap_tol);
ClusterReport detect_clusters(const std::vector<EigenPair>& eigs, double gap_tol);

struct Collision {
  int m1, index1, m2, index2;
  double distance;
};

struct DisjointnessReport {
  double min_distance = 0.0;  // +inf with fewer than two weights
  std::vector<Collision> collisions;
};

// Compares total eigenvalues λ + m^2 between distinct weights.
DisjointnessReport cross_weight_disjointness(
    const std::map<int, std::vector<double>>& eigenvalues_by_weight, double tol);

}  // namespace nbl
