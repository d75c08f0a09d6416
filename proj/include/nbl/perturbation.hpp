#pragma once

// First-order variations of L_m eigenvalues under conformal metric changes
// g(t) = e^{2t u̇} g and flux-preserving connection changes η(t) = η + t β̇,
// evaluated from the t-derivative of the discrete form (Hellmann–Feynman for
// the pencil) and from continuum quadrature for comparison.

#include <optional>
#include <vector>

#include "nbl/spectral.hpp"

namespace nbl {

// Everything needed to rebuild (K, M) at a perturbed parameter value.
struct Model {
  int dim = 2;
  int n = 32;
  RVec conformal;
  FluxMatrix flux;
  EdgeField beta;
  int m = 1;

  static Model build(int dim, int n, const PeriodicField& u, const FluxMatrix& flux,
                     const PeriodicOneForm& beta, int m);

  ConnectionPtr connection() const;
  OperatorPair assemble() const { return assemble_forms(connection(), m); }
};

struct MetricVariation {
  RVec u_dot;

  static MetricVariation from_field(const BaseGrid& grid, const PeriodicField& field);
  // Trace of b = -2 u̇ I, i.e. -2 d u̇ per point.
  RVec trace_b(int dim) const { return -2.0 * dim * u_dot; }
};

struct ConnectionVariation {
  EdgeField beta_dot;

  static ConnectionVariation from_one_form(const BaseGrid& grid, const PeriodicOneForm& form);
  // β̇ = dχ with the exact discrete gradient.
  static ConnectionVariation pure_gauge(const BaseGrid& grid, const RVec& chi);
  // Σ over each coordinate plane of the discrete curl of β̇ (zero when the
  // variation preserves the Chern class).
  double flux_defect(const BaseGrid& grid) const;
};

Model perturbed(const Model& base, double t, const MetricVariation* metric,
                const ConnectionVariation* connection);

class DegenerateEigenvalueError : public Error {
 public:
  DegenerateEigenvalueError(const std::string& what, int index, Cluster cluster)
      : Error(what), index_(index), cluster_(cluster) {}
  int index() const { return index_; }
  const Cluster& cluster() const { return cluster_; }

 private:
  int index_;
  Cluster cluster_;
};

struct FirstOrderShift {
  // d/dt of the discrete Rayleigh quotient at the eigenvector.
  double discrete = 0.0;
  // Continuum expression by quadrature (real part).
  double continuum = 0.0;
  // Imaginary part of the continuum pairing; vanishes up to discretization.
  double continuum_imag = 0.0;
};

// Derivative of f* K f - λ f* M f for an M-normalized f (no simplicity check).
double form_derivative(const OperatorPair& op, const CVec& f, double lambda,
                       const MetricVariation* metric, const ConnectionVariation* connection);

// Throws DegenerateEigenvalueError when eigs[index] is not simple under gap_tol.
FirstOrderShift metric_first_order_shift(const OperatorPair& op,
                                         const std::vector<EigenPair>& eigs, int index,
                                         const MetricVariation& var, double gap_tol = 1e-6);
FirstOrderShift connection_first_order_shift(const OperatorPair& op,
                                             const std::vector<EigenPair>& eigs, int index,
                                             const ConnectionVariation& var,
                                             double gap_tol = 1e-6);

// -2 λ Σ u̇ |f|^2 M: the d = 2 conformal identity.
double conformal_identity_shift(const EigenPair& eig, const MetricVariation& var);

struct FiniteDifferenceCheck {
  double analytic = 0.0;
  double epsilon = 0.0;
  double fd = 0.0;  // central difference at ε
  double relative_error = 0.0;
  // The O(ε²) truncation error is only visible above roundoff, so the ratio
  // is measured at a separate, larger step ε_R:
  // |fd(ε_R) - analytic| / |fd(ε_R/2) - analytic|.
  double richardson_epsilon = 0.0;
  double fd_richardson = 0.0;
  double fd_richardson_half = 0.0;
  double richardson_ratio = 0.0;
};

// Central differences of eigenvalue `index` along the given direction.
FiniteDifferenceCheck finite_difference_check(const Model& model, int index,
                                              const MetricVariation* metric,
                                              const ConnectionVariation* connection,
                                              double epsilon, const SolverOptions& solver,
                                              double richardson_epsilon = 1e-2);

enum class Direction { Metric, Connection, Both, PureGauge };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct SplitConfig {
  int n = 32;
  int flux = 2;
  int m = 1;
  Direction direction = Direction::Connection;
  std::vector<double> epsilons{1e-2, 1e-3};
  std::uint64_t seed = 1;
  double gap_tol = 1e-6;
  int k = 4;
  // Amplitude of the random direction before scaling by ε.
  double amplitude = 1.0;
  int max_mode = 2;
  // Also difference the multiplet trace (two extra solves).
  bool sum_rule = true;
};

struct SplitStep {
  double epsilon = 0.0;
  std::vector<double> eigenvalues;
  ClusterReport clusters;
  double gap = 0.0;  // largest-minus-smallest spacing inside the original multiplet
  double min_gap = 0.0;
  bool split = false;  // every member of the original multiplet is now simple
};

struct SplitReport {
  SplitConfig config;
  std::vector<double> eigenvalues_before;
  ClusterReport clusters_before;
  int multiplet_size = 0;
  std::vector<SplitStep> steps;
  // d/dε of the multiplet eigenvalue sum: trace formula vs central difference.
  double trace_derivative = 0.0;
  double trace_fd = 0.0;
  double trace_relative_error = 0.0;
};

MetricVariation random_metric_direction(const BaseGrid& grid, const SplitConfig& cfg);
ConnectionVariation random_connection_direction(const BaseGrid& grid, const SplitConfig& cfg);

SplitReport splitting_experiment(const SplitConfig& cfg, const SolverOptions& solver = {});

}  // namespace nbl
