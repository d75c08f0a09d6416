#pragma once

// Discrete quadratic form of the weight-m horizontal Laplacian L_m:
//
//   Q_m(f) = Σ_edges w_e |f_to - U_e f_from|^2,   ‖f‖^2 = Σ_i M_i |f_i|^2,
//
// U_e = exp(-i m ∫_e η) times the twist phase on wrap edges, edge weight
// w_e = mean of e^{(d-2)u} over the endpoints times h^{d-2}, and mass
// M_i = e^{d u_i} h^d. Eigenpairs of the pencil (K, M) discretize L_m.

#include <vector>

#include <Eigen/SparseCore>

#include "nbl/torus.hpp"

namespace nbl {

using SparseC = Eigen::SparseMatrix<cplx>;

struct Edge {
  std::size_t from;
  std::size_t to;
  int axis;
  double weight;
  cplx link;  // includes the wrap twist
};

struct OperatorPair {
  int m = 0;
  SparseC stiffness;
  RVec mass;
  std::vector<Edge> edges;
  ConnectionPtr connection;

  const BaseGrid& grid() const { return connection->grid(); }
  Eigen::Index dim() const { return mass.size(); }
};

// Link phase on one edge for weight m, including the wrap twist.
cplx edge_link(const Connection& conn, std::size_t from, int axis, int m);
// Metric coefficient of the edge from `from` along `axis`.
double edge_weight(const BaseGrid& grid, std::size_t from, int axis);

OperatorPair assemble_forms(const ConnectionPtr& conn, int m);

Section apply_operator(const OperatorPair& op, const Section& s);
// Σ_e w_e |f_to - U_e f_from|^2, evaluated edge by edge.
double quadratic_form(const OperatorPair& op, const CVec& f);
double rayleigh_quotient(const OperatorPair& op, const Section& s);

// Eigenvalue of -Δ_G on the lift of an L_m eigensection.
double total_eigenvalue(double op_eigenvalue, int m);

// max |K_ij - conj(K_ji)| over stored entries.
double hermiticity_defect(const SparseC& k);

}  // namespace nbl
