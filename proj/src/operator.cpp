#include "nbl/operator.hpp"

#include <cmath>

namespace nbl {

cplx edge_link(const Connection& conn, std::size_t from, int axis, int m) {
  const BaseGrid& g = conn.grid();
  bool wrapped = false;
  const auto to = g.neighbor(from, axis, +1, &wrapped);
  cplx u = std::polar(1.0, -m * conn.edge_integral(from, axis));
  if (wrapped) u *= std::conj(conn.twist(axis, g.coords(to), m));
  return u;
}

double edge_weight(const BaseGrid& grid, std::size_t from, int axis) {
  const int d = grid.dim();
  const auto to = grid.neighbor(from, axis, +1);
  const RVec& u = grid.conformal();
  const double mean = 0.5 * (std::exp((d - 2) * u[static_cast<Eigen::Index>(from)]) +
                             std::exp((d - 2) * u[static_cast<Eigen::Index>(to)]));
  return mean * std::pow(grid.spacing(), d - 2);
}

OperatorPair assemble_forms(const ConnectionPtr& conn, int m) {
  if (!conn) throw Error("operator assembly needs a connection");
  const BaseGrid& g = conn->grid();
  OperatorPair op;
  op.m = m;
  op.connection = conn;
  op.mass = g.volume_weights();
  op.edges.reserve(g.size() * g.dim());

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(g.size() * (4 * g.dim()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) {
      const auto j = g.neighbor(i, a, +1);
      const double w = edge_weight(g, i, a);
      const cplx link = edge_link(*conn, i, a, m);
      op.edges.push_back({i, j, a, w, link});
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      triplets.emplace_back(ii, ii, cplx(w, 0.0));
      triplets.emplace_back(jj, jj, cplx(w, 0.0));
      triplets.emplace_back(jj, ii, -w * link);
      triplets.emplace_back(ii, jj, -w * std::conj(link));
    }
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  op.stiffness.makeCompressed();
  return op;
}

Section apply_operator(const OperatorPair& op, const Section& s) {
  if (s.weight() != op.m) throw Error("section weight does not match the operator");
  if (s.connection_ptr() != op.connection)
    throw Error("section lives on a different grid or connection");
  CVec out = op.stiffness * s.values();
  return Section(op.connection, op.m, std::move(out));
}

double quadratic_form(const OperatorPair& op, const CVec& f) {
  double q = 0.0;
  for (const auto& e : op.edges) {
    const cplx diff = f[static_cast<Eigen::Index>(e.to)] -
                      e.link * f[static_cast<Eigen::Index>(e.from)];
    q += e.weight * std::norm(diff);
  }
  return q;
}

double rayleigh_quotient(const OperatorPair& op, const Section& s) {
  if (s.weight() != op.m) throw Error("section weight does not match the operator");
  const double denom = (s.values().cwiseAbs2().array() * op.mass.array()).sum();
  if (!(denom > 0.0)) throw Error("Rayleigh quotient of a zero section");
  return quadratic_form(op, s.values()) / denom;
}

double total_eigenvalue(double op_eigenvalue, int m) {
  return op_eigenvalue + static_cast<double>(m) * m;
}

double hermiticity_defect(const SparseC& k) {
  double worst = 0.0;
  for (int col = 0; col < k.outerSize(); ++col) {
    for (SparseC::InnerIterator it(k, col); it; ++it) {
      worst = std::max(worst, std::abs(it.value() - std::conj(k.coeff(it.col(), it.row()))));
    }
  }
  return worst;
}

}  // namespace nbl
