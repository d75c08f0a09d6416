#include "nbl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace nbl {

namespace {

using DenseC = Eigen::MatrixXcd;

// Rotate so that the largest entry is real and positive.
void fix_phase(CVec& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs2().maxCoeff(&arg);
  const double mag = std::abs(v[arg]);
  if (mag > 0.0) v *= std::conj(v[arg]) / mag;
}

// A = M^{-1/2} K M^{-1/2} acting on the columns of X.
DenseC apply_normalized(const OperatorPair& op, const RVec& inv_sqrt_mass,
                        const DenseC& x) {
  DenseC y = inv_sqrt_mass.asDiagonal() * x;
  DenseC ky = op.stiffness * y;
  return inv_sqrt_mass.asDiagonal() * ky;
}

void orthonormalize_against(const DenseC& basis, DenseC& w) {
  if (basis.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.adjoint() * w);
  }
  Eigen::HouseholderQR<DenseC> qr(w);
  DenseC q = qr.householderQ() * DenseC::Identity(w.rows(), w.cols());
  if (basis.cols() > 0) q -= basis * (basis.adjoint() * q);
  // second QR restores orthonormality after the final projection
  Eigen::HouseholderQR<DenseC> qr2(q);
  w = qr2.householderQ() * DenseC::Identity(q.rows(), q.cols());
}

std::vector<EigenPair> package(const OperatorPair& op, const RVec& inv_sqrt_mass,
                               const DenseC& vectors) {
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(vectors.cols()));
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    CVec f = inv_sqrt_mass.asDiagonal() * vectors.col(i);
    fix_phase(f);
    Section s(op.connection, op.m, std::move(f));
    s.normalize();
    // The edge sum has relative roundoff ~eps·λ, unlike the Ritz value (~eps·‖A‖).
    const double lambda = rayleigh_quotient(op, s);
    const double res = residual_norm(op, s.values(), lambda);
    out.push_back(EigenPair{op.m, lambda, std::move(s), res});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  return out;
}

std::vector<EigenPair> dense_solve(const OperatorPair& op, const RVec& inv_sqrt_mass,
                                   int k) {
  DenseC a = DenseC(op.stiffness);
  a = inv_sqrt_mass.asDiagonal() * a * inv_sqrt_mass.asDiagonal();
  // symmetrize exactly against roundoff in the scaling
  a = 0.5 * (a + a.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<DenseC> es(a);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0);
  return package(op, inv_sqrt_mass, es.eigenvectors().leftCols(k));
}

std::vector<EigenPair> krylov_solve(const OperatorPair& op, const RVec& inv_sqrt_mass,
                                    const SolverOptions& opts) {
  const Eigen::Index n = op.dim();
  const int k = opts.k;
  const int block = k + std::max(4, k / 2);
  const int steps = 4;
  const int budget = opts.max_iterations > 0 ? opts.max_iterations : 500 * k;

  SparseC shifted = op.stiffness;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += opts.shift * op.mass[i];
  Eigen::SimplicialLDLT<SparseC, Eigen::Lower> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw ConvergenceError("factorization of K + σM failed", 0);
  const RVec sqrt_mass = op.mass.cwiseSqrt();
  auto apply_inverse = [&](const DenseC& x) -> DenseC {
    DenseC rhs = sqrt_mass.asDiagonal() * x;
    DenseC y = ldlt.solve(rhs);
    return sqrt_mass.asDiagonal() * y;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseC x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = cplx(gauss(rng), gauss(rng));
  orthonormalize_against(DenseC(n, 0), x);

  int used = 0;
  int first_bad = 0;
  while (used < budget) {
    DenseC basis(n, block * (steps + 1));
    basis.leftCols(block) = x;
    DenseC w = x;
    for (int s = 1; s <= steps; ++s) {
      w = apply_inverse(w);
      orthonormalize_against(basis.leftCols(block * s), w);
      basis.middleCols(block * s, block) = w;
    }
    used += steps;

    const DenseC av = apply_normalized(op, inv_sqrt_mass, basis);
    DenseC h = basis.adjoint() * av;
    h = 0.5 * (h + h.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<DenseC> es(h);
    if (es.info() != Eigen::Success)
      throw ConvergenceError("Rayleigh-Ritz eigensolver failed", 0);
    const DenseC y = es.eigenvectors().leftCols(block);
    x = basis * y;
    const DenseC ax = av * y;

    first_bad = -1;
    for (int i = 0; i < k; ++i) {
      const double theta = es.eigenvalues()[i];
      const double res = (ax.col(i) - theta * x.col(i)).norm();
      if (res > opts.tol * (std::abs(theta) + 1.0)) {
        first_bad = i;
        break;
      }
    }
    if (first_bad < 0) {
      return package(op, inv_sqrt_mass, x.leftCols(k));
    }
    // keep the Ritz block well conditioned for the next sweep
    orthonormalize_against(DenseC(n, 0), x);
  }
  std::ostringstream msg;
  msg << "eigensolver did not converge within " << budget
      << " block steps; first unconverged index " << first_bad;
  throw ConvergenceError(msg.str(), first_bad);
}

}  // namespace

double residual_norm(const OperatorPair& op, const CVec& f, double lambda) {
  const CVec r = op.stiffness * f - lambda * (op.mass.asDiagonal() * f);
  const double fm = std::sqrt((f.cwiseAbs2().array() * op.mass.array()).sum());
  return std::sqrt((r.cwiseAbs2().array() / op.mass.array()).sum()) / fm;
}

std::vector<EigenPair> lowest_eigenpairs(const OperatorPair& op, const SolverOptions& opts) {
  const Eigen::Index n = op.dim();
  if (opts.k < 1 || opts.k > n / 4) {
    std::ostringstream msg;
    msg << "requested k = " << opts.k << " eigenpairs; need 1 <= k <= " << n / 4;
    throw Error(msg.str());
  }
  const RVec inv_sqrt_mass = op.mass.cwiseSqrt().cwiseInverse();
  std::vector<EigenPair> out = n <= opts.dense_threshold
                                   ? dense_solve(op, inv_sqrt_mass, opts.k)
                                   : krylov_solve(op, inv_sqrt_mass, opts);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].residual > opts.tol * (out[i].lambda + 1.0)) {
      std::ostringstream msg;
      msg << "eigenpair " << i << " residual " << out[i].residual
          << " exceeds tolerance " << opts.tol;
      throw ConvergenceError(msg.str(), static_cast<int>(i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

int ClusterReport::cluster_of(int index) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (index >= groups[g].start && index < groups[g].start + groups[g].size)
      return static_cast<int>(g);
  }
  throw Error("eigenvalue index " + std::to_string(index) + " outside cluster report");
}

ClusterReport detect_clusters(const std::vector<double>& ev, double gap_tol) {
  ClusterReport report;
  const int n = static_cast<int>(ev.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    const bool split =
        i == n || (ev[i] - ev[i - 1]) >= gap_tol * (1.0 + std::abs(ev[i - 1]));
    if (!split) continue;
    Cluster c;
    c.start = start;
    c.size = i - start;
    double sum = 0.0;
    for (int j = start; j < i; ++j) sum += ev[j];
    c.mean = sum / c.size;
    c.spread = ev[i - 1] - ev[start];
    c.gap = i == n ? std::numeric_limits<double>::infinity() : ev[i] - ev[i - 1];
    report.groups.push_back(c);
    start = i;
  }
  return report;
}

ClusterReport detect_clusters(const std::vector<EigenPair>& eigs, double gap_tol) {
  std::vector<double> ev;
  ev.reserve(eigs.size());
  for (const auto& e : eigs) ev.push_back(e.lambda);
  return detect_clusters(ev, gap_tol);
}

DisjointnessReport cross_weight_disjointness(
    const std::map<int, std::vector<double>>& by_weight, double tol) {
  DisjointnessReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (auto it1 = by_weight.begin(); it1 != by_weight.end(); ++it1) {
    for (auto it2 = std::next(it1); it2 != by_weight.end(); ++it2) {
      const auto& [m1, e1] = *it1;
      const auto& [m2, e2] = *it2;
      for (std::size_t i = 0; i < e1.size(); ++i) {
        for (std::size_t j = 0; j < e2.size(); ++j) {
          const double t1 = total_eigenvalue(e1[i], m1);
          const double t2 = total_eigenvalue(e2[j], m2);
          const double dist = std::abs(t1 - t2);
          report.min_distance = std::min(report.min_distance, dist);
          if (dist < tol * (1.0 + std::max(t1, t2)))
            report.collisions.push_back(
                {m1, static_cast<int>(i), m2, static_cast<int>(j), dist});
        }
      }
    }
  }
  return report;
}

}  // namespace nbl
