#pragma once

#include <filesystem>
#include <string>

#include "nbl/spectral.hpp"

namespace testing {

inline nbl::ConnectionPtr flat(int n, int c12, int dim = 2) {
  nbl::FluxMatrix f(dim);
  f.set(0, 1, c12);
  return nbl::make_connection(nbl::make_base_grid(dim, n, nbl::PeriodicField::zero()), f,
                              nbl::PeriodicOneForm::zero(dim));
}

// The seeded perturbed geometry used throughout: u amplitude 0.3, β amplitude 0.5.
inline nbl::ConnectionPtr perturbed(int n, int c12, int dim = 2) {
  nbl::FluxMatrix f(dim);
  f.set(0, 1, c12);
  return nbl::make_connection(
      nbl::make_base_grid(dim, n, nbl::PeriodicField::random(dim, 2, 0.3, 11)), f,
      nbl::PeriodicOneForm::random(dim, 2, 0.5, 12));
}

inline std::vector<nbl::EigenPair> solve(const nbl::ConnectionPtr& c, int m, int k) {
  nbl::SolverOptions o;
  o.k = k;
  return nbl::lowest_eigenpairs(nbl::assemble_forms(c, m), o);
}

inline std::string scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nbl_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace testing
