#pragma once

// Binary eigenpair cache, all fields little-endian:
//
//   "NBL1"
//   u32 dim, u32 n, i32 m, i32 flux[dim * dim] (row-major), u32 k,
//   u64 seed, u64 config_hash
//   f64 eigenvalues[k]
//   k sections of n^dim complex values as (re, im) f64 pairs, row-major
//   grid order (axis 0 slowest)

#include <cstdint>
#include <string>
#include <vector>

#include "nbl/spectral.hpp"

namespace nbl {

struct CacheFile {
  std::uint32_t dim = 0;
  std::uint32_t n = 0;
  std::int32_t m = 0;
  std::vector<std::int32_t> flux;  // dim * dim
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<double> eigenvalues;
  std::vector<CVec> sections;

  std::uint32_t count() const { return static_cast<std::uint32_t>(eigenvalues.size()); }
  bool operator==(const CacheFile& other) const;
};

CacheFile make_cache(const std::vector<EigenPair>& eigs, std::uint64_t seed,
                     std::uint64_t config_hash);

std::string encode_cache(const CacheFile& c);
// Throws Error on bad magic, truncation or trailing bytes.
CacheFile decode_cache(const std::string& bytes);

void write_cache(const std::string& path, const CacheFile& c);
CacheFile read_cache(const std::string& path);
// As above, and a header hash different from `expected_hash` is an error.
CacheFile read_cache(const std::string& path, std::uint64_t expected_hash);

// Writes through a uniquely named temporary in the same directory, then
// renames over `path`.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace nbl
