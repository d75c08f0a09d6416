#include "nbl/cache.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nbl/config.hpp"

namespace nbl {

namespace {

constexpr char kMagic[4] = {'N', 'B', 'L', '1'};

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T take() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error("cache file truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::size_t grid_points(std::uint32_t dim, std::uint32_t n) {
  std::size_t s = 1;
  for (std::uint32_t a = 0; a < dim; ++a) s *= n;
  return s;
}

}  // namespace

bool CacheFile::operator==(const CacheFile& o) const {
  if (dim != o.dim || n != o.n || m != o.m || flux != o.flux || seed != o.seed ||
      config_hash != o.config_hash || eigenvalues.size() != o.eigenvalues.size() ||
      sections.size() != o.sections.size())
    return false;
  if (std::memcmp(eigenvalues.data(), o.eigenvalues.data(), eigenvalues.size() * sizeof(double)))
    return false;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (sections[i].size() != o.sections[i].size()) return false;
    if (std::memcmp(sections[i].data(), o.sections[i].data(),
                    static_cast<std::size_t>(sections[i].size()) * sizeof(cplx)))
      return false;
  }
  return true;
}

CacheFile make_cache(const std::vector<EigenPair>& eigs, std::uint64_t seed,
                     std::uint64_t config_hash) {
  if (eigs.empty()) throw Error("cannot cache an empty eigenpair list");
  CacheFile c;
  const BaseGrid& g = eigs.front().section.grid();
  c.dim = static_cast<std::uint32_t>(g.dim());
  c.n = static_cast<std::uint32_t>(g.n());
  c.m = eigs.front().m;
  const FluxMatrix& f = eigs.front().section.connection().flux();
  for (int a = 0; a < g.dim(); ++a)
    for (int b = 0; b < g.dim(); ++b) c.flux.push_back(f(a, b));
  c.seed = seed;
  c.config_hash = config_hash;
  for (const auto& e : eigs) {
    c.eigenvalues.push_back(e.lambda);
    c.sections.push_back(e.section.values());
  }
  return c;
}

std::string encode_cache(const CacheFile& c) {
  if (c.flux.size() != static_cast<std::size_t>(c.dim) * c.dim)
    throw Error("cache flux block does not match dim");
  if (c.sections.size() != c.eigenvalues.size())
    throw Error("cache needs one section per eigenvalue");
  const std::size_t points = grid_points(c.dim, c.n);
  std::string out(kMagic, 4);
  put(out, c.dim);
  put(out, c.n);
  put(out, c.m);
  for (std::int32_t v : c.flux) put(out, v);
  put(out, c.count());
  put(out, c.seed);
  put(out, c.config_hash);
  for (double v : c.eigenvalues) put(out, v);
  for (const auto& s : c.sections) {
    if (static_cast<std::size_t>(s.size()) != points)
      throw Error("cache section length does not match the grid");
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      put(out, s[i].real());
      put(out, s[i].imag());
    }
  }
  return out;
}

CacheFile decode_cache(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error("not an NBL1 cache file (bad magic)");
  const std::string body = bytes.substr(4);
  Cursor cur(body);
  CacheFile c;
  c.dim = cur.take<std::uint32_t>();
  c.n = cur.take<std::uint32_t>();
  c.m = cur.take<std::int32_t>();
  if (c.dim < 2 || c.dim > static_cast<std::uint32_t>(kMaxDim) || c.n == 0)
    throw Error("cache header has an invalid grid shape");
  for (std::uint32_t i = 0; i < c.dim * c.dim; ++i) c.flux.push_back(cur.take<std::int32_t>());
  const std::uint32_t k = cur.take<std::uint32_t>();
  c.seed = cur.take<std::uint64_t>();
  c.config_hash = cur.take<std::uint64_t>();
  const std::size_t points = grid_points(c.dim, c.n);
  if (cur.remaining() != static_cast<std::size_t>(k) * (8 + 16 * points))
    throw Error("cache payload size does not match its header");
  for (std::uint32_t i = 0; i < k; ++i) c.eigenvalues.push_back(cur.take<double>());
  for (std::uint32_t i = 0; i < k; ++i) {
    CVec s(static_cast<Eigen::Index>(points));
    for (std::size_t p = 0; p < points; ++p) {
      const double re = cur.take<double>();
      const double im = cur.take<double>();
      s[static_cast<Eigen::Index>(p)] = cplx(re, im);
    }
    c.sections.push_back(std::move(s));
  }
  return c;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cache(const std::string& path, const CacheFile& c) {
  write_file_atomic(path, encode_cache(c));
}

CacheFile read_cache(const std::string& path) { return decode_cache(read_file(path)); }

CacheFile read_cache(const std::string& path, std::uint64_t expected_hash) {
  CacheFile c = read_cache(path);
  if (c.config_hash != expected_hash)
    throw Error("cache '" + path + "' was written for config " + hex64(c.config_hash) +
                ", current config is " + hex64(expected_hash));
  return c;
}

}  // namespace nbl
