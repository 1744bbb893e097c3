#pragma once

// On-disk cache of ensemble eigen-systems.
//
// Layout (all little-endian):
//   magic      8 bytes  "MFDEIGS\0"
//   version    u32      (1)
//   n_dim      u64
//   n_members  u64
//   seed       u64
//   alpha      f64
//   v2         f64
// then per member:
//   eigenvalues               n_dim x f64
//   eigenvectors, column-major n_dim*n_dim x (re f64, im f64)

#include <cstdint>
#include <fstream>
#include <string>

#include "mfd/ensembles.hpp"

namespace mfd {

struct EigenCacheHeader {
  std::uint32_t version = 1;
  std::uint64_t n_dim = 0;
  std::uint64_t n_members = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double v2 = 0.0;
};

class EigenCacheWriter {
public:
  EigenCacheWriter(const std::string& path, const EnsembleSpec& spec);
  void append(const ComplexEigenSystem& system);
  /// Flushes and checks that exactly n_members systems were written.
  void close();

private:
  std::ofstream out_;
  EigenCacheHeader header_;
  std::uint64_t written_ = 0;
};

class EigenCacheReader {
public:
  explicit EigenCacheReader(const std::string& path);
  const EigenCacheHeader& header() const { return header_; }
  bool next(ComplexEigenSystem& out);

private:
  std::ifstream in_;
  EigenCacheHeader header_;
  std::uint64_t read_ = 0;
};

}  // namespace mfd
