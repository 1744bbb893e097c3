#include "mfd/eigen_cache.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "mfd/errors.hpp"

namespace mfd {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'F', 'D', 'E', 'I', 'G', 'S', '\0'};

template <class T>
void put_le(std::ostream& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  std::array<char, sizeof(T)> bytes{};
  for (size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw DataError("eigen cache: truncated file");
  std::uint64_t bits = 0;
  for (size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

EigenCacheWriter::EigenCacheWriter(const std::string& path, const EnsembleSpec& spec)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw DataError("eigen cache: cannot open " + path + " for writing");
  spec.validate();
  header_.n_dim = static_cast<std::uint64_t>(spec.n_dim);
  header_.n_members = static_cast<std::uint64_t>(spec.n_members);
  header_.seed = spec.seed;
  header_.alpha = spec.alpha;
  header_.v2 = spec.variance();
  out_.write(kMagic.data(), kMagic.size());
  put_le(out_, header_.version);
  put_le(out_, header_.n_dim);
  put_le(out_, header_.n_members);
  put_le(out_, header_.seed);
  put_le(out_, header_.alpha);
  put_le(out_, header_.v2);
}

void EigenCacheWriter::append(const ComplexEigenSystem& system) {
  const auto n = static_cast<Eigen::Index>(header_.n_dim);
  if (system.eigenvalues.size() != n || system.eigenvectors.rows() != n || system.eigenvectors.cols() != n)
    throw DataError("eigen cache: system dimension does not match header");
  if (written_ >= header_.n_members) throw DataError("eigen cache: more systems than n_members");
  for (Eigen::Index i = 0; i < n; ++i) put_le(out_, system.eigenvalues(i));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      put_le(out_, system.eigenvectors(i, j).real());
      put_le(out_, system.eigenvectors(i, j).imag());
    }
  }
  ++written_;
}

void EigenCacheWriter::close() {
  out_.flush();
  if (!out_) throw DataError("eigen cache: write failed");
  if (written_ != header_.n_members) throw DataError("eigen cache: fewer systems than n_members");
  out_.close();
}

EigenCacheReader::EigenCacheReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw DataError("eigen cache: cannot open " + path);
  std::array<char, 8> magic{};
  in_.read(magic.data(), magic.size());
  if (!in_ || magic != kMagic) throw DataError("eigen cache: bad magic in " + path);
  header_.version = get_le<std::uint32_t>(in_);
  if (header_.version != 1) throw DataError("eigen cache: unsupported version");
  header_.n_dim = get_le<std::uint64_t>(in_);
  header_.n_members = get_le<std::uint64_t>(in_);
  header_.seed = get_le<std::uint64_t>(in_);
  header_.alpha = get_le<double>(in_);
  header_.v2 = get_le<double>(in_);
}

bool EigenCacheReader::next(ComplexEigenSystem& out) {
  if (read_ >= header_.n_members) return false;
  const auto n = static_cast<Eigen::Index>(header_.n_dim);
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.eigenvalues(i) = get_le<double>(in_);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = get_le<double>(in_);
      const double im = get_le<double>(in_);
      out.eigenvectors(i, j) = cdouble(re, im);
    }
  }
  ++read_;
  return true;
}

}  // namespace mfd
