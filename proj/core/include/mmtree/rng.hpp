#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mmtree {

/// Counter-based random stream.
///
/// Draw i of a stream keyed by `key` is `mix(key + (i+1) * golden)`, with the
/// SplitMix64 finalizer as `mix`. Streams are therefore cheap to create and a
/// stream's output depends only on its key. Child streams are derived by
/// XOR-ing the key with a hash of a label (and optionally an index), so
/// per-tree or per-replicate streams do not depend on the order in which
/// they are created or consumed.
///
/// All samplers below are implemented here rather than through <random>
/// distributions, whose output is implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  Stream derive(std::string_view label) const;
  Stream derive(std::string_view label, std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }
  /// Student t with `dof` degrees of freedom: Z / sqrt(V / dof).
  double student_t(double dof);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// 64-bit FNV-1a followed by a SplitMix64 finalizer.
std::uint64_t hash_label(std::string_view label);
std::uint64_t mix64(std::uint64_t z);

}  // namespace mmtree
