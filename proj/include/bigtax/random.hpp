#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bigtax {

// splitmix64 finalizer; used to turn (master seed, stream id) pairs into
// well-separated engine seeds so sub-streams are independent and portable.
std::uint64_t mix64(std::uint64_t z);

// deterministic sub-seed for replication r / bag member b / (dataset, method)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// FNV-1a, for hashing names into seed material
std::uint64_t hash_str(const std::string &s);

// Deterministic random stream. mt19937_64 output is fully specified by the
// standard, but the std distributions are not, so the draw algorithms here
// are fixed by hand and never change.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master, std::uint64_t stream = 0)
      : engine_(derive_seed(master, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1), 53-bit resolution
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on {0, ..., range-1}; unbiased via rejection
  std::uint64_t bounded(std::uint64_t range);

  // uniform on {lo, ..., hi} inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // standard normal via Marsaglia polar method (cached spare)
  double normal();

  // Fisher-Yates shuffle of 0..n-1
  std::vector<int> permutation(int n);

  // m distinct values from 0..n-1, in draw order
  std::vector<int> sample_without_replacement(int n, int m);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bigtax
