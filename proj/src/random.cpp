#include "bigtax/random.hpp"

#include <cmath>

#include "bigtax/errors.hpp"

namespace bigtax {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ (stream * 0xda942042e4dd58b5ULL + 1));
}

std::uint64_t hash_str(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t RandomStream::bounded(std::uint64_t range) {
  if (range == 0) fail(ErrorCode::invalid_argument, "bounded: empty range");
  std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    std::uint64_t x = next_u64();
    if (x >= threshold) return x % range;
  }
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) fail(ErrorCode::invalid_argument, "uniform_int: lo > hi");
  std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(bounded(range));
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

std::vector<int> RandomStream::permutation(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(bounded(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

std::vector<int> RandomStream::sample_without_replacement(int n, int m) {
  if (m > n) fail(ErrorCode::invalid_argument, "sample: m > n");
  // partial Fisher-Yates on an index pool
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out(m);
  for (int i = 0; i < m; ++i) {
    int j = i + static_cast<int>(bounded(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

}  // namespace bigtax
