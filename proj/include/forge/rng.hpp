#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace forge {

// Deterministic random stream. Wraps std::mt19937_64 (bit-exact across
// platforms by the standard) but never uses std::*_distribution, whose
// output is implementation-defined. All draws below are reproducible
// from the seed alone.
class Rng {
public:
  Rng() : engine_(0) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<int64_t>(next_u64());  // full range
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int64_t>(v % range);
  }

  // Uniform double in [0, 1).
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform_double() < p; }

  // Uniformly chosen index into a container of the given size.
  size_t index(size_t size) { return static_cast<size_t>(uniform_int(0, static_cast<int64_t>(size) - 1)); }

  template <typename T>
  const T& choice(const std::vector<T>& items) {
    return items[index(items.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // First k elements of a random permutation of [0, n).
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = 0; i < k && i + 1 < n; ++i) {
      size_t j = i + index(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k < n ? k : n);
    return idx;
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
  std::mt19937_64 engine_;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Labeled seed fan-out: every subsystem derives its stream from
// (master seed, label, index...), so sub-experiments are independently
// reproducible and parallel schedules cannot change results.
inline uint64_t derive_seed(uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a64(label));
}

inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x51f15eedULL));
}

inline uint64_t derive_seed(uint64_t seed, std::string_view label, uint64_t index) {
  return derive_seed(derive_seed(seed, label), index);
}

}  // namespace forge
