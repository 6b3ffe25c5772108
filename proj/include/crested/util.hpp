#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace crested {

// Mixed-radix indexing of product spaces X_1 x ... x X_n.
// Linear index is row-major with coordinate 1 most significant.
struct MixedRadix {
  std::vector<int> radices;

  std::size_t size() const {
    std::size_t s = 1;
    for (int m : radices) s *= static_cast<std::size_t>(m);
    return s;
  }

  std::vector<int> word(std::size_t index) const {
    std::vector<int> w(radices.size());
    for (std::size_t i = radices.size(); i-- > 0;) {
      w[i] = static_cast<int>(index % radices[i]);
      index /= radices[i];
    }
    return w;
  }

  std::size_t index(std::span<const int> w) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < radices.size(); ++i) {
      idx = idx * radices[i] + static_cast<std::size_t>(w[i]);
    }
    return idx;
  }
};

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: numerator always divisible
  }
  return r;
}

inline long long multinomial(int n, std::span<const int> parts) {
  long long r = 1;
  int used = 0;
  for (int p : parts) {
    if (p < 0) throw std::invalid_argument("multinomial: negative part");
    used += p;
    r *= binomial(used, p);
  }
  if (used != n) throw std::invalid_argument("multinomial: parts do not sum to n");
  return r;
}

inline long long ipow_ll(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double ipow(double base, unsigned exp) {
  double r = 1.0;
  while (exp > 0) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1u;
  }
  return r;
}

// Enumerates all compositions (ordered tuples of nonnegative ints summing to
// total) of length parts, in lexicographic order.
std::vector<std::vector<int>> compositions(int total, int parts);

}  // namespace crested
