#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "concordance/ranking.hpp"

namespace concordance {

using BigInt = boost::multiprecision::cpp_int;

/// n! / (n_1! ... n_k!), the number of distinct label arrangements.
inline BigInt multinomial(const GroupSizes& sizes) {
  // Product of binomials C(n_1 + ... + n_i, n_i), each computed incrementally.
  BigInt result = 1;
  std::int64_t running = 0;
  for (auto size : sizes.values()) {
    for (std::int64_t j = 1; j <= size; ++j) {
      ++running;
      result *= running;
      result /= j;
    }
  }
  return result;
}

inline std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace concordance
