#pragma once

// Per-variant leaf kernels and the shared pairwise tree that drives them.

#include <array>
#include <cstddef>

#include "sensikit/kernels.hpp"

namespace sensikit::kernels::detail {

// Each leaf reduces rows [lo, hi), hi - lo <= kLeafRows, into `out`.
using SumLeaf = void (*)(const double* values, std::size_t lo, std::size_t hi, double* out);
using ColumnsLeaf = void (*)(const Columns& cols, std::size_t lo, std::size_t hi, double* out);
using PluginLeaf = void (*)(EstimatorKind kind, const Columns& cols, double estimate, double center,
                            std::size_t lo, std::size_t hi, double* out);

struct LeafTable {
  SumLeaf sum;             // 1 output
  ColumnsLeaf current;     // 3 outputs: cross, base_sq, mixed_sq
  ColumnsLeaf symmetric;   // 3 outputs: denominator, total_numerator, cross
  PluginLeaf plugin;       // 2 outputs: sum, sum_sq
};

const LeafTable& scalar_leaves();
#if defined(SENSIKIT_HAVE_AVX2)
const LeafTable& avx2_leaves();
#endif

template <std::size_t K, class Leaf>
std::array<double, K> pairwise_reduce(std::size_t lo, std::size_t hi, const Leaf& leaf) {
  std::array<double, K> out{};
  if (hi - lo <= kLeafRows) {
    leaf(lo, hi, out.data());
    return out;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const auto left = pairwise_reduce<K>(lo, mid, leaf);
  const auto right = pairwise_reduce<K>(mid, hi, leaf);
  for (std::size_t k = 0; k < K; ++k) out[k] = left[k] + right[k];
  return out;
}

inline double combine_lanes(const double lanes[4], double tail) {
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + tail;
}

}  // namespace sensikit::kernels::detail
