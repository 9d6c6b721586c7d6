// Scalar reference leaves. The SIMD variants must reproduce these operation
// orders exactly; see the lane layout described in kernels.hpp.

#include <cstddef>

#include "leaves.hpp"

namespace sensikit::kernels::detail {
namespace {

template <std::size_t K, class RowTerms>
void lane_reduce(std::size_t lo, std::size_t hi, double* out, const RowTerms& row_terms) {
  double lanes[K][4] = {};
  double terms[K];
  std::size_t i = lo;
  for (; i + 4 <= hi; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      row_terms(i + l, terms);
      for (std::size_t k = 0; k < K; ++k) lanes[k][l] += terms[k];
    }
  }
  double tail[K] = {};
  for (; i < hi; ++i) {
    row_terms(i, terms);
    for (std::size_t k = 0; k < K; ++k) tail[k] += terms[k];
  }
  for (std::size_t k = 0; k < K; ++k) out[k] = combine_lanes(lanes[k], tail[k]);
}

void sum_leaf(const double* values, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<1>(lo, hi, out, [values](std::size_t i, double* t) { t[0] = values[i]; });
}

void current_leaf(const Columns& c, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<3>(lo, hi, out, [&c](std::size_t i, double* t) {
    const double a = c.y_a[i];
    const double b = c.y_b[i];
    const double au = c.y_au[i];
    const double base = a - b;
    const double mixed = au - b;
    t[0] = a * mixed;
    t[1] = base * base;
    t[2] = mixed * mixed;
  });
}

void symmetric_leaf(const Columns& c, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<3>(lo, hi, out, [&c](std::size_t i, double* t) {
    const double a = c.y_a[i];
    const double b = c.y_b[i];
    const double au = c.y_au[i];
    const double bu = c.y_bu[i];
    const double ab = a - b;
    const double uv = au - bu;
    const double b_au = b - au;
    const double a_bu = a - bu;
    t[0] = ab * ab + uv * uv;
    t[1] = b_au * b_au + a_bu * a_bu;
    t[2] = (au - b) * a_bu;
  });
}

void plugin_leaf(EstimatorKind kind, const Columns& c, double e, double center, std::size_t lo, std::size_t hi,
                 double* out) {
  const auto finish = [center](double q, double* t) {
    const double dq = q - center;
    t[0] = dq;
    t[1] = dq * dq;
  };
  switch (kind) {
    case EstimatorKind::ss_first:
      lane_reduce<2>(lo, hi, out, [&](std::size_t i, double* t) {
        const double a = c.y_a[i];
        const double b = c.y_b[i];
        const double base = a - b;
        finish(2.0 * (a * (c.y_au[i] - b)) - e * (base * base), t);
      });
      break;
    case EstimatorKind::sj_total:
      lane_reduce<2>(lo, hi, out, [&](std::size_t i, double* t) {
        const double b = c.y_b[i];
        const double base = c.y_a[i] - b;
        const double mixed = c.y_au[i] - b;
        finish(mixed * mixed - e * (base * base), t);
      });
      break;
    case EstimatorKind::ia_first:
      lane_reduce<2>(lo, hi, out, [&](std::size_t i, double* t) {
        const double a = c.y_a[i];
        const double b = c.y_b[i];
        const double au = c.y_au[i];
        const double bu = c.y_bu[i];
        const double ab = a - b;
        const double uv = au - bu;
        const double den = ab * ab + uv * uv;
        finish(2.0 * ((a - bu) * (au - b)) - e * den, t);
      });
      break;
    case EstimatorKind::ia_total:
      lane_reduce<2>(lo, hi, out, [&](std::size_t i, double* t) {
        const double a = c.y_a[i];
        const double b = c.y_b[i];
        const double au = c.y_au[i];
        const double bu = c.y_bu[i];
        const double ab = a - b;
        const double uv = au - bu;
        const double den = ab * ab + uv * uv;
        const double a_bu = a - bu;
        const double b_au = b - au;
        finish((a_bu * a_bu + b_au * b_au) - e * den, t);
      });
      break;
  }
}

}  // namespace

const LeafTable& scalar_leaves() {
  static const LeafTable table{sum_leaf, current_leaf, symmetric_leaf, plugin_leaf};
  return table;
}

}  // namespace sensikit::kernels::detail
