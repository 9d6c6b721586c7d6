// AVX2 leaves: four rows per 256-bit register, one register per accumulator,
// so register lane l is exactly the scalar reference's lane l.

#include <immintrin.h>

#include <cstddef>

#include "leaves.hpp"

namespace sensikit::kernels::detail {
namespace {

template <std::size_t K, class VecTerms, class RowTerms>
void lane_reduce(std::size_t lo, std::size_t hi, double* out, const VecTerms& vec_terms, const RowTerms& row_terms) {
  __m256d acc[K];
  for (std::size_t k = 0; k < K; ++k) acc[k] = _mm256_setzero_pd();
  __m256d vterms[K];
  std::size_t i = lo;
  for (; i + 4 <= hi; i += 4) {
    vec_terms(i, vterms);
    for (std::size_t k = 0; k < K; ++k) acc[k] = _mm256_add_pd(acc[k], vterms[k]);
  }
  double tail[K] = {};
  double terms[K];
  for (; i < hi; ++i) {
    row_terms(i, terms);
    for (std::size_t k = 0; k < K; ++k) tail[k] += terms[k];
  }
  alignas(32) double lanes[4];
  for (std::size_t k = 0; k < K; ++k) {
    _mm256_store_pd(lanes, acc[k]);
    out[k] = combine_lanes(lanes, tail[k]);
  }
}

inline __m256d load(std::span<const double> s, std::size_t i) { return _mm256_loadu_pd(s.data() + i); }
inline __m256d sq(__m256d x) { return _mm256_mul_pd(x, x); }

void sum_leaf(const double* values, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<1>(
      lo, hi, out, [values](std::size_t i, __m256d* t) { t[0] = _mm256_loadu_pd(values + i); },
      [values](std::size_t i, double* t) { t[0] = values[i]; });
}

void current_leaf(const Columns& c, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<3>(
      lo, hi, out,
      [&c](std::size_t i, __m256d* t) {
        const __m256d a = load(c.y_a, i);
        const __m256d b = load(c.y_b, i);
        const __m256d au = load(c.y_au, i);
        const __m256d base = _mm256_sub_pd(a, b);
        const __m256d mixed = _mm256_sub_pd(au, b);
        t[0] = _mm256_mul_pd(a, mixed);
        t[1] = sq(base);
        t[2] = sq(mixed);
      },
      [&c](std::size_t i, double* t) {
        const double a = c.y_a[i];
        const double b = c.y_b[i];
        const double base = a - b;
        const double mixed = c.y_au[i] - b;
        t[0] = a * mixed;
        t[1] = base * base;
        t[2] = mixed * mixed;
      });
}

void symmetric_leaf(const Columns& c, std::size_t lo, std::size_t hi, double* out) {
  lane_reduce<3>(
      lo, hi, out,
      [&c](std::size_t i, __m256d* t) {
        const __m256d a = load(c.y_a, i);
        const __m256d b = load(c.y_b, i);
        const __m256d au = load(c.y_au, i);
        const __m256d bu = load(c.y_bu, i);
        const __m256d a_bu = _mm256_sub_pd(a, bu);
        t[0] = _mm256_add_pd(sq(_mm256_sub_pd(a, b)), sq(_mm256_sub_pd(au, bu)));
        t[1] = _mm256_add_pd(sq(_mm256_sub_pd(b, au)), sq(a_bu));
        t[2] = _mm256_mul_pd(_mm256_sub_pd(au, b), a_bu);
      },
      [&c](std::size_t i, double* t) {
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
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d vcenter = _mm256_set1_pd(center);
  const __m256d two = _mm256_set1_pd(2.0);
  const auto vfinish = [vcenter](__m256d q, __m256d* t) {
    const __m256d dq = _mm256_sub_pd(q, vcenter);
    t[0] = dq;
    t[1] = sq(dq);
  };
  const auto finish = [center](double q, double* t) {
    const double dq = q - center;
    t[0] = dq;
    t[1] = dq * dq;
  };
  switch (kind) {
    case EstimatorKind::ss_first:
      lane_reduce<2>(
          lo, hi, out,
          [&](std::size_t i, __m256d* t) {
            const __m256d a = load(c.y_a, i);
            const __m256d b = load(c.y_b, i);
            const __m256d alpha = _mm256_mul_pd(two, _mm256_mul_pd(a, _mm256_sub_pd(load(c.y_au, i), b)));
            vfinish(_mm256_sub_pd(alpha, _mm256_mul_pd(ve, sq(_mm256_sub_pd(a, b)))), t);
          },
          [&](std::size_t i, double* t) {
            const double a = c.y_a[i];
            const double b = c.y_b[i];
            const double base = a - b;
            finish(2.0 * (a * (c.y_au[i] - b)) - e * (base * base), t);
          });
      break;
    case EstimatorKind::sj_total:
      lane_reduce<2>(
          lo, hi, out,
          [&](std::size_t i, __m256d* t) {
            const __m256d b = load(c.y_b, i);
            const __m256d base = _mm256_sub_pd(load(c.y_a, i), b);
            const __m256d mixed = _mm256_sub_pd(load(c.y_au, i), b);
            vfinish(_mm256_sub_pd(sq(mixed), _mm256_mul_pd(ve, sq(base))), t);
          },
          [&](std::size_t i, double* t) {
            const double b = c.y_b[i];
            const double base = c.y_a[i] - b;
            const double mixed = c.y_au[i] - b;
            finish(mixed * mixed - e * (base * base), t);
          });
      break;
    case EstimatorKind::ia_first:
      lane_reduce<2>(
          lo, hi, out,
          [&](std::size_t i, __m256d* t) {
            const __m256d a = load(c.y_a, i);
            const __m256d b = load(c.y_b, i);
            const __m256d au = load(c.y_au, i);
            const __m256d bu = load(c.y_bu, i);
            const __m256d den = _mm256_add_pd(sq(_mm256_sub_pd(a, b)), sq(_mm256_sub_pd(au, bu)));
            const __m256d alpha = _mm256_mul_pd(two, _mm256_mul_pd(_mm256_sub_pd(a, bu), _mm256_sub_pd(au, b)));
            vfinish(_mm256_sub_pd(alpha, _mm256_mul_pd(ve, den)), t);
          },
          [&](std::size_t i, double* t) {
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
      lane_reduce<2>(
          lo, hi, out,
          [&](std::size_t i, __m256d* t) {
            const __m256d a = load(c.y_a, i);
            const __m256d b = load(c.y_b, i);
            const __m256d au = load(c.y_au, i);
            const __m256d bu = load(c.y_bu, i);
            const __m256d den = _mm256_add_pd(sq(_mm256_sub_pd(a, b)), sq(_mm256_sub_pd(au, bu)));
            const __m256d alpha = _mm256_add_pd(sq(_mm256_sub_pd(a, bu)), sq(_mm256_sub_pd(b, au)));
            vfinish(_mm256_sub_pd(alpha, _mm256_mul_pd(ve, den)), t);
          },
          [&](std::size_t i, double* t) {
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

const LeafTable& avx2_leaves() {
  static const LeafTable table{sum_leaf, current_leaf, symmetric_leaf, plugin_leaf};
  return table;
}

}  // namespace sensikit::kernels::detail
