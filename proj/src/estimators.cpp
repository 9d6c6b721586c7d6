#include "sensikit/estimators.hpp"

#include <algorithm>
#include <string>

#include "sensikit/errors.hpp"
#include "sensikit/kernels.hpp"

namespace sensikit {
namespace {

void require_positive(double denominator, const PickFreezeBlock& block, const char* what) {
  if (!(denominator > 0.0)) {
    throw DegenerateSampleError(std::string(what) + " denominator is zero for group " + block.group().label() +
                                " (constant or duplicated outputs)");
  }
}

void require_b_u(const PickFreezeBlock& block) {
  if (!block.has_b_u()) {
    throw ShapeError("IA estimators need y^{B_u}; block for group " + block.group().label() +
                     " was built with the current strategy");
  }
}

}  // namespace

double s_first_saltelli(const PickFreezeBlock& block) {
  const auto s = kernels::current_sums(kernels::columns_of(block));
  require_positive(s.base_sq, block, "Saltelli first-order");
  return 2.0 * s.cross / s.base_sq;
}

double st_total_jansen(const PickFreezeBlock& block) {
  const auto s = kernels::current_sums(kernels::columns_of(block));
  require_positive(s.base_sq, block, "Sobol-Jansen total-order");
  return s.mixed_sq / s.base_sq;
}

double st_total_ia(const PickFreezeBlock& block) {
  require_b_u(block);
  const auto s = kernels::symmetric_sums(kernels::columns_of(block));
  require_positive(s.denominator, block, "IA total-order");
  return s.total_numerator / s.denominator;
}

double s_first_ia(const PickFreezeBlock& block) {
  require_b_u(block);
  const auto s = kernels::symmetric_sums(kernels::columns_of(block));
  require_positive(s.denominator, block, "IA first-order");
  return 2.0 * s.cross / s.denominator;
}

double variance_normalizer(const PickFreezeBlock& block, Strategy strategy) {
  const double n = static_cast<double>(block.size());
  if (strategy == Strategy::current) {
    return kernels::current_sums(kernels::columns_of(block)).base_sq / (2.0 * n);
  }
  require_b_u(block);
  return kernels::symmetric_sums(kernels::columns_of(block)).denominator / (4.0 * n);
}

double point_estimate(EstimatorKind kind, const PickFreezeBlock& block) {
  switch (kind) {
    case EstimatorKind::ss_first:
      return s_first_saltelli(block);
    case EstimatorKind::sj_total:
      return st_total_jansen(block);
    case EstimatorKind::ia_first:
      return s_first_ia(block);
    case EstimatorKind::ia_total:
      return st_total_ia(block);
  }
  return 0.0;
}

double asymptotic_variance(EstimatorKind kind, const PickFreezeBlock& block, double point_estimate, double v_hat) {
  if (strategy_of(kind) == Strategy::ia) require_b_u(block);
  const std::size_t rows = block.size();
  if (rows < 2) throw InsufficientSampleError("plug-in variance needs at least 2 rows");
  if (!(v_hat > 0.0)) {
    throw DegenerateSampleError("total variance estimate is not positive for group " + block.group().label());
  }
  const double n = static_cast<double>(rows);
  const auto cols = kernels::columns_of(block);

  // Two passes: the mean of q_k, then deviations about it. The first-order
  // correction term absorbs the rounding left in the mean.
  const double mean = kernels::plugin_deviation_sums(kind, cols, point_estimate, 0.0).sum / n;
  const auto dev = kernels::plugin_deviation_sums(kind, cols, point_estimate, mean);
  const double var_q = std::max(0.0, (dev.sum_sq - dev.sum * dev.sum / n) / (n - 1.0));

  const double scale = strategy_of(kind) == Strategy::current ? 4.0 : 16.0;
  return var_q / (scale * n * v_hat * v_hat);
}

std::vector<SobolEstimate> estimate_block(const PickFreezeBlock& block, Strategy strategy, std::int64_t model_calls,
                                          bool clamp) {
  std::vector<SobolEstimate> out;
  const double v_hat = variance_normalizer(block, strategy);
  for (const IndexKind kind : {IndexKind::first, IndexKind::total}) {
    const EstimatorKind ek = estimator_kind(strategy, kind);
    SobolEstimate e;
    e.group = block.group();
    e.kind = kind;
    e.estimator = estimator_of(ek);
    e.value = point_estimate(ek, block);
    e.asym_variance = asymptotic_variance(ek, block, e.value, v_hat);
    e.n = static_cast<std::int64_t>(block.size());
    e.model_calls = model_calls;
    if (clamp) e.value = std::clamp(e.value, 0.0, 1.0);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace sensikit
