#pragma once

#include <cstdint>
#include <vector>

#include "sensikit/core.hpp"

namespace sensikit {

/// Saltelli first-order estimator:
///   2 sum yA (yAu - yB) / sum (yA - yB)^2.
/// Not shift-invariant; the value may fall outside [0, 1].
double s_first_saltelli(const PickFreezeBlock& block);

/// Sobol-Jansen total-order estimator:
///   sum (yAu - yB)^2 / sum (yA - yB)^2.
double st_total_jansen(const PickFreezeBlock& block);

/// Symmetric total-order estimator:
///   sum [(yB - yAu)^2 + (yA - yBu)^2] / sum [(yA - yB)^2 + (yAu - yBu)^2].
double st_total_ia(const PickFreezeBlock& block);

/// Symmetric first-order estimator:
///   2 sum (yAu - yB)(yA - yBu) / sum [(yA - yB)^2 + (yAu - yBu)^2].
/// Never exceeds st_total_ia() on the same block, up to rounding.
double s_first_ia(const PickFreezeBlock& block);

/// Consistent estimate of V(y): sum (yA - yB)^2 / 2N for `current`,
/// sum [(yA - yB)^2 + (yAu - yBu)^2] / 4N for `ia`. May return 0.
double variance_normalizer(const PickFreezeBlock& block, Strategy strategy);

/// Plug-in asymptotic variance of an estimate. The variance of the per-row
/// quantity q_k (see kernels::plugin_deviation_sums) uses the N-1 divisor and
/// is scaled by 1/(4N v^2) for the current estimators, 1/(16N v^2) for IA.
double asymptotic_variance(EstimatorKind kind, const PickFreezeBlock& block, double point_estimate, double v_hat);

double point_estimate(EstimatorKind kind, const PickFreezeBlock& block);

/// Both indices of a block for the given strategy, in (first, total) order.
/// Plug-in order is point estimate, then v_hat, then the asymptotic variance;
/// `clamp` only affects the reported value.
std::vector<SobolEstimate> estimate_block(const PickFreezeBlock& block, Strategy strategy, std::int64_t model_calls,
                                          bool clamp = false);

}  // namespace sensikit
