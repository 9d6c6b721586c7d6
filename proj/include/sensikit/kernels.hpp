#pragma once

// Reduction kernels behind the estimators.
//
// Every sum over rows k is a pairwise (cascade) sum: the row range is split in
// halves down to leaves of at most kLeafRows rows. Inside a leaf, row i feeds
// lane (i - lo) % 4 of four running accumulators, lanes combine as
// ((l0 + l1) + (l2 + l3)), and rows past the last full group of four are
// added afterwards into a separate tail sum. The scalar reference and the
// SIMD variants follow this order exactly, so they agree bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

#include "sensikit/core.hpp"

namespace sensikit::kernels {

inline constexpr std::size_t kLeafRows = 128;

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True if the variant was compiled in and the running CPU supports it.
bool isa_supported(Isa isa);

/// Best supported variant, unless SENSIKIT_SIMD=scalar is set in the environment.
Isa detect_isa();

/// Variant used by the dispatching overloads below.
Isa active_isa();

/// Throws std::invalid_argument if the variant is not supported here.
void set_active_isa(Isa isa);

/// Row-aligned output sequences; `y_bu` is empty for current-strategy blocks.
struct Columns {
  std::span<const double> y_a;
  std::span<const double> y_b;
  std::span<const double> y_au;
  std::span<const double> y_bu;

  std::size_t size() const noexcept { return y_a.size(); }
};

Columns columns_of(const PickFreezeBlock& block);

/// Current-strategy sums.
struct CurrentSums {
  double cross = 0.0;     // sum yA (yAu - yB)
  double base_sq = 0.0;   // sum (yA - yB)^2
  double mixed_sq = 0.0;  // sum (yAu - yB)^2
};

/// IA-strategy sums.
struct SymmetricSums {
  double denominator = 0.0;      // sum (yA - yB)^2 + (yAu - yBu)^2
  double total_numerator = 0.0;  // sum (yB - yAu)^2 + (yA - yBu)^2
  double cross = 0.0;            // sum (yAu - yB)(yA - yBu)
};

/// Sums of q_k - center and (q_k - center)^2 for the per-row plug-in quantity q_k.
struct DeviationSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

double pairwise_sum(std::span<const double> values);
CurrentSums current_sums(const Columns& cols);
SymmetricSums symmetric_sums(const Columns& cols);

/// q_k per estimator kind, with estimate e:
///   SS_first  2 yA (yAu - yB) - e (yA - yB)^2
///   SJ_total  (yAu - yB)^2 - e (yA - yB)^2
///   IA_first  2 (yA - yBu)(yAu - yB) - e [(yA - yB)^2 + (yAu - yBu)^2]
///   IA_total  (yA - yBu)^2 + (yB - yAu)^2 - e [(yA - yB)^2 + (yAu - yBu)^2]
DeviationSums plugin_deviation_sums(EstimatorKind kind, const Columns& cols, double estimate, double center);

// Explicit-variant entry points, used by the equivalence tests and benchmarks.
double pairwise_sum(Isa isa, std::span<const double> values);
CurrentSums current_sums(Isa isa, const Columns& cols);
SymmetricSums symmetric_sums(Isa isa, const Columns& cols);
DeviationSums plugin_deviation_sums(Isa isa, EstimatorKind kind, const Columns& cols, double estimate,
                                    double center);

}  // namespace sensikit::kernels
