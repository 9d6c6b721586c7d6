#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensikit/core.hpp"

namespace sensikit {

/// One estimate from one replicate. Skipped rows carry a NaN estimate and the
/// reason the block was degenerate.
struct ReplicateRow {
  std::int64_t replicate = 0;
  std::size_t group_index = 0;
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  Estimator estimator = Estimator::ia;
  double estimate = 0.0;
  std::optional<double> asym_variance;
  std::int64_t n = 0;
  std::int64_t model_calls = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct ReplicateTable {
  ExperimentConfig config;           // groups resolved to an explicit list
  std::vector<ReplicateRow> rows;    // ordered by (replicate, group, kind)
  std::int64_t completed_replicates = 0;
  bool interrupted = false;
};

struct RunControl {
  /// Polled between replicates; when it becomes true the run stops and the
  /// table holds the replicates finished so far.
  const std::atomic<bool>* cancel = nullptr;
};

/// Runs config.replicates independent replicates; replicate r draws its
/// design from the streams keyed by (master seed, strategy, r). Output is
/// identical for any thread count.
ReplicateTable run_replicates(const ExperimentConfig& config, const RunControl& control = {});

/// Mean and variance over the non-skipped replicates of one (group, kind, estimator) cell.
struct CellStats {
  std::size_t group_index = 0;
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  Estimator estimator = Estimator::ia;
  std::int64_t n = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  std::optional<double> mean;                // absent when every replicate was skipped
  std::optional<double> variance;            // unbiased; absent with fewer than 2 replicates
  std::optional<double> mean_asym_variance;  // mean plug-in variance
};

std::vector<CellStats> empirical_stats(const ReplicateTable& table);

/// Side-by-side variances of one (group, kind) cell under two tables.
struct VarianceCell {
  std::size_t group_index = 0;
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  std::optional<double> analytic;  // closed-form index when the model has one
  CellStats left;
  CellStats right;
  std::vector<std::optional<double>> left_plugin;   // per replicate
  std::vector<std::optional<double>> right_plugin;  // per replicate
  std::optional<double> empirical_ratio;            // right / left empirical variance
  std::optional<double> plugin_ratio;               // right / left mean plug-in variance
};

struct VarianceComparison {
  std::vector<VarianceCell> cells;  // ordered by (group, kind)
};

/// Pairs two tables cell by cell. Typical use: left = current (budget
/// matched), right = IA. Throws IncompatibleTablesError when the tables
/// differ in model, groups, sampler, replicate count, base n or budget matching.
VarianceComparison variance_comparison(const ReplicateTable& left, const ReplicateTable& right);

struct ShiftDelta {
  double offset = 0.0;
  std::int64_t replicate = 0;
  std::size_t group_index = 0;
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  Estimator estimator = Estimator::ia;
  double estimate = 0.0;
  double reference = 0.0;
  double delta = 0.0;           // estimate - reference
  double relative_delta = 0.0;  // |delta| / max(|reference|, tiny)
};

struct ShiftVariance {
  double offset = 0.0;
  std::size_t group_index = 0;
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  Estimator estimator = Estimator::ia;
  std::optional<double> variance;
  std::optional<double> reference_variance;
  std::optional<double> ratio;  // variance / reference_variance
};

struct ShiftResult {
  double reference_offset = 0.0;
  std::vector<double> offsets;
  std::vector<ReplicateTable> tables;  // one per offset, same order
  std::vector<ShiftDelta> deltas;      // non-reference offsets only
  std::vector<ShiftVariance> variances;
};

/// Re-runs `base` at each f0 offset with identical seeds. The reference is
/// offset 0 when listed, else the first offset.
ShiftResult shift_experiment(const ExperimentConfig& base, std::span<const double> offsets,
                             const RunControl& control = {});

}  // namespace sensikit
