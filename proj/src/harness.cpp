#include "sensikit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "sensikit/errors.hpp"
#include "sensikit/estimators.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/testfuncs.hpp"

namespace sensikit {
namespace {

std::vector<ReplicateRow> run_one_replicate(const ExperimentConfig& cfg, const ModelEvaluator& model,
                                            std::int64_t replicate) {
  const auto n = static_cast<std::size_t>(cfg.effective_n());
  const Design design = build_design(cfg.strategy, n, model.dim(), cfg.groups, cfg.sampler, cfg.master_seed,
                                     static_cast<std::uint64_t>(replicate));
  const std::int64_t calls = design.required_evaluations();
  const auto blocks = evaluate_design(model, design);

  std::vector<ReplicateRow> rows;
  rows.reserve(2 * blocks.size());
  for (std::size_t gi = 0; gi < blocks.size(); ++gi) {
    const auto base_row = [&](IndexKind kind) {
      ReplicateRow row;
      row.replicate = replicate;
      row.group_index = gi;
      row.group = blocks[gi].group();
      row.kind = kind;
      row.estimator = estimator_of(estimator_kind(cfg.strategy, kind));
      row.n = static_cast<std::int64_t>(n);
      row.model_calls = calls;
      return row;
    };
    try {
      for (const SobolEstimate& e : estimate_block(blocks[gi], cfg.strategy, calls, cfg.clamp)) {
        ReplicateRow row = base_row(e.kind);
        row.estimate = e.value;
        row.asym_variance = e.asym_variance;
        rows.push_back(std::move(row));
      }
    } catch (const DegenerateSampleError& err) {
      for (const IndexKind kind : {IndexKind::first, IndexKind::total}) {
        ReplicateRow row = base_row(kind);
        row.estimate = std::numeric_limits<double>::quiet_NaN();
        row.skipped = true;
        row.skip_reason = err.what();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

bool cancelled(const RunControl& control) {
  return control.cancel && control.cancel->load(std::memory_order_relaxed);
}

}  // namespace

ReplicateTable run_replicates(const ExperimentConfig& config, const RunControl& control) {
  config.validate();
  ReplicateTable table;
  table.config = config;
  ExperimentConfig& cfg = table.config;
  cfg.model = resolve_model_spec(cfg.model);
  const auto model = make_model(cfg.model);
  if (cfg.groups.empty()) cfg.groups = singleton_groups(model->dim());
  for (const auto& g : cfg.groups) g.validate(model->dim());

  const std::int64_t replicates = cfg.replicates;
  std::vector<std::optional<std::vector<ReplicateRow>>> results(static_cast<std::size_t>(replicates));

  std::size_t workers = std::max<std::size_t>(1, cfg.threads);
  if (!model->thread_safe()) workers = 1;
  workers = std::min<std::size_t>(workers, static_cast<std::size_t>(replicates));

  if (workers == 1) {
    for (std::int64_t r = 0; r < replicates && !cancelled(control); ++r) {
      results[static_cast<std::size_t>(r)] = run_one_replicate(cfg, *model, r);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          while (!failed.load() && !cancelled(control)) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= replicates) return;
            try {
              results[static_cast<std::size_t>(r)] = run_one_replicate(cfg, *model, r);
            } catch (...) {
              const std::lock_guard lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
              failed.store(true);
            }
          }
        });
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  for (auto& rows : results) {
    if (!rows) {
      table.interrupted = true;
      continue;
    }
    ++table.completed_replicates;
    for (auto& row : *rows) table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------

namespace {

using CellKey = std::tuple<std::size_t, IndexKind, Estimator>;

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const double m = *mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<CellStats> empirical_stats(const ReplicateTable& table) {
  struct Acc {
    CellStats stats;
    std::vector<double> estimates;
    std::vector<double> plugins;
  };
  std::map<CellKey, Acc> cells;
  for (const ReplicateRow& row : table.rows) {
    auto [it, inserted] = cells.try_emplace(CellKey{row.group_index, row.kind, row.estimator});
    Acc& acc = it->second;
    if (inserted) {
      acc.stats.group_index = row.group_index;
      acc.stats.group = row.group;
      acc.stats.kind = row.kind;
      acc.stats.estimator = row.estimator;
      acc.stats.n = row.n;
    }
    if (row.skipped) {
      ++acc.stats.skipped;
      continue;
    }
    acc.estimates.push_back(row.estimate);
    if (row.asym_variance) acc.plugins.push_back(*row.asym_variance);
  }

  std::vector<CellStats> out;
  out.reserve(cells.size());
  for (auto& [key, acc] : cells) {
    acc.stats.used = acc.estimates.size();
    acc.stats.mean = mean_of(acc.estimates);
    acc.stats.variance = variance_of(acc.estimates);
    acc.stats.mean_asym_variance = mean_of(acc.plugins);
    out.push_back(std::move(acc.stats));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_compatible(const ReplicateTable& left, const ReplicateTable& right) {
  const ExperimentConfig& a = left.config;
  const ExperimentConfig& b = right.config;
  std::string why;
  if (!(a.model == b.model)) why = "models differ";
  else if (a.groups != b.groups) why = "group lists differ";
  else if (a.sampler != b.sampler) why = "samplers differ";
  else if (a.replicates != b.replicates) why = "replicate counts differ";
  else if (a.n != b.n) why = "base sample sizes differ";
  else if (a.budget_matched != b.budget_matched) why = "budget matching differs";
  if (!why.empty()) throw IncompatibleTablesError("cannot compare replicate tables: " + why);
}

std::optional<double> ratio(const std::optional<double>& num, const std::optional<double>& den) {
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

std::vector<std::optional<double>> plugins_for(const ReplicateTable& table, std::size_t group_index, IndexKind kind) {
  std::vector<std::optional<double>> out(static_cast<std::size_t>(table.config.replicates));
  for (const ReplicateRow& row : table.rows) {
    if (row.group_index == group_index && row.kind == kind && !row.skipped) {
      out[static_cast<std::size_t>(row.replicate)] = row.asym_variance;
    }
  }
  return out;
}

}  // namespace

VarianceComparison variance_comparison(const ReplicateTable& left, const ReplicateTable& right) {
  require_compatible(left, right);
  const auto left_stats = empirical_stats(left);
  const auto right_stats = empirical_stats(right);

  const auto find = [](const std::vector<CellStats>& stats, std::size_t gi, IndexKind kind) -> const CellStats* {
    for (const auto& s : stats) {
      if (s.group_index == gi && s.kind == kind) return &s;
    }
    return nullptr;
  };

  VarianceComparison out;
  for (std::size_t gi = 0; gi < left.config.groups.size(); ++gi) {
    for (const IndexKind kind : {IndexKind::first, IndexKind::total}) {
      const CellStats* l = find(left_stats, gi, kind);
      const CellStats* r = find(right_stats, gi, kind);
      if (!l || !r) continue;
      VarianceCell cell;
      cell.group_index = gi;
      cell.group = left.config.groups[gi];
      cell.kind = kind;
      try {
        const auto idx = analytic_group_indices(left.config.model, cell.group);
        cell.analytic = kind == IndexKind::first ? idx.first : idx.total;
      } catch (const SingularParameterError&) {
      }
      cell.left = *l;
      cell.right = *r;
      cell.left_plugin = plugins_for(left, gi, kind);
      cell.right_plugin = plugins_for(right, gi, kind);
      cell.empirical_ratio = ratio(r->variance, l->variance);
      cell.plugin_ratio = ratio(r->mean_asym_variance, l->mean_asym_variance);
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ShiftResult shift_experiment(const ExperimentConfig& base, std::span<const double> offsets,
                             const RunControl& control) {
  if (offsets.empty()) throw ConfigError("shift experiment needs at least one offset");
  const ModelSpec model = resolve_model_spec(base.model);
  if (!supports_offset(model)) {
    throw ConfigError("model '" + model.name + "' has no constant-offset parameter f0");
  }

  ShiftResult result;
  result.offsets.assign(offsets.begin(), offsets.end());
  const auto zero = std::find(offsets.begin(), offsets.end(), 0.0);
  const std::size_t ref = zero != offsets.end() ? static_cast<std::size_t>(zero - offsets.begin()) : 0;
  result.reference_offset = offsets[ref];

  for (const double off : offsets) {
    ExperimentConfig cfg = base;
    cfg.model = with_offset(model, off);
    result.tables.push_back(run_replicates(cfg, control));
  }

  const ReplicateTable& reference = result.tables[ref];
  const auto ref_stats = empirical_stats(reference);
  for (std::size_t t = 0; t < result.tables.size(); ++t) {
    if (t == ref) continue;
    const ReplicateTable& table = result.tables[t];
    const std::size_t rows = std::min(table.rows.size(), reference.rows.size());
    for (std::size_t i = 0; i < rows; ++i) {
      const ReplicateRow& row = table.rows[i];
      const ReplicateRow& base_row = reference.rows[i];
      if (row.skipped || base_row.skipped) continue;
      if (row.replicate != base_row.replicate || row.group_index != base_row.group_index || row.kind != base_row.kind) {
        continue;
      }
      ShiftDelta d;
      d.offset = offsets[t];
      d.replicate = row.replicate;
      d.group_index = row.group_index;
      d.group = row.group;
      d.kind = row.kind;
      d.estimator = row.estimator;
      d.estimate = row.estimate;
      d.reference = base_row.estimate;
      d.delta = row.estimate - base_row.estimate;
      d.relative_delta = base_row.estimate != 0.0 ? std::abs(d.delta) / std::abs(base_row.estimate) : std::abs(d.delta);
      result.deltas.push_back(std::move(d));
    }
    const auto stats = empirical_stats(table);
    for (std::size_t c = 0; c < stats.size() && c < ref_stats.size(); ++c) {
      ShiftVariance v;
      v.offset = offsets[t];
      v.group_index = stats[c].group_index;
      v.group = stats[c].group;
      v.kind = stats[c].kind;
      v.estimator = stats[c].estimator;
      v.variance = stats[c].variance;
      v.reference_variance = ref_stats[c].variance;
      v.ratio = ratio(v.variance, v.reference_variance);
      result.variances.push_back(std::move(v));
    }
  }
  return result;
}

}  // namespace sensikit
