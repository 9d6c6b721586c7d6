#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sensikit {

// ---------------------------------------------------------------------------
// Enumerations shared across modules
// ---------------------------------------------------------------------------

/// Sampling strategy. `current` evaluates y^A, y^B and y^{A_u} per group;
/// `ia` additionally evaluates y^{B_u}.
enum class Strategy { current, ia };

enum class IndexKind { first, total };

/// The estimator that produced a value: Saltelli first-order, Sobol-Jansen
/// total-order, or the symmetric IA pair.
enum class Estimator { ss, sj, ia };

/// One of the four index estimators, used to select the plug-in variance formula.
enum class EstimatorKind { ss_first, sj_total, ia_first, ia_total };

enum class SamplerKind { mc, lhs };

std::string_view to_string(Strategy s);
std::string_view to_string(IndexKind k);
std::string_view to_string(Estimator e);
std::string_view to_string(EstimatorKind k);
std::string_view to_string(SamplerKind s);

Strategy parse_strategy(std::string_view text);
SamplerKind parse_sampler(std::string_view text);

Estimator estimator_of(EstimatorKind k);
IndexKind index_kind_of(EstimatorKind k);
Strategy strategy_of(EstimatorKind k);
EstimatorKind estimator_kind(Strategy s, IndexKind k);

// ---------------------------------------------------------------------------
// Factor space and groups
// ---------------------------------------------------------------------------

struct FactorRange {
  double lower = 0.0;
  double upper = 1.0;
};

/// Dimension and per-factor ranges of a model's inputs. Samplers work in the
/// unit cube; `to_model` maps a unit coordinate into the factor's range.
class FactorSpace {
 public:
  explicit FactorSpace(std::vector<FactorRange> ranges);

  static FactorSpace unit(std::size_t d);
  static FactorSpace uniform(std::size_t d, double lower, double upper);

  std::size_t dim() const noexcept { return ranges_.size(); }
  const FactorRange& range(std::size_t j) const { return ranges_.at(j); }

  double to_model(std::size_t j, double unit) const noexcept {
    const FactorRange& r = ranges_[j];
    return r.lower + unit * (r.upper - r.lower);
  }

 private:
  std::vector<FactorRange> ranges_;
};

/// Sorted set of 0-based factor indices. Empty and full groups are legal.
class FactorGroup {
 public:
  FactorGroup() = default;
  FactorGroup(std::initializer_list<std::size_t> members);
  explicit FactorGroup(std::vector<std::size_t> members);

  static FactorGroup singleton(std::size_t j) { return FactorGroup{j}; }
  static FactorGroup full(std::size_t d);

  /// Throws InvalidGroupError if any member is >= d.
  void validate(std::size_t d) const;

  bool contains(std::size_t j) const;
  std::span<const std::size_t> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  /// 1-based report label: "2", "1;3", or "-" for the empty group.
  std::string label() const;

  /// Inverse of label(); throws InvalidGroupError on malformed text.
  static FactorGroup parse_label(std::string_view text);

  friend auto operator<=>(const FactorGroup&, const FactorGroup&) = default;
  friend bool operator==(const FactorGroup&, const FactorGroup&) = default;

 private:
  std::vector<std::size_t> members_;
};

FactorGroup complement(const FactorGroup& group, std::size_t d);

/// One singleton group per factor, the default group list.
std::vector<FactorGroup> singleton_groups(std::size_t d);

/// Total model evaluations for a design over `n_groups` groups. With
/// n_groups == d this is n(d+2) for `current` and 2n(d+1) for `ia`.
std::int64_t call_budget(Strategy strategy, std::int64_t n, std::int64_t d, std::int64_t n_groups);

// ---------------------------------------------------------------------------
// Models and estimator inputs
// ---------------------------------------------------------------------------

/// Deterministic scalar model y = f(x). Implementations must return
/// bit-identical outputs for identical inputs.
class ModelEvaluator {
 public:
  virtual ~ModelEvaluator() = default;

  virtual const FactorSpace& space() const = 0;

  /// `x` is in model units (already mapped through the factor ranges).
  virtual double evaluate(std::span<const double> x) const = 0;

  /// Whether evaluate() may be called from several threads at once.
  virtual bool thread_safe() const { return true; }

  std::size_t dim() const { return space().dim(); }
};

/// The aligned output sequences y^A, y^B, y^{A_u} and (IA only) y^{B_u} for one group.
class PickFreezeBlock {
 public:
  PickFreezeBlock(FactorGroup group, std::vector<double> y_a, std::vector<double> y_b, std::vector<double> y_au,
                  std::optional<std::vector<double>> y_bu = std::nullopt);

  const FactorGroup& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return y_a_.size(); }
  bool has_b_u() const noexcept { return y_bu_.has_value(); }

  std::span<const double> y_a() const noexcept { return y_a_; }
  std::span<const double> y_b() const noexcept { return y_b_; }
  std::span<const double> y_au() const noexcept { return y_au_; }
  /// Throws ShapeError when the block carries no y^{B_u}.
  std::span<const double> y_bu() const;

  /// Exchanges y^{A_u} and y^{B_u}, which yields the block of the
  /// complementary group (in dimension d) built on the same draws.
  PickFreezeBlock swap_mixed(std::size_t d) const;

 private:
  FactorGroup group_;
  std::vector<double> y_a_;
  std::vector<double> y_b_;
  std::vector<double> y_au_;
  std::optional<std::vector<double>> y_bu_;
};

struct SobolEstimate {
  FactorGroup group;
  IndexKind kind = IndexKind::first;
  Estimator estimator = Estimator::ia;
  double value = 0.0;
  std::optional<double> asym_variance;
  std::int64_t n = 0;
  std::int64_t model_calls = 0;
};

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

/// Registered model name plus named parameter lists (scalars are length-1 lists).
struct ModelSpec {
  std::string name;
  std::map<std::string, std::vector<double>> params;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ExperimentConfig {
  ModelSpec model;
  Strategy strategy = Strategy::ia;
  SamplerKind sampler = SamplerKind::lhs;
  std::int64_t n = 64;
  std::vector<FactorGroup> groups;  // empty: one singleton per factor
  std::int64_t replicates = 1;
  std::uint64_t master_seed = 1;
  bool budget_matched = false;
  bool clamp = false;
  std::size_t threads = 1;

  /// Sample size actually used: 2n for `current` under budget matching.
  std::int64_t effective_n() const;

  /// Throws ConfigError when n < 2 or replicates < 1.
  void validate() const;
};

}  // namespace sensikit
