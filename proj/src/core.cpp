#include "sensikit/core.hpp"

#include <algorithm>
#include <charconv>

#include "sensikit/errors.hpp"

namespace sensikit {

std::string_view to_string(Strategy s) {
  return s == Strategy::current ? "current" : "ia";
}

std::string_view to_string(IndexKind k) {
  return k == IndexKind::first ? "first" : "total";
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::ss:
      return "SS";
    case Estimator::sj:
      return "SJ";
    case Estimator::ia:
      return "IA";
  }
  return "?";
}

std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::ss_first:
      return "SS_first";
    case EstimatorKind::sj_total:
      return "SJ_total";
    case EstimatorKind::ia_first:
      return "IA_first";
    case EstimatorKind::ia_total:
      return "IA_total";
  }
  return "?";
}

std::string_view to_string(SamplerKind s) {
  return s == SamplerKind::mc ? "mc" : "lhs";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "current") return Strategy::current;
  if (text == "ia" || text == "IA") return Strategy::ia;
  throw ConfigError("unknown strategy '" + std::string(text) + "' (expected current or ia)");
}

SamplerKind parse_sampler(std::string_view text) {
  if (text == "mc") return SamplerKind::mc;
  if (text == "lhs") return SamplerKind::lhs;
  throw ConfigError("unknown sampler '" + std::string(text) + "' (expected mc or lhs)");
}

Estimator estimator_of(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::ss_first:
      return Estimator::ss;
    case EstimatorKind::sj_total:
      return Estimator::sj;
    default:
      return Estimator::ia;
  }
}

IndexKind index_kind_of(EstimatorKind k) {
  return (k == EstimatorKind::ss_first || k == EstimatorKind::ia_first) ? IndexKind::first : IndexKind::total;
}

Strategy strategy_of(EstimatorKind k) {
  return (k == EstimatorKind::ss_first || k == EstimatorKind::sj_total) ? Strategy::current : Strategy::ia;
}

EstimatorKind estimator_kind(Strategy s, IndexKind k) {
  if (s == Strategy::current) return k == IndexKind::first ? EstimatorKind::ss_first : EstimatorKind::sj_total;
  return k == IndexKind::first ? EstimatorKind::ia_first : EstimatorKind::ia_total;
}

// ---------------------------------------------------------------------------

FactorSpace::FactorSpace(std::vector<FactorRange> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw ConfigError("factor space needs at least one factor");
  for (std::size_t j = 0; j < ranges_.size(); ++j) {
    if (!(ranges_[j].lower < ranges_[j].upper)) {
      throw ConfigError("factor " + std::to_string(j + 1) + " has an empty range");
    }
  }
}

FactorSpace FactorSpace::unit(std::size_t d) {
  return uniform(d, 0.0, 1.0);
}

FactorSpace FactorSpace::uniform(std::size_t d, double lower, double upper) {
  return FactorSpace(std::vector<FactorRange>(d, FactorRange{lower, upper}));
}

FactorGroup::FactorGroup(std::initializer_list<std::size_t> members)
    : FactorGroup(std::vector<std::size_t>(members)) {}

FactorGroup::FactorGroup(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw InvalidGroupError("factor group lists an index twice");
  }
}

FactorGroup FactorGroup::full(std::size_t d) {
  std::vector<std::size_t> all(d);
  for (std::size_t j = 0; j < d; ++j) all[j] = j;
  return FactorGroup(std::move(all));
}

void FactorGroup::validate(std::size_t d) const {
  if (!members_.empty() && members_.back() >= d) {
    throw InvalidGroupError("group " + label() + " refers to factor " + std::to_string(members_.back() + 1) +
                            " but the model has " + std::to_string(d) + " factors");
  }
}

bool FactorGroup::contains(std::size_t j) const {
  return std::binary_search(members_.begin(), members_.end(), j);
}

std::string FactorGroup::label() const {
  if (members_.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(members_[i] + 1);
  }
  return out;
}

FactorGroup FactorGroup::parse_label(std::string_view text) {
  if (text == "-") return {};
  std::vector<std::size_t> members;
  while (!text.empty()) {
    const auto cut = text.find_first_of(";,");
    const std::string_view token = text.substr(0, cut);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
      throw InvalidGroupError("malformed factor group '" + std::string(text) + "' (1-based indices expected)");
    }
    members.push_back(value - 1);
    if (cut == std::string_view::npos) break;
    text.remove_prefix(cut + 1);
    if (text.empty()) throw InvalidGroupError("factor group has a trailing separator");
  }
  if (members.empty()) throw InvalidGroupError("empty factor group label (use '-' for the empty group)");
  return FactorGroup(std::move(members));
}

FactorGroup complement(const FactorGroup& group, std::size_t d) {
  group.validate(d);
  std::vector<std::size_t> rest;
  rest.reserve(d - group.size());
  for (std::size_t j = 0; j < d; ++j) {
    if (!group.contains(j)) rest.push_back(j);
  }
  return FactorGroup(std::move(rest));
}

std::vector<FactorGroup> singleton_groups(std::size_t d) {
  std::vector<FactorGroup> groups;
  groups.reserve(d);
  for (std::size_t j = 0; j < d; ++j) groups.push_back(FactorGroup::singleton(j));
  return groups;
}

std::int64_t call_budget(Strategy strategy, std::int64_t n, std::int64_t /*d*/, std::int64_t n_groups) {
  // A and B are evaluated once and shared; each group adds A_u (and B_u for IA).
  const std::int64_t per_group = strategy == Strategy::current ? 1 : 2;
  return n * (2 + per_group * n_groups);
}

// ---------------------------------------------------------------------------

PickFreezeBlock::PickFreezeBlock(FactorGroup group, std::vector<double> y_a, std::vector<double> y_b,
                                 std::vector<double> y_au, std::optional<std::vector<double>> y_bu)
    : group_(std::move(group)),
      y_a_(std::move(y_a)),
      y_b_(std::move(y_b)),
      y_au_(std::move(y_au)),
      y_bu_(std::move(y_bu)) {
  const std::size_t n = y_a_.size();
  if (y_b_.size() != n || y_au_.size() != n || (y_bu_ && y_bu_->size() != n)) {
    throw ShapeError("pick-freeze sequences for group " + group_.label() + " have different lengths");
  }
  if (n < 2) {
    throw InsufficientSampleError("pick-freeze block for group " + group_.label() + " needs at least 2 rows");
  }
}

std::span<const double> PickFreezeBlock::y_bu() const {
  if (!y_bu_) throw ShapeError("block for group " + group_.label() + " has no y^{B_u} sequence");
  return *y_bu_;
}

PickFreezeBlock PickFreezeBlock::swap_mixed(std::size_t d) const {
  if (!y_bu_) throw ShapeError("block for group " + group_.label() + " has no y^{B_u} sequence");
  return PickFreezeBlock(complement(group_, d), y_a_, y_b_, *y_bu_, y_au_);
}

// ---------------------------------------------------------------------------

std::int64_t ExperimentConfig::effective_n() const {
  return (budget_matched && strategy == Strategy::current) ? 2 * n : n;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("sample size n must be at least 2");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (model.name.empty()) throw ConfigError("no model selected");
}

}  // namespace sensikit
