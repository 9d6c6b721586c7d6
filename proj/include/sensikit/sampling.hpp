#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sensikit/core.hpp"
#include "sensikit/rng.hpp"

namespace sensikit {

/// Row-major n x d matrix of unit-hypercube coordinates.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// i.i.d. uniform entries on [0, 1).
SampleMatrix uniform_matrix(std::size_t n, std::size_t d, RandomStream& stream);

/// Random Latin hypercube: each column is an independent permutation of the
/// strata [i/n, (i+1)/n) with a uniform jitter inside each stratum.
SampleMatrix lhs_matrix(std::size_t n, std::size_t d, RandomStream& stream);

SampleMatrix draw_matrix(SamplerKind sampler, std::size_t n, std::size_t d, RandomStream& stream);

/// Columns in `group` come from `a`, all others from `b`.
SampleMatrix mix_columns(const SampleMatrix& a, const SampleMatrix& b, const FactorGroup& group);

namespace matrix_tag {
inline constexpr std::uint64_t a = 1;
inline constexpr std::uint64_t b = 2;
}  // namespace matrix_tag

struct DesignProvenance {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
  StreamId stream_a;
  StreamId stream_b;
};

/// Base matrices A and B plus the group list. Mixed matrices are formed on
/// demand during evaluation so memory stays O(n d).
struct Design {
  Strategy strategy = Strategy::ia;
  SamplerKind sampler = SamplerKind::lhs;
  SampleMatrix a;
  SampleMatrix b;
  std::vector<FactorGroup> groups;
  DesignProvenance provenance;

  std::size_t n() const noexcept { return a.rows(); }
  std::size_t d() const noexcept { return a.cols(); }

  /// Model evaluations evaluate_design() will perform; equals call_budget().
  std::int64_t required_evaluations() const;
};

/// Stream purpose for a strategy; A and B of one replicate use matrix tags 1 and 2.
std::uint64_t design_purpose(Strategy strategy);

Design build_design(Strategy strategy, std::size_t n, std::size_t d, std::vector<FactorGroup> groups,
                    SamplerKind sampler, std::uint64_t master_seed, std::uint64_t replicate = 0);

/// Evaluates A, B once and every mixed matrix the strategy needs; returns one
/// block per design group, in group order.
std::vector<PickFreezeBlock> evaluate_design(const ModelEvaluator& model, const Design& design);

/// Audit dump with header `matrix,row,col,value` covering A, B and every mixed matrix.
void write_design_csv(const Design& design, std::ostream& out);

}  // namespace sensikit
