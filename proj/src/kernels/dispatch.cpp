#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "leaves.hpp"
#include "sensikit/errors.hpp"

namespace sensikit::kernels {

std::string_view to_string(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SENSIKIT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("SENSIKIT_SIMD"); env && std::string(env) == "scalar") return Isa::scalar;
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

namespace {

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

const detail::LeafTable& leaves(Isa isa) {
#if defined(SENSIKIT_HAVE_AVX2)
  if (isa == Isa::avx2) {
    if (!isa_supported(Isa::avx2)) throw std::invalid_argument("AVX2 kernels are not supported on this CPU");
    return detail::avx2_leaves();
  }
#else
  if (isa == Isa::avx2) throw std::invalid_argument("AVX2 kernels were not compiled in");
#endif
  return detail::scalar_leaves();
}

void require_same_length(const Columns& cols, bool need_bu) {
  const std::size_t n = cols.size();
  if (cols.y_b.size() != n || cols.y_au.size() != n || (need_bu && cols.y_bu.size() != n)) {
    throw ShapeError("kernel inputs have different lengths");
  }
}

}  // namespace

Isa active_isa() {
  return active().load(std::memory_order_relaxed);
}

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("SIMD variant " + std::string(to_string(isa)) + " is unavailable");
  active().store(isa, std::memory_order_relaxed);
}

Columns columns_of(const PickFreezeBlock& block) {
  Columns c{block.y_a(), block.y_b(), block.y_au(), {}};
  if (block.has_b_u()) c.y_bu = block.y_bu();
  return c;
}

double pairwise_sum(Isa isa, std::span<const double> values) {
  const auto leaf = leaves(isa).sum;
  const double* data = values.data();
  return detail::pairwise_reduce<1>(0, values.size(),
                                    [&](std::size_t lo, std::size_t hi, double* out) { leaf(data, lo, hi, out); })[0];
}

CurrentSums current_sums(Isa isa, const Columns& cols) {
  require_same_length(cols, false);
  const auto leaf = leaves(isa).current;
  const auto r = detail::pairwise_reduce<3>(
      0, cols.size(), [&](std::size_t lo, std::size_t hi, double* out) { leaf(cols, lo, hi, out); });
  return {r[0], r[1], r[2]};
}

SymmetricSums symmetric_sums(Isa isa, const Columns& cols) {
  require_same_length(cols, true);
  const auto leaf = leaves(isa).symmetric;
  const auto r = detail::pairwise_reduce<3>(
      0, cols.size(), [&](std::size_t lo, std::size_t hi, double* out) { leaf(cols, lo, hi, out); });
  return {r[0], r[1], r[2]};
}

DeviationSums plugin_deviation_sums(Isa isa, EstimatorKind kind, const Columns& cols, double estimate,
                                    double center) {
  require_same_length(cols, strategy_of(kind) == Strategy::ia);
  const auto leaf = leaves(isa).plugin;
  const auto r = detail::pairwise_reduce<2>(0, cols.size(), [&](std::size_t lo, std::size_t hi, double* out) {
    leaf(kind, cols, estimate, center, lo, hi, out);
  });
  return {r[0], r[1]};
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(active_isa(), values);
}

CurrentSums current_sums(const Columns& cols) {
  return current_sums(active_isa(), cols);
}

SymmetricSums symmetric_sums(const Columns& cols) {
  return symmetric_sums(active_isa(), cols);
}

DeviationSums plugin_deviation_sums(EstimatorKind kind, const Columns& cols, double estimate, double center) {
  return plugin_deviation_sums(active_isa(), kind, cols, estimate, center);
}

}  // namespace sensikit::kernels
