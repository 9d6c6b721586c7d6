#include "sensikit/sampling.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <string>

#include "sensikit/csv.hpp"
#include "sensikit/errors.hpp"

namespace sensikit {

SampleMatrix uniform_matrix(std::size_t n, std::size_t d, RandomStream& stream) {
  SampleMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = stream.uniform();
  }
  return m;
}

namespace {

// Places (stratum + jitter) / n so that floor(n * value) == stratum holds in
// floating point and the value stays below 1.
double stratum_point(std::size_t stratum, double jitter, std::size_t n) {
  const double nd = static_cast<double>(n);
  double v = (static_cast<double>(stratum) + jitter) / nd;
  while (v >= 1.0 || std::floor(v * nd) > static_cast<double>(stratum)) v = std::nextafter(v, 0.0);
  while (std::floor(v * nd) < static_cast<double>(stratum)) v = std::nextafter(v, 1.0);
  return v;
}

}  // namespace

SampleMatrix lhs_matrix(std::size_t n, std::size_t d, RandomStream& stream) {
  SampleMatrix m(n, d);
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t k = stream.index_below(i);
      std::swap(perm[i - 1], perm[k]);
    }
    for (std::size_t i = 0; i < n; ++i) m(i, j) = stratum_point(perm[i], stream.uniform(), n);
  }
  return m;
}

SampleMatrix draw_matrix(SamplerKind sampler, std::size_t n, std::size_t d, RandomStream& stream) {
  return sampler == SamplerKind::lhs ? lhs_matrix(n, d, stream) : uniform_matrix(n, d, stream);
}

SampleMatrix mix_columns(const SampleMatrix& a, const SampleMatrix& b, const FactorGroup& group) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("mix_columns: matrices have different shapes");
  }
  group.validate(a.cols());
  SampleMatrix m = b;
  for (const std::size_t j : group.members()) {
    for (std::size_t i = 0; i < a.rows(); ++i) m(i, j) = a(i, j);
  }
  return m;
}

std::int64_t Design::required_evaluations() const {
  return call_budget(strategy, static_cast<std::int64_t>(n()), static_cast<std::int64_t>(d()),
                     static_cast<std::int64_t>(groups.size()));
}

std::uint64_t design_purpose(Strategy strategy) {
  return strategy == Strategy::current ? tag("design/current") : tag("design/ia");
}

Design build_design(Strategy strategy, std::size_t n, std::size_t d, std::vector<FactorGroup> groups,
                    SamplerKind sampler, std::uint64_t master_seed, std::uint64_t replicate) {
  if (n < 2) throw InsufficientSampleError("design needs n >= 2");
  if (d < 1) throw ShapeError("design needs d >= 1");
  for (const auto& g : groups) g.validate(d);

  Design design;
  design.strategy = strategy;
  design.sampler = sampler;
  design.groups = std::move(groups);
  design.provenance.master_seed = master_seed;
  design.provenance.replicate = replicate;
  design.provenance.stream_a = StreamId{master_seed, design_purpose(strategy), replicate, matrix_tag::a};
  design.provenance.stream_b = StreamId{master_seed, design_purpose(strategy), replicate, matrix_tag::b};

  RandomStream stream_a(design.provenance.stream_a);
  RandomStream stream_b(design.provenance.stream_b);
  design.a = draw_matrix(sampler, n, d, stream_a);
  design.b = draw_matrix(sampler, n, d, stream_b);
  return design;
}

namespace {

std::vector<double> evaluate_matrix(const ModelEvaluator& model, const SampleMatrix& m, const std::string& name) {
  const FactorSpace& space = model.space();
  std::vector<double> x(m.cols());
  std::vector<double> y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto unit = m.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = space.to_model(j, unit[j]);
    double value = 0.0;
    try {
      value = model.evaluate(x);
    } catch (const std::exception& e) {
      throw ModelEvaluationError(name, i, e.what());
    }
    if (!std::isfinite(value)) throw ModelEvaluationError(name, i, "non-finite output");
    y[i] = value;
  }
  return y;
}

}  // namespace

std::vector<PickFreezeBlock> evaluate_design(const ModelEvaluator& model, const Design& design) {
  if (model.dim() != design.d()) {
    throw ShapeError("model has " + std::to_string(model.dim()) + " factors but the design has " +
                     std::to_string(design.d()));
  }
  const std::vector<double> y_a = evaluate_matrix(model, design.a, "A");
  const std::vector<double> y_b = evaluate_matrix(model, design.b, "B");

  std::vector<PickFreezeBlock> blocks;
  blocks.reserve(design.groups.size());
  for (const FactorGroup& g : design.groups) {
    const std::string label = g.label();
    std::vector<double> y_au = evaluate_matrix(model, mix_columns(design.a, design.b, g), "A_u[" + label + "]");
    if (design.strategy == Strategy::current) {
      blocks.emplace_back(g, y_a, y_b, std::move(y_au));
    } else {
      std::vector<double> y_bu = evaluate_matrix(model, mix_columns(design.b, design.a, g), "B_u[" + label + "]");
      blocks.emplace_back(g, y_a, y_b, std::move(y_au), std::move(y_bu));
    }
  }
  return blocks;
}

void write_design_csv(const Design& design, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"matrix", "row", "col", "value"});
  const auto dump = [&](const SampleMatrix& m, const std::string& name) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        csv.row({name, std::to_string(i), std::to_string(j), format_double(m(i, j))});
      }
    }
  };
  dump(design.a, "A");
  dump(design.b, "B");
  for (const FactorGroup& g : design.groups) {
    dump(mix_columns(design.a, design.b, g), "A_u[" + g.label() + "]");
    if (design.strategy == Strategy::ia) dump(mix_columns(design.b, design.a, g), "B_u[" + g.label() + "]");
  }
}

}  // namespace sensikit
