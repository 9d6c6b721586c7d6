#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sensikit/errors.hpp"
#include "sensikit/rng.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/testfuncs.hpp"

using namespace sensikit;

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference splitmix64 generator seeded with 0 and 1234567.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1234567) == 6457827717110365317ULL);
}

TEST_CASE("streams are keyed by every field") {
  const StreamId base{7, tag("x"), 0, 1};
  const auto k = stream_key(base);
  CHECK(k == stream_key(StreamId{7, tag("x"), 0, 1}));
  CHECK(k != stream_key(StreamId{8, tag("x"), 0, 1}));
  CHECK(k != stream_key(StreamId{7, tag("y"), 0, 1}));
  CHECK(k != stream_key(StreamId{7, tag("x"), 1, 1}));
  CHECK(k != stream_key(StreamId{7, tag("x"), 0, 2}));
}

TEST_CASE("uniform draws lie in [0,1) and index_below covers its range") {
  RandomStream s(StreamId{1, 2, 3, 4});
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = s.index_below(5);
    REQUIRE(k < 5);
    ++hits[k];
  }
  for (int h : hits) CHECK(h > 1700);
}

TEST_CASE("lhs puts exactly one point in each stratum per column") {
  for (std::size_t n : {1u, 2u, 7u, 64u, 1000u}) {
    RandomStream s(StreamId{3, 1, 0, 1});
    const auto m = lhs_matrix(n, 4, s);
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<int> seen(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = m(i, j);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        ++seen[static_cast<std::size_t>(std::floor(v * static_cast<double>(n)))];
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }
}

TEST_CASE("mix_columns takes group columns from the first matrix") {
  RandomStream s1(StreamId{1, 1, 0, 1}), s2(StreamId{1, 1, 0, 2});
  const auto a = uniform_matrix(5, 3, s1);
  const auto b = uniform_matrix(5, 3, s2);
  const auto m = mix_columns(a, b, FactorGroup{0, 2});
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(m(i, 0) == a(i, 0));
    CHECK(m(i, 1) == b(i, 1));
    CHECK(m(i, 2) == a(i, 2));
  }
  RandomStream s3(StreamId{1, 1, 0, 3});
  CHECK_THROWS_AS(mix_columns(a, uniform_matrix(4, 3, s3), FactorGroup{0}), ShapeError);
}

TEST_CASE("designs are reproducible and independent across replicates") {
  const auto groups = singleton_groups(3);
  const auto d1 = build_design(Strategy::ia, 16, 3, groups, SamplerKind::lhs, 11, 2);
  const auto d2 = build_design(Strategy::ia, 16, 3, groups, SamplerKind::lhs, 11, 2);
  const auto d3 = build_design(Strategy::ia, 16, 3, groups, SamplerKind::lhs, 11, 3);
  CHECK(d1.a == d2.a);
  CHECK(d1.b == d2.b);
  CHECK_FALSE(d1.a == d3.a);
  CHECK_FALSE(d1.a == d1.b);
  CHECK(d1.required_evaluations() == 16 * 8);
  const auto c = build_design(Strategy::current, 16, 3, groups, SamplerKind::lhs, 11, 2);
  CHECK(c.required_evaluations() == 16 * 5);
}

TEST_CASE("evaluate_design counts calls and builds the mixed outputs") {
  struct Counting final : ModelEvaluator {
    FactorSpace s = FactorSpace::unit(3);
    mutable std::int64_t calls = 0;
    const FactorSpace& space() const override { return s; }
    double evaluate(std::span<const double> x) const override {
      ++calls;
      return x[0] + 10 * x[1] + 100 * x[2];
    }
    bool thread_safe() const override { return false; }
  };
  Counting model;
  const auto design = build_design(Strategy::ia, 8, 3, {FactorGroup{1}}, SamplerKind::mc, 5);
  const auto blocks = evaluate_design(model, design);
  CHECK(model.calls == design.required_evaluations());
  REQUIRE(blocks.size() == 1);
  const auto& blk = blocks[0];
  for (std::size_t i = 0; i < 8; ++i) {
    const double au = design.b(i, 0) + 10 * design.a(i, 1) + 100 * design.b(i, 2);
    const double bu = design.a(i, 0) + 10 * design.b(i, 1) + 100 * design.a(i, 2);
    CHECK(blk.y_au()[i] == doctest::Approx(au).epsilon(1e-14));
    CHECK(blk.y_bu()[i] == doctest::Approx(bu).epsilon(1e-14));
  }
}

TEST_CASE("model failures name the matrix and row") {
  struct Failing final : ModelEvaluator {
    FactorSpace s = FactorSpace::unit(2);
    const FactorSpace& space() const override { return s; }
    double evaluate(std::span<const double> x) const override { return x[1] > 0.5 ? NAN : 1.0; }
  };
  const auto design = build_design(Strategy::current, 32, 2, singleton_groups(2), SamplerKind::lhs, 1);
  try {
    evaluate_design(Failing{}, design);
    FAIL("expected a ModelEvaluationError");
  } catch (const ModelEvaluationError& e) {
    CHECK(e.matrix() == "A");
    CHECK(design.a(e.row(), 1) > 0.5);
  }
}

TEST_CASE("factor ranges map unit draws to model coordinates") {
  const IshigamiModel m{IshigamiParams{}};
  CHECK(m.space().to_model(0, 0.0) == doctest::Approx(-std::numbers::pi));
  CHECK(m.space().to_model(2, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("design dump has one row per cell of A, B and each mixed matrix") {
  const auto design = build_design(Strategy::current, 3, 2, singleton_groups(2), SamplerKind::mc, 1);
  std::ostringstream out;
  write_design_csv(design, out);
  const auto text = out.str();
  CHECK(text.rfind("matrix,row,col,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + (2 + 2) * 3 * 2);
}
