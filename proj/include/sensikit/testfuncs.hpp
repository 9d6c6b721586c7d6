#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sensikit/core.hpp"

namespace sensikit {

/// f(x) = f0 + sin x1 + a sin^2 x2 + b x3^4 sin x1 on (-pi, pi)^3.
struct IshigamiParams {
  double f0 = 0.0;
  double a = 7.0;
  double b = 0.1;
};

/// Sobol' g-function coefficients, one per factor; a_i != -1.
struct GFunctionParams {
  std::vector<double> a;

  /// The ten coefficients whose total indices spread roughly evenly over (0, 1).
  static GFunctionParams spread_default();
};

/// Closed-form per-factor indices and the total variance.
struct AnalyticIndices {
  std::vector<double> first;
  std::vector<double> total;
  double variance = 0.0;
};

/// Closed-form indices of an arbitrary group.
struct GroupIndices {
  double first = 0.0;
  double total = 0.0;
};

double ishigami_eval(std::span<const double> x, const IshigamiParams& p);
AnalyticIndices ishigami_analytic(const IshigamiParams& p);

double gfunction_eval(std::span<const double> x, const GFunctionParams& p);
/// Throws SingularParameterError if some a_i == -1.
AnalyticIndices gfunction_analytic(const GFunctionParams& p);

/// sum_i c_i x_i with x uniform on (0, 1)^d.
double additive_poly_eval(std::span<const double> x, std::span<const double> coeffs);
/// S_i = ST_i = c_i^2 / sum c_j^2. Throws SingularParameterError when every c_i is zero.
AnalyticIndices additive_analytic(std::span<const double> coeffs);

class IshigamiModel final : public ModelEvaluator {
 public:
  explicit IshigamiModel(IshigamiParams p = {});
  const FactorSpace& space() const override { return space_; }
  double evaluate(std::span<const double> x) const override { return ishigami_eval(x, params_); }
  const IshigamiParams& params() const noexcept { return params_; }

 private:
  IshigamiParams params_;
  FactorSpace space_;
};

class GFunctionModel final : public ModelEvaluator {
 public:
  explicit GFunctionModel(GFunctionParams p);
  const FactorSpace& space() const override { return space_; }
  double evaluate(std::span<const double> x) const override { return gfunction_eval(x, params_); }

 private:
  GFunctionParams params_;
  FactorSpace space_;
};

class AdditiveModel final : public ModelEvaluator {
 public:
  explicit AdditiveModel(std::vector<double> coeffs);
  const FactorSpace& space() const override { return space_; }
  double evaluate(std::span<const double> x) const override { return additive_poly_eval(x, coeffs_); }

 private:
  std::vector<double> coeffs_;
  FactorSpace space_;
};

// ---------------------------------------------------------------------------
// Registry: `ishigami` (f0, a, b), `gfunction` (a), `additive` (coeffs)
// ---------------------------------------------------------------------------

std::vector<std::string> registered_models();

/// Fills in defaults and rejects unknown models or parameter keys with ConfigError.
ModelSpec resolve_model_spec(const ModelSpec& spec);

std::unique_ptr<ModelEvaluator> make_model(const ModelSpec& spec);
std::size_t model_dimension(const ModelSpec& spec);
AnalyticIndices analytic_indices(const ModelSpec& spec);
GroupIndices analytic_group_indices(const ModelSpec& spec, const FactorGroup& group);

/// Whether the model has a constant-offset parameter (`f0`).
bool supports_offset(const ModelSpec& spec);
ModelSpec with_offset(const ModelSpec& spec, double f0);

/// Parses "key=v1,v2;key2=v" into parameter lists.
std::map<std::string, std::vector<double>> parse_params(std::string_view text);

}  // namespace sensikit
