#include "sensikit/testfuncs.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "sensikit/errors.hpp"

namespace sensikit {

GFunctionParams GFunctionParams::spread_default() {
  return {{-1.13, -1.24, -1.33, -1.42, -1.52, -1.64, -1.79, -2.00, -2.37, 1.52}};
}

// ---------------------------------------------------------------------------
// Ishigami
// ---------------------------------------------------------------------------

double ishigami_eval(std::span<const double> x, const IshigamiParams& p) {
  const double s1 = std::sin(x[0]);
  const double s2 = std::sin(x[1]);
  const double x3sq = x[2] * x[2];
  // f0 goes last so f0 == 0 reproduces the classic function bit for bit.
  const double core = s1 + p.a * (s2 * s2) + p.b * (x3sq * x3sq) * s1;
  return core + p.f0;
}

namespace {

struct IshigamiTerms {
  double v1, v2, v13, total;
};

// ANOVA terms on (-pi, pi)^3: V3 = 0 and the only interaction is x1-x3.
IshigamiTerms ishigami_terms(const IshigamiParams& p) {
  constexpr double pi = std::numbers::pi;
  const double pi4 = std::pow(pi, 4);
  const double pi8 = pi4 * pi4;
  const double v1 = 0.5 * std::pow(1.0 + p.b * pi4 / 5.0, 2);
  const double v2 = p.a * p.a / 8.0;
  const double v13 = p.b * p.b * pi8 * (1.0 / 18.0 - 1.0 / 50.0);
  const double total = 0.5 + p.a * p.a / 8.0 + p.b * pi4 / 5.0 + p.b * p.b * pi8 / 18.0;
  return {v1, v2, v13, total};
}

}  // namespace

AnalyticIndices ishigami_analytic(const IshigamiParams& p) {
  const auto t = ishigami_terms(p);
  AnalyticIndices r;
  r.variance = t.total;
  r.first = {t.v1 / t.total, t.v2 / t.total, 0.0};
  r.total = {(t.v1 + t.v13) / t.total, t.v2 / t.total, t.v13 / t.total};
  return r;
}

IshigamiModel::IshigamiModel(IshigamiParams p)
    : params_(p), space_(FactorSpace::uniform(3, -std::numbers::pi, std::numbers::pi)) {}

// ---------------------------------------------------------------------------
// g-function
// ---------------------------------------------------------------------------

double gfunction_eval(std::span<const double> x, const GFunctionParams& p) {
  double y = 1.0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    y *= (std::abs(4.0 * x[i] - 2.0) + p.a[i]) / (p.a[i] + 1.0);
  }
  return y;
}

namespace {

std::vector<double> gfunction_partial_variances(const GFunctionParams& p) {
  std::vector<double> v(p.a.size());
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    if (p.a[i] == -1.0) {
      throw SingularParameterError("g-function coefficient a_" + std::to_string(i + 1) + " = -1 is singular");
    }
    v[i] = (1.0 / 3.0) / ((1.0 + p.a[i]) * (1.0 + p.a[i]));
  }
  return v;
}

}  // namespace

AnalyticIndices gfunction_analytic(const GFunctionParams& p) {
  const auto vi = gfunction_partial_variances(p);
  double prod = 1.0;
  for (const double v : vi) prod *= 1.0 + v;
  const double total = prod - 1.0;

  AnalyticIndices r;
  r.variance = total;
  for (std::size_t i = 0; i < vi.size(); ++i) {
    double others = 1.0;
    for (std::size_t j = 0; j < vi.size(); ++j) {
      if (j != i) others *= 1.0 + vi[j];
    }
    r.first.push_back(vi[i] / total);
    r.total.push_back(vi[i] * others / total);
  }
  return r;
}

GFunctionModel::GFunctionModel(GFunctionParams p) : params_(std::move(p)), space_(FactorSpace::unit(params_.a.size())) {
  gfunction_partial_variances(params_);
}

// ---------------------------------------------------------------------------
// Additive polynomial
// ---------------------------------------------------------------------------

double additive_poly_eval(std::span<const double> x, std::span<const double> coeffs) {
  double y = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) y += coeffs[i] * x[i];
  return y;
}

AnalyticIndices additive_analytic(std::span<const double> coeffs) {
  double sum_sq = 0.0;
  for (const double c : coeffs) sum_sq += c * c;
  if (sum_sq == 0.0) throw SingularParameterError("additive model with all-zero coefficients has zero variance");
  AnalyticIndices r;
  r.variance = sum_sq / 12.0;
  for (const double c : coeffs) {
    r.first.push_back(c * c / sum_sq);
    r.total.push_back(c * c / sum_sq);
  }
  return r;
}

AdditiveModel::AdditiveModel(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)), space_(FactorSpace::unit(coeffs_.size())) {}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

std::vector<std::string> registered_models() {
  return {"ishigami", "gfunction", "additive"};
}

namespace {

double scalar_param(const ModelSpec& spec, const std::string& key) {
  const auto& values = spec.params.at(key);
  if (values.size() != 1) throw ConfigError("parameter '" + key + "' of " + spec.name + " takes a single value");
  return values[0];
}

void reject_unknown(const ModelSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [key, values] : spec.params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("model '" + spec.name + "' has no parameter '" + key + "'");
  }
}

IshigamiParams ishigami_params(const ModelSpec& spec) {
  return {scalar_param(spec, "f0"), scalar_param(spec, "a"), scalar_param(spec, "b")};
}

}  // namespace

ModelSpec resolve_model_spec(const ModelSpec& spec) {
  ModelSpec r = spec;
  if (spec.name == "ishigami") {
    reject_unknown(spec, {"f0", "a", "b"});
    r.params.try_emplace("f0", std::vector<double>{0.0});
    r.params.try_emplace("a", std::vector<double>{7.0});
    r.params.try_emplace("b", std::vector<double>{0.1});
    ishigami_params(r);
  } else if (spec.name == "gfunction") {
    reject_unknown(spec, {"a"});
    r.params.try_emplace("a", GFunctionParams::spread_default().a);
    if (r.params.at("a").empty()) throw ConfigError("g-function needs at least one coefficient");
  } else if (spec.name == "additive") {
    reject_unknown(spec, {"coeffs"});
    r.params.try_emplace("coeffs", std::vector<double>{1.0, 1.0});
    if (r.params.at("coeffs").empty()) throw ConfigError("additive model needs at least one coefficient");
  } else {
    throw ConfigError("unknown model '" + spec.name + "' (expected ishigami, gfunction or additive)");
  }
  return r;
}

std::unique_ptr<ModelEvaluator> make_model(const ModelSpec& spec) {
  const ModelSpec r = resolve_model_spec(spec);
  if (r.name == "ishigami") return std::make_unique<IshigamiModel>(ishigami_params(r));
  if (r.name == "gfunction") return std::make_unique<GFunctionModel>(GFunctionParams{r.params.at("a")});
  return std::make_unique<AdditiveModel>(r.params.at("coeffs"));
}

std::size_t model_dimension(const ModelSpec& spec) {
  const ModelSpec r = resolve_model_spec(spec);
  if (r.name == "ishigami") return 3;
  if (r.name == "gfunction") return r.params.at("a").size();
  return r.params.at("coeffs").size();
}

AnalyticIndices analytic_indices(const ModelSpec& spec) {
  const ModelSpec r = resolve_model_spec(spec);
  if (r.name == "ishigami") return ishigami_analytic(ishigami_params(r));
  if (r.name == "gfunction") return gfunction_analytic(GFunctionParams{r.params.at("a")});
  return additive_analytic(r.params.at("coeffs"));
}

GroupIndices analytic_group_indices(const ModelSpec& spec, const FactorGroup& group) {
  const ModelSpec r = resolve_model_spec(spec);
  const std::size_t d = model_dimension(r);
  group.validate(d);

  if (r.name == "ishigami") {
    const auto t = ishigami_terms(ishigami_params(r));
    const bool has1 = group.contains(0), has2 = group.contains(1), has3 = group.contains(2);
    const double first = (has1 ? t.v1 : 0.0) + (has2 ? t.v2 : 0.0) + (has1 && has3 ? t.v13 : 0.0);
    const double total = (has1 ? t.v1 : 0.0) + (has2 ? t.v2 : 0.0) + (has1 || has3 ? t.v13 : 0.0);
    return {first / t.total, total / t.total};
  }
  if (r.name == "gfunction") {
    const auto vi = gfunction_partial_variances(GFunctionParams{r.params.at("a")});
    const double total_variance = gfunction_analytic(GFunctionParams{r.params.at("a")}).variance;
    const auto closed = [&](const FactorGroup& g) {
      double prod = 1.0;
      for (const std::size_t j : g.members()) prod *= 1.0 + vi[j];
      return (prod - 1.0) / total_variance;
    };
    return {closed(group), 1.0 - closed(complement(group, d))};
  }
  const auto a = additive_analytic(r.params.at("coeffs"));
  double share = 0.0;
  for (const std::size_t j : group.members()) share += a.first[j];
  return {share, share};
}

bool supports_offset(const ModelSpec& spec) {
  return spec.name == "ishigami";
}

ModelSpec with_offset(const ModelSpec& spec, double f0) {
  if (!supports_offset(spec)) throw ConfigError("model '" + spec.name + "' has no constant-offset parameter f0");
  ModelSpec r = spec;
  r.params["f0"] = {f0};
  return r;
}

std::map<std::string, std::vector<double>> parse_params(std::string_view text) {
  std::map<std::string, std::vector<double>> out;
  while (!text.empty()) {
    const auto cut = text.find(';');
    std::string_view item = text.substr(0, cut);
    text = cut == std::string_view::npos ? std::string_view{} : text.substr(cut + 1);
    if (item.empty()) continue;

    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("malformed parameter '" + std::string(item) + "' (expected key=v1,v2,...)");
    }
    const std::string key(item.substr(0, eq));
    std::string_view values = item.substr(eq + 1);
    std::vector<double> parsed;
    while (true) {
      const auto comma = values.find(',');
      const std::string_view tok = values.substr(0, comma);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ConfigError("parameter '" + key + "' has a non-numeric value '" + std::string(tok) + "'");
      }
      parsed.push_back(v);
      if (comma == std::string_view::npos) break;
      values.remove_prefix(comma + 1);
    }
    out[key] = std::move(parsed);
  }
  return out;
}

}  // namespace sensikit
