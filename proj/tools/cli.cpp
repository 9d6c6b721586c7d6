#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "sensikit/csv.hpp"
#include "sensikit/errors.hpp"
#include "sensikit/estimators.hpp"
#include "sensikit/harness.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/testfuncs.hpp"

namespace sensikit::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) {
  g_interrupted.store(true);
}

/// Fully resolved options shared by all commands.
struct Options {
  std::string model = "ishigami";
  std::map<std::string, std::vector<double>> params;
  std::string strategy = "both";
  std::int64_t n = 64;
  std::string sampler = "lhs";
  std::uint64_t seed = 1;
  std::vector<FactorGroup> groups;
  bool clamp = false;
  std::string out_dir = ".";
  std::int64_t replicates = 100;
  bool budget_matched = false;
  std::vector<double> f0_offsets;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool dump_design = false;
};

/// Raw flag values; only those given on the command line override the config file.
struct Flags {
  std::string config;
  std::string model;
  std::vector<std::string> params;
  double f0 = 0.0;
  std::string strategy;
  std::int64_t n = 0;
  std::string sampler;
  std::uint64_t seed = 0;
  std::vector<std::string> groups;
  bool clamp = false;
  std::string out_dir;
  std::int64_t replicates = 0;
  bool budget_matched = false;
  std::vector<double> f0_offsets;
  std::size_t threads = 0;
  bool dump_design = false;
};

std::vector<FactorGroup> parse_groups(const std::vector<std::string>& tokens) {
  std::vector<FactorGroup> groups;
  for (const auto& t : tokens) groups.push_back(FactorGroup::parse_label(t));
  return groups;
}

void merge_params(std::map<std::string, std::vector<double>>& into, const std::map<std::string, std::vector<double>>& from) {
  for (const auto& [k, v] : from) into[k] = v;
}

void apply_config_file(Options& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  // A run manifest carries its resolved config under "config".
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");

  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "model") o.model = v.get<std::string>();
      else if (key == "params") {
        if (v.is_string()) merge_params(o.params, parse_params(v.get<std::string>()));
        else {
          for (const auto& [pk, pv] : v.items()) {
            o.params[pk] = pv.is_array() ? pv.get<std::vector<double>>() : std::vector<double>{pv.get<double>()};
          }
        }
      } else if (key == "f0") o.params["f0"] = {v.get<double>()};
      else if (key == "strategy") o.strategy = v.get<std::string>();
      else if (key == "n") o.n = v.get<std::int64_t>();
      else if (key == "sampler") o.sampler = v.get<std::string>();
      else if (key == "seed") o.seed = v.get<std::uint64_t>();
      else if (key == "groups") {
        std::vector<std::string> tokens;
        for (const auto& g : v) {
          if (g.is_string()) {
            tokens.push_back(g.get<std::string>());
          } else {
            std::string label;
            for (const auto& m : g) label += (label.empty() ? "" : ";") + std::to_string(m.get<std::size_t>());
            tokens.push_back(label.empty() ? "-" : label);
          }
        }
        o.groups = parse_groups(tokens);
      } else if (key == "clamp") o.clamp = v.get<bool>();
      else if (key == "out_dir") o.out_dir = v.get<std::string>();
      else if (key == "replicates") o.replicates = v.get<std::int64_t>();
      else if (key == "budget_matched") o.budget_matched = v.get<bool>();
      else if (key == "f0_offsets") o.f0_offsets = v.get<std::vector<double>>();
      else if (key == "threads") o.threads = v.get<std::size_t>();
      else if (key == "dump_design") o.dump_design = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "' in " + path);
    }
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

void add_common_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "JSON config file (keys mirror the flags; flags win)");
  cmd.add_option("--model", f.model, "ishigami | gfunction | additive");
  cmd.add_option("--params", f.params, "Model parameters, e.g. f0=100 or coeffs=1,0 or a=-1.13,-1.24");
  cmd.add_option("--f0", f.f0, "Ishigami constant offset");
  cmd.add_option("--seed", f.seed, "Master seed (fallback: SENSIKIT_SEED, then 1)");
  cmd.add_option("--groups", f.groups, "Factor groups, 1-based, members joined by ',' (default: one per factor)");
  cmd.add_option("--out-dir", f.out_dir, "Directory for output files");
  cmd.add_option("--threads", f.threads, "Worker threads for replicates")->check(CLI::PositiveNumber);
}

void add_sampling_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--n", f.n, "Sample size N (IA side under budget matching)");
  cmd.add_option("--sampler", f.sampler, "mc | lhs");
  cmd.add_flag("--clamp", f.clamp, "Clamp reported estimates to [0, 1]");
  cmd.add_flag("--budget-matched", f.budget_matched, "Run the current strategy at 2N");
}

Options resolve(const CLI::App& cmd, const Flags& f) {
  Options o;
  if (const char* env = std::getenv("SENSIKIT_SEED"); env && *env) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SENSIKIT_SEED is not an unsigned integer: ") + env);
    }
  }
  if (!f.config.empty()) apply_config_file(o, f.config);

  const auto given = [&cmd](const char* name) { return cmd.get_option_no_throw(name) && cmd.count(name) > 0; };
  if (given("--model")) o.model = f.model;
  if (given("--params")) {
    for (const auto& p : f.params) merge_params(o.params, parse_params(p));
  }
  if (given("--f0")) o.params["f0"] = {f.f0};
  if (given("--strategy")) o.strategy = f.strategy;
  if (given("--n")) o.n = f.n;
  if (given("--sampler")) o.sampler = f.sampler;
  if (given("--seed")) o.seed = f.seed;
  if (given("--groups")) o.groups = parse_groups(f.groups);
  if (given("--clamp")) o.clamp = f.clamp;
  if (given("--out-dir")) o.out_dir = f.out_dir;
  if (given("--replicates")) o.replicates = f.replicates;
  if (given("--budget-matched")) o.budget_matched = f.budget_matched;
  if (given("--f0-offsets")) o.f0_offsets = f.f0_offsets;
  if (given("--threads")) o.threads = f.threads;
  if (given("--dump-design")) o.dump_design = f.dump_design;

  if (o.strategy != "both") parse_strategy(o.strategy);
  parse_sampler(o.sampler);
  if (o.n < 2) throw ConfigError("--n must be at least 2");
  if (o.replicates < 1) throw ConfigError("--replicates must be at least 1");
  if (o.threads < 1) throw ConfigError("--threads must be at least 1");
  return o;
}

ModelSpec model_spec(const Options& o) {
  return resolve_model_spec(ModelSpec{o.model, o.params});
}

std::vector<Strategy> strategies(const Options& o) {
  if (o.strategy == "both") return {Strategy::current, Strategy::ia};
  return {parse_strategy(o.strategy)};
}

std::vector<FactorGroup> groups_for(const Options& o, std::size_t d) {
  auto groups = o.groups.empty() ? singleton_groups(d) : o.groups;
  for (const auto& g : groups) g.validate(d);
  return groups;
}

json to_json(const Options& o, const ModelSpec& spec, std::size_t d) {
  json groups = json::array();
  for (const auto& g : groups_for(o, d)) {
    json members = json::array();
    for (const auto m : g.members()) members.push_back(m + 1);
    groups.push_back(members);
  }
  json params = json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  return {{"model", spec.name},  {"params", params},         {"strategy", o.strategy},
          {"n", o.n},            {"sampler", o.sampler},     {"seed", o.seed},
          {"groups", groups},    {"clamp", o.clamp},         {"out_dir", o.out_dir},
          {"replicates", o.replicates}, {"budget_matched", o.budget_matched},
          {"f0_offsets", o.f0_offsets}, {"threads", o.threads}, {"dump_design", o.dump_design}};
}

ExperimentConfig experiment(const Options& o, const ModelSpec& spec, Strategy s) {
  ExperimentConfig cfg;
  cfg.model = spec;
  cfg.strategy = s;
  cfg.sampler = parse_sampler(o.sampler);
  cfg.n = o.n;
  cfg.groups = groups_for(o, model_dimension(spec));
  cfg.replicates = o.replicates;
  cfg.master_seed = o.seed;
  cfg.budget_matched = o.budget_matched;
  cfg.clamp = o.clamp;
  cfg.threads = o.threads;
  return cfg;
}

fs::path prepare_out_dir(const Options& o) {
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<double> analytic_value(const ModelSpec& spec, const FactorGroup& g, IndexKind kind) {
  try {
    const auto idx = analytic_group_indices(spec, g);
    return kind == IndexKind::first ? idx.first : idx.total;
  } catch (const SingularParameterError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

int cmd_estimate(const Options& o) {
  const auto start = Clock::now();
  const ModelSpec spec = model_spec(o);
  const auto model = make_model(spec);
  const std::size_t d = model->dim();
  const auto groups = groups_for(o, d);
  const fs::path dir = prepare_out_dir(o);
  RunManifest manifest("estimate", to_json(o, spec, d), o.seed);

  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  csv.row({"group", "kind", "strategy", "estimate", "asym_variance", "n", "model_calls"});
  for (const Strategy s : strategies(o)) {
    const std::int64_t n = (o.budget_matched && s == Strategy::current) ? 2 * o.n : o.n;
    const Design design =
        build_design(s, static_cast<std::size_t>(n), d, groups, parse_sampler(o.sampler), o.seed, 0);
    const auto blocks = evaluate_design(*model, design);
    for (const auto& block : blocks) {
      for (const auto& e : estimate_block(block, s, design.required_evaluations(), o.clamp)) {
        csv.row({e.group.label(), std::string(to_string(e.kind)), std::string(to_string(e.estimator)),
                 format_double(e.value), format_optional(e.asym_variance), std::to_string(e.n),
                 std::to_string(e.model_calls)});
      }
    }
    if (o.dump_design) {
      std::ostringstream dump;
      write_design_csv(design, dump);
      manifest.write_output(dir, "design_" + std::string(to_string(s)) + ".csv", dump.str());
    }
  }
  manifest.write_output(dir, "estimates.csv", csv_text.str());
  manifest.add_timing("estimate", seconds_since(start));
  manifest.save(dir);
  std::cout << "wrote " << (dir / "estimates.csv").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// replicate
// ---------------------------------------------------------------------------

void write_replicate_rows(CsvWriter& csv, const ReplicateTable& t) {
  for (const auto& r : t.rows) {
    csv.row({std::to_string(r.replicate), r.group.label(), std::string(to_string(r.kind)),
             std::string(to_string(r.estimator)), r.skipped ? std::string() : format_double(r.estimate),
             format_optional(r.asym_variance), std::to_string(r.n), std::to_string(r.model_calls),
             r.skipped ? "1" : "0"});
  }
}

void write_summary_rows(CsvWriter& csv, const ReplicateTable& t) {
  for (const auto& c : empirical_stats(t)) {
    csv.row({c.group.label(), std::string(to_string(c.kind)), std::string(to_string(c.estimator)),
             std::to_string(c.n), std::to_string(c.used), std::to_string(c.skipped), format_optional(c.mean),
             format_optional(c.variance), format_optional(c.mean_asym_variance),
             format_optional(analytic_value(t.config.model, c.group, c.kind))});
  }
}

int cmd_replicate(const Options& o) {
  const auto start = Clock::now();
  const ModelSpec spec = model_spec(o);
  const std::size_t d = model_dimension(spec);
  const fs::path dir = prepare_out_dir(o);
  RunManifest manifest("replicate", to_json(o, spec, d), o.seed);

  g_interrupted.store(false);
  const auto previous = std::signal(SIGINT, on_sigint);
  const RunControl control{&g_interrupted};

  std::ostringstream rep_text, sum_text;
  CsvWriter rep(rep_text), sum(sum_text);
  rep.row({"replicate", "group", "kind", "strategy", "estimate", "asym_variance", "n", "model_calls", "skipped"});
  sum.row({"group", "kind", "strategy", "n", "replicates", "skipped", "mean", "emp_variance", "mean_asym_variance",
           "analytic"});

  bool interrupted = false;
  std::ostringstream shift_text, shift_sum_text;
  CsvWriter shift(shift_text), shift_sum(shift_sum_text);
  shift.row({"offset", "replicate", "group", "kind", "strategy", "estimate", "reference_estimate", "delta",
             "relative_delta"});
  shift_sum.row({"offset", "group", "kind", "strategy", "emp_variance", "reference_emp_variance", "variance_ratio"});

  for (const Strategy s : strategies(o)) {
    const auto t0 = Clock::now();
    const ReplicateTable table = run_replicates(experiment(o, spec, s), control);
    manifest.add_timing("replicates_" + std::string(to_string(s)), seconds_since(t0));
    write_replicate_rows(rep, table);
    write_summary_rows(sum, table);
    interrupted = interrupted || table.interrupted;

    if (!o.f0_offsets.empty() && !interrupted) {
      const auto t1 = Clock::now();
      const ShiftResult result = shift_experiment(experiment(o, spec, s), o.f0_offsets, control);
      manifest.add_timing("shift_" + std::string(to_string(s)), seconds_since(t1));
      for (const auto& t : result.tables) interrupted = interrupted || t.interrupted;
      for (const auto& dlt : result.deltas) {
        shift.row({format_double(dlt.offset), std::to_string(dlt.replicate), dlt.group.label(),
                   std::string(to_string(dlt.kind)), std::string(to_string(dlt.estimator)),
                   format_double(dlt.estimate), format_double(dlt.reference), format_double(dlt.delta),
                   format_double(dlt.relative_delta)});
      }
      for (const auto& v : result.variances) {
        shift_sum.row({format_double(v.offset), v.group.label(), std::string(to_string(v.kind)),
                       std::string(to_string(v.estimator)), format_optional(v.variance),
                       format_optional(v.reference_variance), format_optional(v.ratio)});
      }
    }
    if (interrupted) break;
  }
  std::signal(SIGINT, previous);

  manifest.write_output(dir, "replicates.csv", rep_text.str());
  manifest.write_output(dir, "summary.csv", sum_text.str());
  if (!o.f0_offsets.empty()) {
    manifest.write_output(dir, "shift.csv", shift_text.str());
    manifest.write_output(dir, "shift_summary.csv", shift_sum_text.str());
  }
  manifest.set("interrupted", interrupted);
  manifest.add_timing("total", seconds_since(start));
  manifest.save(dir);
  if (interrupted) {
    std::cerr << "interrupted: partial results written to " << dir.string() << '\n';
    return kInterrupted;
  }
  std::cout << "wrote replicate tables to " << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// variance-compare
// ---------------------------------------------------------------------------

int cmd_variance_compare(const Options& o) {
  const auto start = Clock::now();
  const ModelSpec spec = model_spec(o);
  const std::size_t d = model_dimension(spec);
  const fs::path dir = prepare_out_dir(o);
  RunManifest manifest("variance-compare", to_json(o, spec, d), o.seed);

  const auto t0 = Clock::now();
  const ReplicateTable current = run_replicates(experiment(o, spec, Strategy::current));
  manifest.add_timing("replicates_current", seconds_since(t0));
  const auto t1 = Clock::now();
  const ReplicateTable ia = run_replicates(experiment(o, spec, Strategy::ia));
  manifest.add_timing("replicates_ia", seconds_since(t1));
  const VarianceComparison cmp = variance_comparison(current, ia);

  std::ostringstream scatter_text, summary_text;
  CsvWriter scatter(scatter_text), summary(summary_text);
  scatter.row({"group", "ST_analytic", "tau2_sj_plugin", "tau2_ia_plugin", "replicate"});
  summary.row({"group", "kind", "analytic", "strategy", "n", "replicates", "mean", "emp_variance",
               "mean_plugin_variance", "plugin_to_empirical"});

  for (const auto& cell : cmp.cells) {
    if (cell.kind == IndexKind::total) {
      for (std::size_t r = 0; r < cell.left_plugin.size(); ++r) {
        scatter.row({cell.group.label(), format_optional(cell.analytic), format_optional(cell.left_plugin[r]),
                     format_optional(cell.right_plugin[r]), std::to_string(r)});
      }
    }
    for (const CellStats* s : {&cell.left, &cell.right}) {
      std::optional<double> ratio;
      if (s->mean_asym_variance && s->variance && *s->variance > 0.0) ratio = *s->mean_asym_variance / *s->variance;
      summary.row({cell.group.label(), std::string(to_string(cell.kind)), format_optional(cell.analytic),
                   std::string(to_string(s->estimator)), std::to_string(s->n), std::to_string(s->used),
                   format_optional(s->mean), format_optional(s->variance), format_optional(s->mean_asym_variance),
                   format_optional(ratio)});
    }
  }
  manifest.write_output(dir, "variance_scatter.csv", scatter_text.str());
  manifest.write_output(dir, "variance_summary.csv", summary_text.str());
  manifest.add_timing("total", seconds_since(start));
  manifest.save(dir);
  std::cout << "wrote variance comparison to " << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// analytic
// ---------------------------------------------------------------------------

int cmd_analytic(const Options& o) {
  const ModelSpec spec = model_spec(o);
  const std::size_t d = model_dimension(spec);
  const AnalyticIndices all = analytic_indices(spec);
  const fs::path dir = prepare_out_dir(o);
  RunManifest manifest("analytic", to_json(o, spec, d), o.seed);

  std::ostringstream text;
  CsvWriter csv(text);
  csv.row({"group", "S", "ST", "V"});
  for (const auto& g : groups_for(o, d)) {
    const auto idx = analytic_group_indices(spec, g);
    csv.row({g.label(), format_double(idx.first), format_double(idx.total), format_double(all.variance)});
  }
  manifest.write_output(dir, "analytic.csv", text.str());
  manifest.save(dir);
  std::cout << "wrote " << (dir / "analytic.csv").string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Variance-based sensitivity indices: current vs IA estimators", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Flags f;
  auto* estimate = app.add_subcommand("estimate", "Estimate first- and total-order indices once");
  auto* replicate = app.add_subcommand("replicate", "Replicate estimates under fresh seeds");
  auto* compare = app.add_subcommand("variance-compare", "Empirical vs plug-in variances, current vs IA");
  auto* analytic = app.add_subcommand("analytic", "Closed-form indices of a test model");

  for (auto* cmd : {estimate, replicate, compare, analytic}) add_common_flags(*cmd, f);
  for (auto* cmd : {estimate, replicate, compare}) add_sampling_flags(*cmd, f);
  for (auto* cmd : {estimate, replicate}) cmd->add_option("--strategy", f.strategy, "current | ia | both");
  for (auto* cmd : {replicate, compare}) {
    cmd->add_option("--replicates", f.replicates, "Number of independent replicates R");
  }
  replicate->add_option("--f0-offsets", f.f0_offsets, "Shift study offsets, e.g. 0,100")->delimiter(',');
  estimate->add_flag("--dump-design", f.dump_design, "Also write the sample matrices as CSV");

  std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const Options o = resolve(*cmd, f);
    if (cmd == estimate) return cmd_estimate(o);
    if (cmd == replicate) return cmd_replicate(o);
    if (cmd == compare) return cmd_variance_compare(o);
    return cmd_analytic(o);
  } catch (const DegenerateSampleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InsufficientSampleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidGroupError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SingularParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IncompatibleTablesError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace sensikit::cli
