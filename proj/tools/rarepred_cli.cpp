// Command-line driver: run / synth / eval / sweep.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rarepred/error.hpp"
#include "rarepred/experiment.hpp"
#include "rarepred/synth.hpp"
#include "rarepred/validation.hpp"

namespace fs = std::filesystem;
using namespace rarepred;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InputError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A synth config file holds either a bare synth object or a full experiment
// config with input.synth.
SynthConfig read_synth_config(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte > 0 ? e.byte - 1 : 0, e.what());
  }
  if (doc.contains("input")) {
    const auto cfg = parse_experiment_config(text);
    if (!cfg.synth) throw ParseError(0, "/input: config has no synth section");
    return *cfg.synth;
  }
  try {
    SynthConfig cfg = synth_config_from_json(doc);
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, e.what());
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InputError, "cannot write '" + path.string() + "'");
  out << body;
}

Panel load_data(const std::string& data, std::optional<std::uint64_t> synth_seed,
                std::optional<TimeIndex> eval_start) {
  if (!data.empty()) {
    SchemaConfig schema;
    schema.evaluation_start = eval_start;
    return ingest_csv(data, schema);
  }
  SynthConfig cfg;
  if (synth_seed) cfg.seed = *synth_seed;
  return generate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event prediction with resampled logistic ensembles"};
  app.require_subcommand(1);

  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed (overrides the config)");
  app.add_option("--out-dir", out_dir, "Output directory (overrides the config)");

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  std::string run_config;
  run_cmd->add_option("config", run_config, "Experiment config (JSON)")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic panel as CSV");
  std::string synth_config;
  std::string synth_out;
  synth_cmd->add_option("config", synth_config, "Synth config (JSON); defaults when omitted");
  synth_cmd->add_option("-o,--output", synth_out, "Output CSV")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate one recipe under one protocol");
  std::string eval_data;
  std::optional<std::uint64_t> eval_synth_seed;
  std::string eval_spec = "id";
  std::string eval_protocol = "longitudinal";
  std::size_t eval_k = 1;
  std::optional<TimeIndex> eval_start;
  std::optional<TimeIndex> eval_boundary;
  auto* data_opt = eval_cmd->add_option("--data", eval_data, "Panel CSV");
  eval_cmd->add_option("--synth-seed", eval_synth_seed, "Use the default synthetic panel with this seed")
      ->excludes(data_opt);
  eval_cmd->add_option("--spec", eval_spec, "Sampler spec, e.g. under(0.3)+over(5:3)");
  eval_cmd->add_option("--protocol", eval_protocol, "longitudinal | loocv | split");
  eval_cmd->add_option("-K", eval_k, "Ensemble size")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--eval-start", eval_start, "First horizon of a CSV panel");
  eval_cmd->add_option("--boundary", eval_boundary, "Split boundary (default: first horizon)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Rate sweep under the longitudinal protocol");
  std::string sweep_data;
  std::optional<std::uint64_t> sweep_synth_seed;
  std::vector<std::string> sweep_specs;
  std::size_t sweep_repeats = 15;
  std::size_t sweep_k = 1;
  std::optional<TimeIndex> sweep_start;
  auto* sdata_opt = sweep_cmd->add_option("--data", sweep_data, "Panel CSV");
  sweep_cmd->add_option("--synth-seed", sweep_synth_seed, "Use the default synthetic panel with this seed")
      ->excludes(sdata_opt);
  sweep_cmd->add_option("--spec", sweep_specs, "Grid entry (repeatable)")->required();
  sweep_cmd->add_option("--repeats", sweep_repeats, "Repeats per grid entry")->check(CLI::Range(2, 1000000));
  sweep_cmd->add_option("-K", sweep_k, "Ensemble size")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--eval-start", sweep_start, "First horizon of a CSV panel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_experiment_config(run_config);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.outputs = out_dir;
      cfg.jobs = std::max(cfg.jobs, jobs);
      const RunResult res = run(cfg);
      for (const auto& f : res.failures)
        std::cerr << "recipe '" << f.recipe << "' (" << f.protocol << ") failed: " << f.message << '\n';
      std::cout << res.manifest.string() << '\n';
      return res.exit_status;
    }
    if (*synth_cmd) {
      SynthConfig cfg = synth_config.empty() ? SynthConfig{} : read_synth_config(synth_config);
      if (seed) cfg.seed = *seed;
      emit_csv(synth_out, generate(cfg));
      return 0;
    }
    if (*eval_cmd) {
      const Panel panel = load_data(eval_data, eval_synth_seed, eval_start);
      Recipe recipe;
      recipe.name = eval_spec;
      recipe.spec = parse_spec(eval_spec);
      recipe.K = eval_k;
      recipe.seed = seed.value_or(0);
      EvalOptions opts;
      opts.jobs = jobs;
      ProtocolChoice proto = parse_protocol(eval_protocol);
      if (eval_boundary) proto.boundary = eval_boundary;
      EvalReport report;
      switch (proto.protocol) {
        case Protocol::Longitudinal: report = longitudinal_eval(panel, recipe, opts); break;
        case Protocol::Loocv: report = loocv_eval(panel, recipe, opts); break;
        case Protocol::Split: {
          if (panel.horizon_boundaries().empty()) throw Error(Errc::NoSeedHistory, "panel has no horizons");
          report = split_eval(panel, proto.boundary.value_or(panel.horizon_boundaries().front()), recipe, opts);
          break;
        }
      }
      nlohmann::json summary{{"spec", to_string(recipe.spec)},
                             {"protocol", to_string(proto)},
                             {"K", recipe.K},
                             {"seed", recipe.seed},
                             {"n_pairs", report.pairs.size()},
                             {"auc", report.auc},
                             {"peirce", report.peirce},
                             {"gamma_star", report.gamma_star},
                             {"sens_at_star", report.sens_at_star},
                             {"spec_at_star", report.spec_at_star}};
      std::cout << summary.dump(2) << '\n';
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "report.json", to_json(report).dump(2) + "\n");
        std::ostringstream roc_body;
        write_roc_csv(roc_body, roc(report.pairs));
        write_file(fs::path(out_dir) / "roc.csv", roc_body.str());
        std::ostringstream pairs_body;
        write_pairs_csv(pairs_body, report);
        write_file(fs::path(out_dir) / "pairs.csv", pairs_body.str());
      }
      return 0;
    }
    if (*sweep_cmd) {
      const Panel panel = load_data(sweep_data, sweep_synth_seed, sweep_start);
      std::vector<SamplerSpec> grid;
      for (const auto& s : sweep_specs) grid.push_back(parse_spec(s));
      EvalOptions opts;
      opts.jobs = jobs;
      const SweepTable table = rate_sweep(panel, grid, sweep_repeats, sweep_k, seed.value_or(0), Recipe{}, opts);
      std::ostringstream body;
      write_sweep_csv(body, table);
      if (out_dir.empty()) {
        std::cout << body.str();
      } else {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "sweep.csv", body.str());
        write_file(fs::path(out_dir) / "sweep.json", to_json(table).dump(2) + "\n");
      }
      for (const auto& row : table.rows)
        if (!row.error.empty()) std::cerr << row.spec << ": " << row.error << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
