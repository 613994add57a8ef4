#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rarepred/error.hpp"
#include "rarepred/panel.hpp"
#include "rarepred/synth.hpp"
#include "rarepred/validation.hpp"

namespace rarepred {

struct ProtocolChoice {
  Protocol protocol = Protocol::Longitudinal;
  // Split only; unset means the first horizon.
  std::optional<TimeIndex> boundary;
};

std::string to_string(const ProtocolChoice& choice);
// "longitudinal", "loocv", "split" or "split:<boundary>".
ProtocolChoice parse_protocol(const std::string& text);

enum class Artifact { ReportJson, SweepCsv, RocCsv, AggregationCurveCsv };

struct RecipeConfig {
  Recipe recipe;
  // Unset: derived from the experiment seed and the recipe index.
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  // Exactly one of csv / synth.
  std::optional<std::string> csv;
  SchemaConfig schema;
  std::optional<SynthConfig> synth;
  std::uint64_t seed = 0;
  std::vector<RecipeConfig> recipes;
  std::vector<ProtocolChoice> protocols;
  std::size_t repeats = 1;
  std::string outputs = "out";
  std::vector<Artifact> emit = {Artifact::ReportJson};
  std::size_t jobs = 1;
};

// Throws ParseError (ConfigParse) with a byte offset into `text`.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Canonical form of every field that affects results (outputs and jobs excluded).
nlohmann::json semantic_json(const ExperimentConfig& config);
// FNV-1a 64 of semantic_json(config).dump(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Base seed of recipe `index`, and of repeat `repeat` of that recipe.
std::uint64_t recipe_seed(const ExperimentConfig& config, std::size_t index);
std::uint64_t repeat_seed(const ExperimentConfig& config, std::size_t index, std::size_t repeat);

Panel load_panel(const ExperimentConfig& config);

struct RecipeFailure {
  std::string recipe;
  std::string protocol;
  std::string code;
  std::string message;
};

struct RunResult {
  std::vector<std::filesystem::path> artifacts;
  std::vector<RecipeFailure> failures;
  std::filesystem::path manifest;
  // 0 when every recipe succeeded, otherwise 4.
  int exit_status = 0;
};

// Runs every recipe x protocol x repeat and writes the requested artifacts plus
// manifest.json into config.outputs. A failing recipe is recorded and the rest
// keep running. Input and config errors propagate as exceptions.
RunResult run(const ExperimentConfig& config);

// Process exit code for an error: 2 config, 3 data, 4 computation.
int exit_code(const Error& error) noexcept;

}  // namespace rarepred
