#include "rarepred/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "rarepred/error.hpp"
#include "rarepred/parallel.hpp"
#include "rarepred/random.hpp"

namespace rarepred {

namespace {

using nlohmann::json;

// Semantic errors carry the offset of the first occurrence of the offending
// key (or value) in the document; 0 when it cannot be located.
struct ConfigReader {
  const std::string& text;

  std::size_t locate(const std::string& needle) const {
    const auto pos = text.find('"' + needle + '"');
    return pos == std::string::npos ? 0 : pos;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& reason) const {
    throw ParseError(locate(key), reason);
  }

  template <class T>
  T get(const json& obj, const std::string& key, const std::string& where) const {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, where + "/" + key + ": missing or wrong type");
    }
  }
  template <class T>
  void optional(const json& obj, const std::string& key, T& field, const std::string& where) const {
    if (obj.contains(key)) field = get<T>(obj, key, where);
  }
  void expect_object(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.is_object()) fail(key, where + ": expected an object");
  }
  void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) const {
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(key, where + ": unknown key '" + key + "'");
    }
  }
};

FitControl parse_fit(const ConfigReader& r, const json& obj, const std::string& where) {
  r.expect_object(obj, "fit", where);
  r.reject_unknown(obj, {"max_iterations", "tolerance", "divergence_bound", "pivot_tolerance"}, where);
  FitControl c;
  r.optional(obj, "max_iterations", c.max_iterations, where);
  r.optional(obj, "tolerance", c.tolerance, where);
  r.optional(obj, "divergence_bound", c.divergence_bound, where);
  r.optional(obj, "pivot_tolerance", c.pivot_tolerance, where);
  if (c.max_iterations < 1) r.fail("max_iterations", where + "/max_iterations: must be >= 1");
  if (!(c.tolerance > 0.0)) r.fail("tolerance", where + "/tolerance: must be > 0");
  return c;
}

EncodeOptions parse_encode(const ConfigReader& r, const json& obj, const std::string& where) {
  r.expect_object(obj, "encode", where);
  r.reject_unknown(obj, {"reference", "standardize", "individual_effects"}, where);
  EncodeOptions e;
  if (obj.contains("reference")) {
    const auto ref = r.get<std::string>(obj, "reference", where);
    if (ref == "lexicographic") e.reference_policy = ReferencePolicy::Lexicographic;
    else if (ref == "first_seen") e.reference_policy = ReferencePolicy::FirstSeen;
    else {
      e.reference_policy = ReferencePolicy::Named;
      e.reference_id = ref;
    }
  }
  r.optional(obj, "standardize", e.standardize, where);
  r.optional(obj, "individual_effects", e.individual_effects, where);
  return e;
}

DistanceOptions parse_distance(const ConfigReader& r, const json& obj, const std::string& where) {
  r.expect_object(obj, "distance", where);
  r.reject_unknown(obj, {"include_all_columns", "standardize"}, where);
  DistanceOptions d;
  r.optional(obj, "include_all_columns", d.include_all_columns, where);
  r.optional(obj, "standardize", d.standardize, where);
  return d;
}

json fit_json(const FitControl& c) {
  return {{"max_iterations", c.max_iterations},
          {"tolerance", c.tolerance},
          {"divergence_bound", c.divergence_bound},
          {"pivot_tolerance", c.pivot_tolerance}};
}

json encode_json(const EncodeOptions& e) {
  std::string ref = e.reference_policy == ReferencePolicy::Lexicographic ? "lexicographic"
                    : e.reference_policy == ReferencePolicy::FirstSeen   ? "first_seen"
                                                                         : e.reference_id;
  return {{"reference", ref}, {"standardize", e.standardize}, {"individual_effects", e.individual_effects}};
}

json schema_json(const SchemaConfig& s) {
  json doc{{"id_column", s.id_column},
           {"time_column", s.time_column},
           {"outcome_column", s.outcome_column},
           {"covariate_columns", s.covariate_columns},
           {"delimiter", std::string(1, s.delimiter)}};
  doc["evaluation_start"] = s.evaluation_start ? json(*s.evaluation_start) : json(nullptr);
  return doc;
}

const char* artifact_name(Artifact a) {
  switch (a) {
    case Artifact::ReportJson: return "report_json";
    case Artifact::SweepCsv: return "sweep_csv";
    case Artifact::RocCsv: return "roc_csv";
    case Artifact::AggregationCurveCsv: return "aggregation_curve_csv";
  }
  return "?";
}

bool wants(const ExperimentConfig& c, Artifact a) {
  for (auto e : c.emit)
    if (e == a) return true;
  return false;
}

std::string file_token(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                      ch == '_' || ch == '.';
    out += keep ? ch : '_';
  }
  return out;
}

std::string protocol_token(const ProtocolChoice& p) {
  std::string s = to_string(p.protocol);
  if (p.boundary) s += "-" + std::to_string(*p.boundary);
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InputError, "cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw Error(Errc::InputError, "failed writing '" + path.string() + "'");
}

}  // namespace

std::string to_string(const ProtocolChoice& choice) {
  std::string s = to_string(choice.protocol);
  if (choice.boundary) s += ":" + std::to_string(*choice.boundary);
  return s;
}

ProtocolChoice parse_protocol(const std::string& text) {
  ProtocolChoice p;
  if (text == "longitudinal") p.protocol = Protocol::Longitudinal;
  else if (text == "loocv") p.protocol = Protocol::Loocv;
  else if (text == "split") p.protocol = Protocol::Split;
  else if (text.rfind("split:", 0) == 0) {
    p.protocol = Protocol::Split;
    const std::string num = text.substr(6);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (num.empty() || used != num.size()) throw ParseError(6, "expected an integer split boundary");
    p.boundary = static_cast<TimeIndex>(v);
  } else {
    throw ParseError(0, "unknown protocol '" + text + "' (expected longitudinal, loocv or split[:t])");
  }
  return p;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte > 0 ? e.byte - 1 : 0, e.what());
  }
  ConfigReader r{text};
  if (!doc.is_object()) throw ParseError(0, "top level must be an object");
  r.reject_unknown(doc, {"seed", "input", "recipes", "protocols", "repeats", "outputs", "emit", "jobs"}, "");

  ExperimentConfig c;
  r.optional(doc, "seed", c.seed, "");
  r.optional(doc, "repeats", c.repeats, "");
  r.optional(doc, "outputs", c.outputs, "");
  r.optional(doc, "jobs", c.jobs, "");
  if (c.repeats < 1) r.fail("repeats", "/repeats: must be >= 1");
  if (c.jobs < 1) r.fail("jobs", "/jobs: must be >= 1");

  if (!doc.contains("input")) throw ParseError(0, "/input: missing");
  const json& input = doc.at("input");
  r.expect_object(input, "input", "/input");
  r.reject_unknown(input, {"csv", "schema", "synth"}, "/input");
  if (input.contains("csv") == input.contains("synth")) r.fail("input", "/input: give exactly one of csv, synth");
  if (input.contains("csv")) {
    c.csv = r.get<std::string>(input, "csv", "/input");
    if (input.contains("schema")) {
      const json& s = input.at("schema");
      const std::string where = "/input/schema";
      r.expect_object(s, "schema", where);
      r.reject_unknown(s, {"id_column", "time_column", "outcome_column", "covariate_columns", "delimiter",
                           "evaluation_start"},
                       where);
      r.optional(s, "id_column", c.schema.id_column, where);
      r.optional(s, "time_column", c.schema.time_column, where);
      r.optional(s, "outcome_column", c.schema.outcome_column, where);
      r.optional(s, "covariate_columns", c.schema.covariate_columns, where);
      if (s.contains("delimiter")) {
        const auto d = r.get<std::string>(s, "delimiter", where);
        if (d.size() != 1) r.fail("delimiter", where + "/delimiter: must be one character");
        c.schema.delimiter = d[0];
      }
      if (s.contains("evaluation_start")) c.schema.evaluation_start = r.get<TimeIndex>(s, "evaluation_start", where);
    }
  } else {
    if (input.contains("schema")) r.fail("schema", "/input/schema: only valid with csv input");
    const json& s = input.at("synth");
    r.expect_object(s, "synth", "/input/synth");
    r.reject_unknown(s, {"n_individuals", "n_horizons", "seed_history_horizons", "roster_size_per_horizon",
                         "late_entrants", "target_event_rate", "slopes", "individual_effects", "individual_effect_sd",
                         "frailty_persistence", "frailty_sd", "covariate_dynamics", "recovery_bump", "relapse_bump",
                         "calibration_horizons", "seed"},
                     "/input/synth");
    try {
      c.synth = synth_config_from_json(s);
      validate(*c.synth);
    } catch (const json::exception& e) {
      r.fail("synth", std::string("/input/synth: ") + e.what());
    } catch (const Error& e) {
      r.fail("synth", std::string("/input/synth: ") + e.what());
    }
  }

  if (!doc.contains("recipes") || !doc.at("recipes").is_array() || doc.at("recipes").empty())
    r.fail("recipes", "/recipes: need a non-empty array");
  std::size_t index = 0;
  for (const json& item : doc.at("recipes")) {
    const std::string where = "/recipes/" + std::to_string(index++);
    r.expect_object(item, "recipes", where);
    r.reject_unknown(item, {"name", "spec", "K", "seed", "fit", "encode", "distance", "max_attempts"}, where);
    RecipeConfig rc;
    Recipe& rec = rc.recipe;
    rec.name = r.get<std::string>(item, "name", where);
    const auto spec_text = r.get<std::string>(item, "spec", where);
    try {
      rec.spec = parse_spec(spec_text);
    } catch (const ParseError& e) {
      const auto at = text.find('"' + spec_text + '"');
      const std::size_t base = at == std::string::npos ? 0 : at + 1;
      throw ParseError(base + e.position(), where + "/spec: " + e.reason());
    } catch (const Error& e) {
      r.fail(spec_text, where + "/spec: " + e.what());
    }
    r.optional(item, "K", rec.K, where);
    if (rec.K < 1) r.fail("K", where + "/K: must be >= 1");
    if (item.contains("seed")) rc.seed = r.get<std::uint64_t>(item, "seed", where);
    if (item.contains("fit")) rec.control = parse_fit(r, item.at("fit"), where + "/fit");
    if (item.contains("encode")) rec.encode = parse_encode(r, item.at("encode"), where + "/encode");
    if (item.contains("distance")) rec.distance = parse_distance(r, item.at("distance"), where + "/distance");
    r.optional(item, "max_attempts", rec.max_attempts, where);
    if (rec.max_attempts < 1) r.fail("max_attempts", where + "/max_attempts: must be >= 1");
    for (const auto& other : c.recipes)
      if (other.recipe.name == rec.name) r.fail(rec.name, where + "/name: duplicate recipe name '" + rec.name + "'");
    c.recipes.push_back(std::move(rc));
  }

  if (!doc.contains("protocols") || !doc.at("protocols").is_array() || doc.at("protocols").empty())
    r.fail("protocols", "/protocols: need a non-empty array");
  for (const json& item : doc.at("protocols")) {
    if (!item.is_string()) r.fail("protocols", "/protocols: entries must be strings");
    const auto name = item.get<std::string>();
    try {
      c.protocols.push_back(parse_protocol(name));
    } catch (const ParseError& e) {
      const auto at = text.find('"' + name + '"');
      throw ParseError(at == std::string::npos ? 0 : at + 1 + e.position(), "/protocols: " + e.reason());
    }
  }

  if (doc.contains("emit")) {
    if (!doc.at("emit").is_array()) r.fail("emit", "/emit: expected an array");
    c.emit.clear();
    for (const json& item : doc.at("emit")) {
      const auto name = item.is_string() ? item.get<std::string>() : std::string();
      bool found = false;
      for (auto a : {Artifact::ReportJson, Artifact::SweepCsv, Artifact::RocCsv, Artifact::AggregationCurveCsv}) {
        if (name == artifact_name(a)) {
          found = true;
          bool dup = false;
          for (auto e : c.emit) dup = dup || e == a;
          if (!dup) c.emit.push_back(a);
        }
      }
      if (!found) r.fail(name.empty() ? "emit" : name, "/emit: unknown artifact '" + name + "'");
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InputError, "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

json semantic_json(const ExperimentConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["repeats"] = c.repeats;
  if (c.csv) doc["input"] = {{"csv", *c.csv}, {"schema", schema_json(c.schema)}};
  else doc["input"] = {{"synth", to_json(*c.synth)}};
  doc["recipes"] = json::array();
  for (const auto& rc : c.recipes) {
    const Recipe& r = rc.recipe;
    json j{{"name", r.name},
           {"spec", to_string(r.spec)},
           {"K", r.K},
           {"fit", fit_json(r.control)},
           {"encode", encode_json(r.encode)},
           {"distance", {{"include_all_columns", r.distance.include_all_columns}, {"standardize", r.distance.standardize}}},
           {"max_attempts", r.max_attempts}};
    j["seed"] = rc.seed ? json(*rc.seed) : json(nullptr);
    doc["recipes"].push_back(std::move(j));
  }
  doc["protocols"] = json::array();
  for (const auto& p : c.protocols) doc["protocols"].push_back(to_string(p));
  doc["emit"] = json::array();
  for (auto a : c.emit) doc["emit"].push_back(artifact_name(a));
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = semantic_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t recipe_seed(const ExperimentConfig& config, std::size_t index) {
  const auto& rc = config.recipes.at(index);
  return rc.seed ? *rc.seed : derive_seed(config.seed, {index});
}

std::uint64_t repeat_seed(const ExperimentConfig& config, std::size_t index, std::size_t repeat) {
  return derive_seed(recipe_seed(config, index), {repeat});
}

Panel load_panel(const ExperimentConfig& config) {
  if (config.synth) return generate(*config.synth);
  if (!config.csv) throw Error(Errc::InputError, "config has no input");
  return ingest_csv(*config.csv, config.schema);
}

int exit_code(const Error& error) noexcept {
  switch (category(error.code())) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Computation: return 4;
  }
  return 4;
}

RunResult run(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const Panel panel = load_panel(config);
  const std::filesystem::path out_dir(config.outputs);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::InputError, "cannot create output directory '" + out_dir.string() + "': " + ec.message());

  const std::size_t n_rec = config.recipes.size();
  const std::size_t n_proto = config.protocols.size();
  const std::size_t R = config.repeats;
  const bool keep_scores = wants(config, Artifact::AggregationCurveCsv);

  struct Slot {
    std::optional<EvalReport> report;
    std::string code;
    std::string message;
  };
  std::vector<Slot> slots(n_rec * n_proto * R);
  const std::size_t n_tasks = slots.size();
  EvalOptions inner;
  inner.jobs = n_tasks >= config.jobs ? 1 : config.jobs;
  inner.keep_replicate_scores = keep_scores;

  parallel_for(n_tasks, config.jobs, [&](std::size_t task) {
    const std::size_t i = task / (n_proto * R);
    const std::size_t p = (task / R) % n_proto;
    const std::size_t r = task % R;
    Recipe recipe = config.recipes[i].recipe;
    recipe.seed = repeat_seed(config, i, r);
    const ProtocolChoice& proto = config.protocols[p];
    Slot& slot = slots[task];
    try {
      switch (proto.protocol) {
        case Protocol::Longitudinal: slot.report = longitudinal_eval(panel, recipe, inner); break;
        case Protocol::Loocv: slot.report = loocv_eval(panel, recipe, inner); break;
        case Protocol::Split: {
          if (panel.horizon_boundaries().empty()) throw Error(Errc::NoSeedHistory, "panel has no horizons");
          const TimeIndex boundary = proto.boundary ? *proto.boundary : panel.horizon_boundaries().front();
          slot.report = split_eval(panel, boundary, recipe, inner);
          break;
        }
      }
    } catch (const Error& e) {
      slot.code = to_string(e.code());
      slot.message = e.what();
    } catch (const std::exception& e) {
      slot.code = "InternalError";
      slot.message = e.what();
    }
  });

  RunResult result;
  auto slot_at = [&](std::size_t i, std::size_t p, std::size_t r) -> Slot& { return slots[(i * n_proto + p) * R + r]; };
  for (std::size_t i = 0; i < n_rec; ++i)
    for (std::size_t p = 0; p < n_proto; ++p)
      for (std::size_t r = 0; r < R; ++r) {
        const Slot& s = slot_at(i, p, r);
        if (!s.report)
          result.failures.push_back({config.recipes[i].recipe.name, to_string(config.protocols[p]), s.code,
                                     R > 1 ? "repeat " + std::to_string(r) + ": " + s.message : s.message});
      }

  const std::string hash = config_hash(config);

  if (wants(config, Artifact::ReportJson)) {
    json doc;
    doc["config_hash"] = hash;
    doc["recipes"] = json::array();
    for (std::size_t i = 0; i < n_rec; ++i) {
      const Recipe& rec = config.recipes[i].recipe;
      json jr{{"name", rec.name}, {"spec", to_string(rec.spec)}, {"K", rec.K}, {"seed", recipe_seed(config, i)}};
      jr["protocols"] = json::array();
      for (std::size_t p = 0; p < n_proto; ++p) {
        json jp{{"protocol", to_string(config.protocols[p])}};
        std::vector<std::optional<EvalReport>> runs;
        std::vector<std::string> errors;
        jp["repeats"] = json::array();
        for (std::size_t r = 0; r < R; ++r) {
          Slot& s = slot_at(i, p, r);
          json jrep;
          if (s.report) {
            jrep = to_json(*s.report);
          } else {
            jrep["error"] = {{"code", s.code}, {"message", s.message}};
          }
          jrep["seed"] = repeat_seed(config, i, r);
          jp["repeats"].push_back(std::move(jrep));
          runs.push_back(s.report);
          errors.push_back(s.message);
        }
        const SweepRow row = summarize_runs(to_string(rec.spec), runs, errors);
        jp["summary"] = {{"runs", row.runs},
                         {"mean_auc", number_or_null(row.mean_auc)},
                         {"std_auc", number_or_null(row.std_auc)},
                         {"mean_pi", number_or_null(row.mean_pi)},
                         {"std_pi", number_or_null(row.std_pi)}};
        jr["protocols"].push_back(std::move(jp));
      }
      doc["recipes"].push_back(std::move(jr));
    }
    const auto path = out_dir / "report.json";
    write_text(path, doc.dump(2) + "\n");
    result.artifacts.push_back(path);
  }

  if (wants(config, Artifact::SweepCsv)) {
    for (std::size_t p = 0; p < n_proto; ++p) {
      SweepTable table;
      for (std::size_t i = 0; i < n_rec; ++i) {
        std::vector<std::optional<EvalReport>> runs;
        std::vector<std::string> errors;
        for (std::size_t r = 0; r < R; ++r) {
          runs.push_back(slot_at(i, p, r).report);
          errors.push_back(slot_at(i, p, r).message);
        }
        table.rows.push_back(summarize_runs(to_string(config.recipes[i].recipe.spec), runs, errors));
      }
      std::ostringstream body;
      write_sweep_csv(body, table);
      const auto path = out_dir / ("sweep_" + protocol_token(config.protocols[p]) + ".csv");
      write_text(path, body.str());
      result.artifacts.push_back(path);
    }
  }

  if (wants(config, Artifact::RocCsv)) {
    for (std::size_t i = 0; i < n_rec; ++i)
      for (std::size_t p = 0; p < n_proto; ++p) {
        const Slot& s = slot_at(i, p, 0);
        if (!s.report) continue;
        std::ostringstream body;
        try {
          write_roc_csv(body, roc(s.report->pairs));
        } catch (const Error&) {
          continue;  // one-class pairs have no curve
        }
        const auto path = out_dir / ("roc_" + file_token(config.recipes[i].recipe.name) + "_" +
                                     protocol_token(config.protocols[p]) + ".csv");
        write_text(path, body.str());
        result.artifacts.push_back(path);
      }
  }

  if (keep_scores) {
    for (std::size_t i = 0; i < n_rec; ++i)
      for (std::size_t p = 0; p < n_proto; ++p) {
        // Mean curve over the successful repeats, truncated to the shortest one.
        std::vector<std::vector<AggregationPoint>> curves;
        for (std::size_t r = 0; r < R; ++r) {
          const Slot& s = slot_at(i, p, r);
          if (!s.report || s.report->replicate_scores.empty()) continue;
          try {
            curves.push_back(aggregation_curve(*s.report));
          } catch (const Error&) {
          }
        }
        if (curves.empty()) continue;
        std::size_t len = curves.front().size();
        for (const auto& c : curves) len = std::min(len, c.size());
        std::ostringstream body;
        body << "K,auc,peirce\n";
        for (std::size_t k = 0; k < len; ++k) {
          double auc_sum = 0.0;
          double pi_sum = 0.0;
          for (const auto& c : curves) {
            auc_sum += c[k].auc;
            pi_sum += c[k].peirce;
          }
          const double n = static_cast<double>(curves.size());
          body << curves.front()[k].K << ',' << format_double(auc_sum / n) << ',' << format_double(pi_sum / n) << '\n';
        }
        const auto path = out_dir / ("aggregation_" + file_token(config.recipes[i].recipe.name) + "_" +
                                     protocol_token(config.protocols[p]) + ".csv");
        write_text(path, body.str());
        result.artifacts.push_back(path);
      }
  }

  result.exit_status = result.failures.empty() ? 0 : 4;

  json manifest;
  manifest["tool"] = "rarepred";
  manifest["version"] = RAREPRED_VERSION;
  manifest["config_hash"] = hash;
  manifest["config"] = semantic_json(config);
  manifest["seeds"] = json::array();
  for (std::size_t i = 0; i < n_rec; ++i) {
    json js{{"recipe", config.recipes[i].recipe.name}, {"base", recipe_seed(config, i)}};
    js["repeats"] = json::array();
    for (std::size_t r = 0; r < R; ++r) js["repeats"].push_back(repeat_seed(config, i, r));
    manifest["seeds"].push_back(std::move(js));
  }
  manifest["artifacts"] = json::array();
  for (const auto& a : result.artifacts) manifest["artifacts"].push_back(a.filename().string());
  manifest["failures"] = json::array();
  for (const auto& f : result.failures)
    manifest["failures"].push_back(
        {{"recipe", f.recipe}, {"protocol", f.protocol}, {"code", f.code}, {"message", f.message}});
  manifest["exit_status"] = result.exit_status;
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.manifest = out_dir / "manifest.json";
  write_text(result.manifest, manifest.dump(2) + "\n");
  return result;
}

}  // namespace rarepred
