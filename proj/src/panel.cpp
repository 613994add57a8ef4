#include "rarepred/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rarepred/error.hpp"

namespace rarepred {

Panel::Panel(std::vector<std::string> schema, std::vector<ObservationRecord> records,
             std::vector<TimeIndex> horizon_boundaries)
    : schema_(std::move(schema)), records_(std::move(records)), horizons_(std::move(horizon_boundaries)) {
  std::unordered_set<std::string> names;
  for (const auto& name : schema_) {
    if (!names.insert(name).second) throw Error(Errc::SchemaMismatch, "duplicate covariate name '" + name + "'");
  }
  for (const auto& r : records_) {
    if (r.outcome != 0 && r.outcome != 1) throw Error(Errc::SchemaMismatch, "outcome must be 0 or 1");
    if (r.covariates.size() != schema_.size())
      throw Error(Errc::SchemaMismatch, "record for '" + r.individual_id + "' has " +
                                            std::to_string(r.covariates.size()) + " covariates, schema has " +
                                            std::to_string(schema_.size()));
    if (r.time_index < 0) throw Error(Errc::SchemaMismatch, "negative time index");
  }
  std::stable_sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) {
    if (a.time_index != b.time_index) return a.time_index < b.time_index;
    return a.individual_id < b.individual_id;
  });
  std::sort(horizons_.begin(), horizons_.end());
  horizons_.erase(std::unique(horizons_.begin(), horizons_.end()), horizons_.end());
}

bool Panel::historical_only(std::size_t i) const {
  return horizons_.empty() || records_[i].time_index > horizons_.back();
}

std::vector<std::size_t> Panel::indices_before(TimeIndex t) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records_.size() && records_[i].time_index < t; ++i) out.push_back(i);
  return out;
}

std::vector<std::size_t> Panel::indices_at(TimeIndex t) const {
  auto lo = std::lower_bound(records_.begin(), records_.end(), t,
                             [](const ObservationRecord& r, TimeIndex v) { return r.time_index < v; });
  std::vector<std::size_t> out;
  for (auto it = lo; it != records_.end() && it->time_index == t; ++it)
    out.push_back(static_cast<std::size_t>(it - records_.begin()));
  return out;
}

std::vector<std::size_t> Panel::horizon_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (std::binary_search(horizons_.begin(), horizons_.end(), records_[i].time_index)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> Panel::individuals() const {
  std::set<std::string> ids;
  for (const auto& r : records_) ids.insert(r.individual_id);
  return {ids.begin(), ids.end()};
}

std::optional<std::size_t> Panel::covariate_index(const std::string& name) const {
  auto it = std::find(schema_.begin(), schema_.end(), name);
  if (it == schema_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - schema_.begin());
}

TimeIndex default_evaluation_start(const std::vector<TimeIndex>& times) {
  std::vector<TimeIndex> distinct(times);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) return 0;
  return distinct[(distinct.size() * 3) / 4];
}

namespace {

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_fields(const std::string& line, char delim, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw MalformedRowError(line_no, "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && begin != end;
}

}  // namespace

Panel read_csv(std::istream& in, const SchemaConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_fields(line, config.delimiter, line_no);
    for (auto& h : header) h = trim(h);
    break;
  }
  if (header.empty()) throw Error(Errc::EmptyPanel, "no header row");

  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::MissingColumn, name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column_of(config.id_column);
  const std::size_t time_col = column_of(config.time_column);
  const std::size_t outcome_col = column_of(config.outcome_column);

  std::vector<std::string> schema = config.covariate_columns;
  if (schema.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != id_col && c != time_col && c != outcome_col) schema.push_back(header[c]);
    }
  }
  std::vector<std::size_t> cov_cols;
  for (const auto& name : schema) cov_cols.push_back(column_of(name));

  std::vector<ObservationRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, config.delimiter, line_no);
    if (fields.size() != header.size())
      throw MalformedRowError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                           std::to_string(fields.size()));
    ObservationRecord rec;
    rec.individual_id = trim(fields[id_col]);
    if (rec.individual_id.empty()) throw MalformedRowError(line_no, "empty individual id");
    const std::string time_text = trim(fields[time_col]);
    if (!parse_number(time_text, rec.time_index) || rec.time_index < 0)
      throw MalformedRowError(line_no, "time index '" + time_text + "' is not a non-negative integer");
    const std::string outcome_text = trim(fields[outcome_col]);
    if (outcome_text == "0") {
      rec.outcome = 0;
    } else if (outcome_text == "1") {
      rec.outcome = 1;
    } else {
      throw MalformedRowError(line_no, "non-binary outcome '" + outcome_text + "'");
    }
    rec.covariates.reserve(cov_cols.size());
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      const std::string text = trim(fields[cov_cols[j]]);
      if (text.empty()) throw MalformedRowError(line_no, "missing value for covariate '" + schema[j] + "'");
      double v = 0.0;
      if (!parse_number(text, v) || !std::isfinite(v))
        throw MalformedRowError(line_no, "non-numeric value '" + text + "' for covariate '" + schema[j] + "'");
      rec.covariates.push_back(v);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw Error(Errc::EmptyPanel, "no data rows");

  std::vector<TimeIndex> times;
  times.reserve(records.size());
  for (const auto& r : records) times.push_back(r.time_index);
  const TimeIndex start = config.evaluation_start.value_or(default_evaluation_start(times));
  std::vector<TimeIndex> horizons;
  for (TimeIndex t : times) {
    if (t >= start) horizons.push_back(t);
  }
  return Panel(std::move(schema), std::move(records), std::move(horizons));
}

Panel ingest_csv(const std::string& path, const SchemaConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InputError, "cannot open '" + path + "'");
  return read_csv(in, config);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos &&
      s.find('\n') == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Panel& panel, char delimiter) {
  out << "id" << delimiter << "time" << delimiter << "outcome";
  for (const auto& name : panel.schema()) out << delimiter << quote_if_needed(name, delimiter);
  out << '\n';
  for (const auto& r : panel.records()) {
    out << quote_if_needed(r.individual_id, delimiter) << delimiter << r.time_index << delimiter << r.outcome;
    for (double v : r.covariates) out << delimiter << format_double(v);
    out << '\n';
  }
}

void emit_csv(const std::string& path, const Panel& panel, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InputError, "cannot write '" + path + "'");
  write_csv(out, panel, delimiter);
}

}  // namespace rarepred
