#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rarepred {

using TimeIndex = std::int64_t;

// One (individual, time, covariates, outcome) row of a longitudinal panel.
struct ObservationRecord {
  std::string individual_id;
  TimeIndex time_index = 0;
  std::vector<double> covariates;
  int outcome = 0;

  friend bool operator==(const ObservationRecord&, const ObservationRecord&) = default;
};

// Longitudinal panel: ordered covariate schema, records sorted by
// (time_index, individual_id) and the time indices at which predictions are
// made (horizons). Records before the first horizon form the seed history.
// Immutable after construction.
class Panel {
 public:
  Panel() = default;
  Panel(std::vector<std::string> schema, std::vector<ObservationRecord> records,
        std::vector<TimeIndex> horizon_boundaries);

  const std::vector<std::string>& schema() const noexcept { return schema_; }
  const std::vector<ObservationRecord>& records() const noexcept { return records_; }
  const std::vector<TimeIndex>& horizon_boundaries() const noexcept { return horizons_; }

  std::size_t size() const noexcept { return records_.size(); }
  const ObservationRecord& operator[](std::size_t i) const { return records_[i]; }

  // True for records later than the last horizon (never scored by any protocol).
  bool historical_only(std::size_t i) const;

  std::vector<std::size_t> indices_before(TimeIndex t) const;
  std::vector<std::size_t> indices_at(TimeIndex t) const;
  // Records whose time index is one of the horizons.
  std::vector<std::size_t> horizon_indices() const;

  // Distinct individual ids, lexicographic order.
  std::vector<std::string> individuals() const;

  std::optional<std::size_t> covariate_index(const std::string& name) const;

 private:
  std::vector<std::string> schema_;
  std::vector<ObservationRecord> records_;
  std::vector<TimeIndex> horizons_;
};

struct SchemaConfig {
  std::string id_column = "id";
  std::string time_column = "time";
  std::string outcome_column = "outcome";
  // Empty: every other header column, in header order.
  std::vector<std::string> covariate_columns;
  char delimiter = ',';
  // First prediction horizon. Every distinct time index >= this value becomes a
  // horizon. When unset, default_evaluation_start() is used.
  std::optional<TimeIndex> evaluation_start;
};

// Distinct time at the 75th percentile of the distinct time indices.
TimeIndex default_evaluation_start(const std::vector<TimeIndex>& times);

Panel read_csv(std::istream& in, const SchemaConfig& config);
Panel ingest_csv(const std::string& path, const SchemaConfig& config);

// Writes [id, time, outcome, covariates...] with shortest round-trip doubles.
void write_csv(std::ostream& out, const Panel& panel, char delimiter = ',');
void emit_csv(const std::string& path, const Panel& panel, char delimiter = ',');

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace rarepred
