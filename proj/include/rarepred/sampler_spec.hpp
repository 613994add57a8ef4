#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rarepred {

enum class SamplerKind {
  UnderRandom,
  OverRandom,
  CaseControl,
  Smote,
  TomekClean,
  BootstrapMajority,
  BootstrapMinority,
  BootstrapStratified,
};

struct SamplerStage {
  SamplerKind kind = SamplerKind::UnderRandom;
  double rate = 0.0;  // UnderRandom: share of majority rows removed, in [0, 1)
  int a = 1;          // OverRandom: a non-events for b events
  int b = 1;
  int k = 5;          // Smote: neighbours
  int m = 1;          // Smote: synthetic rows per event and pass

  static SamplerStage under(double rate);
  static SamplerStage over(int a, int b);
  static SamplerStage case_control();
  static SamplerStage smote(int k, int m);
  static SamplerStage tomek();
  static SamplerStage boot_majority();
  static SamplerStage boot_minority();
  static SamplerStage boot_stratified();

  friend bool operator==(const SamplerStage&, const SamplerStage&) = default;
};

// A resampling strategy: stages applied left to right. Empty chain = identity.
struct SamplerSpec {
  std::vector<SamplerStage> chain;

  bool is_identity() const noexcept { return chain.empty(); }
  // True when applying the spec consumes no randomness.
  bool is_deterministic() const noexcept;

  friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

// Validates stage parameters; throws Error(OutOfRange).
void validate(const SamplerStage& stage);

// Grammar (whitespace allowed between tokens):
//   spec := atom ("+" atom)*
//   atom := "under(" float ")" | "over(" int ":" int ")" | "smote(k=" int ",m=" int ")"
//         | "cc" | "tomek" | "boot(" ("maj" | "min" | "strat") ")" | "id"
// Throws ParseError with the byte offset of the offending token.
SamplerSpec parse_spec(std::string_view text);

// Canonical text form; parse_spec(to_string(s)) == s.
std::string to_string(const SamplerSpec& spec);
std::string to_string(const SamplerStage& stage);

// Warnings for chains that do not undersample first (e.g. "over(1:1)+under(0.5)").
std::vector<std::string> order_warnings(const SamplerSpec& spec);

}  // namespace rarepred
