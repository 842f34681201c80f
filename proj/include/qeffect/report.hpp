#pragma once

#include "qeffect/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qeffect {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "qeffect";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Verdict { Pass, Fail };
enum class Linearity { Linear, Antilinear };

const char* to_string(Verdict v);
const char* to_string(Linearity k);

/// Inputs that violated a predicate, with the measured residual. Replaying
/// `inputs` through the same check reproduces the violation.
struct Witness {
  std::string check;
  std::uint64_t trial = 0;
  double residual = 0.0;
  std::vector<std::pair<std::string, Matrix>> inputs;
};

struct MapReport {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double max_residual = 0.0;
  std::size_t violations = 0;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// Per-trial sample of one sub-check, reduced into a MapReport.
struct TrialSample {
  double residual = 0.0;
  bool violated = false;
  Witness witness;  // filled only when violated
};

/// Folds samples of one sub-check into the report: tracks the largest
/// residual, counts violations and keeps the worst violating witness
/// (earliest trial on ties).
void absorb(MapReport& report, const std::string& check, const std::vector<TrialSample>& samples);

enum class StageVerdict { Pass, Fail, Skipped, Info };
const char* to_string(StageVerdict v);

struct StageResult {
  std::string name;
  StageVerdict verdict = StageVerdict::Pass;
  double residual = 0.0;
  std::string message;
  std::vector<Witness> witnesses;
  Json data = Json::object();
};

enum class FinalVerdict { CertifiedAutomorphism, Refuted, HypothesisDegenerate };
const char* to_string(FinalVerdict v);

struct FinalResult {
  FinalVerdict verdict = FinalVerdict::Refuted;
  std::string stage;  // first failing stage for Refuted
  Linearity kind = Linearity::Linear;
  Matrix unitary;     // implementing operator for certified results
};

struct ClassificationReport {
  std::string pipeline;
  std::uint64_t seed = 0;
  Eigen::Index dim = 0;
  Json config = Json::object();
  std::vector<StageResult> stages;
  FinalResult final;
  bool anomaly = false;

  bool certified() const { return final.verdict == FinalVerdict::CertifiedAutomorphism; }
  const StageResult* stage(const std::string& name) const;
};

}  // namespace qeffect
