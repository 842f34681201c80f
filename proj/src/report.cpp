#include "qeffect/report.hpp"

namespace qeffect {

const char* to_string(Verdict v) { return v == Verdict::Pass ? "pass" : "fail"; }

const char* to_string(Linearity k) { return k == Linearity::Linear ? "linear" : "antilinear"; }

const char* to_string(StageVerdict v) {
  switch (v) {
    case StageVerdict::Pass: return "pass";
    case StageVerdict::Fail: return "fail";
    case StageVerdict::Skipped: return "skipped";
    case StageVerdict::Info: return "info";
  }
  return "unknown";
}

const char* to_string(FinalVerdict v) {
  switch (v) {
    case FinalVerdict::CertifiedAutomorphism: return "certified_automorphism";
    case FinalVerdict::Refuted: return "refuted";
    case FinalVerdict::HypothesisDegenerate: return "hypothesis_degenerate";
  }
  return "unknown";
}

void absorb(MapReport& report, const std::string& check, const std::vector<TrialSample>& samples) {
  const TrialSample* worst = nullptr;
  for (const auto& s : samples) {
    report.max_residual = std::max(report.max_residual, s.residual);
    if (!s.violated) continue;
    ++report.violations;
    if (worst == nullptr || s.residual > worst->residual) worst = &s;
  }
  if (worst != nullptr) {
    Witness w = worst->witness;
    w.check = check;
    report.witnesses.push_back(std::move(w));
    report.verdict = Verdict::Fail;
  }
}

const StageResult* ClassificationReport::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace qeffect
