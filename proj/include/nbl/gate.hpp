#pragma once

// The acceptance battery at desk scale. Criteria 1-3 take their geometry
// (u, β, flux) from the run config at the pinned resolutions n = 32, 48;
// everything else uses pinned configurations.

#include <functional>
#include <string>
#include <vector>

#include "nbl/config.hpp"

namespace nbl {

enum class Status { Pass, Fail, Inapplicable };

const char* to_string(Status s);

struct CriterionResult {
  int id = 0;
  std::string name;
  Status status = Status::Fail;
  std::string detail;
  double seconds = 0.0;
  Json data;
};

struct GateReport {
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;
  bool ok() const;
};

// Tolerances and budgets, pinned.
namespace gate_limits {
inline constexpr double kCoveringFraction = 0.99;
inline constexpr double kLandauTolCoarse = 0.05;   // n = 48
inline constexpr double kLandauTolFine = 0.02;     // n = 96
inline constexpr double kGaugeRelative = 1e-10;
inline constexpr double kFdRelative = 1e-4;
inline constexpr double kFdEpsilon = 1e-4;
inline constexpr double kRichardsonEpsilon = 1e-2;
inline constexpr double kRichardsonLow = 3.5;
inline constexpr double kRichardsonHigh = 4.5;
inline constexpr double kPureGaugeShift = 1e-10;
inline constexpr double kConformalIdentity = 1e-8;
inline constexpr double kSplitFraction = 0.95;
inline constexpr int kSplitSeeds = 20;
inline constexpr double kSplitEpsilon = 1e-2;
inline constexpr double kPureGaugeGap = 1e-10;
inline constexpr double kMarginRatio = 0.6;
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kBudgetTwoDomain = 300.0;
inline constexpr double kBudgetLandau = 180.0;
inline constexpr double kBudgetSmoke3d = 600.0;
}  // namespace gate_limits

// Runs criterion `id` (1..10).
CriterionResult run_criterion(int id, const RunConfig& cfg);

// `progress` is called after each criterion.
GateReport run_gate(const RunConfig& cfg,
                    const std::function<void(const CriterionResult&)>& progress = {});

Json to_json(const GateReport& r, const RunConfig& cfg);

}  // namespace nbl
