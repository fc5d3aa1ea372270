#pragma once

// Algebraic stability and instability tests for Q and their aggregation.
//
// Every check returns a CriterionResult: `applicable` says whether the
// structural hypotheses of the test hold (sign pattern, exponent ranges,
// gating inequalities), `verdict` what the test concludes. Threshold
// inequalities on d are evaluated after applicability, so a test can be
// applicable and still yield NoConclusion.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracstab/char_fn.hpp"
#include "fracstab/model.hpp"

namespace fracstab {

enum class CriterionId { Thm2a, Thm2b, Thm4, Lem7, Lem8, Lem9a, Lem9b, Lem10i, Lem10ii, Lem10iii };

enum class Verdict { Stable, Unstable, NotAsymptoticallyStable, NoConclusion };

enum class Overall { Stable, Unstable, NotAsymptoticallyStable, Inconclusive };

[[nodiscard]] std::string_view to_string(CriterionId id) noexcept;
[[nodiscard]] std::string_view to_string(Verdict v) noexcept;
[[nodiscard]] std::string_view to_string(Overall v) noexcept;

struct CriterionResult {
  CriterionId id = CriterionId::Thm2a;
  bool applicable = false;
  Verdict verdict = Verdict::NoConclusion;
  /// Named values the decision was based on, e.g. {"d", -0.1}, {"threshold", -0.048}.
  std::vector<std::pair<std::string, double>> witness;
  /// Why the test is not applicable, or which inequality decided it.
  std::string note;

  [[nodiscard]] std::optional<double> witness_value(std::string_view name) const;
};

/// Winding-number cross-check attached to a report.
struct OracleSummary {
  std::optional<int> rhp_zero_count;
  bool axis_zero = false;
  std::string status;  // "ok" or the oracle error description
};

struct StabilityReport {
  std::vector<CriterionResult> results;
  Overall overall = Overall::Inconclusive;
  std::optional<SimpleCharFn> simple;
  std::optional<OracleSummary> oracle;

  /// Ids of applicable results whose verdict is not NoConclusion.
  [[nodiscard]] std::vector<CriterionId> fired() const;
};

/// Theorem-2 family on the general form: det A > 0 is unstable, det A = 0 is
/// not asymptotically stable (reported under Thm2a), and the sum-of-orders >= 2
/// sign pattern is unstable (Thm2b).
[[nodiscard]] std::vector<CriterionResult> check_thm2(const GeneralCharFn& q);

[[nodiscard]] CriterionResult check_thm4(const SimpleCharFn& q);
[[nodiscard]] CriterionResult check_lem7(const SimpleCharFn& q);
/// Lem8, Lem9a, Lem9b. Throws Error{Beta4EqualsTwo} when b4 = 2.
[[nodiscard]] std::vector<CriterionResult> check_lem8_9(const SimpleCharFn& q);
/// Lem10i, Lem10ii, Lem10iii. Throws Error{Beta4EqualsTwo} when b4 = 2.
[[nodiscard]] std::vector<CriterionResult> check_lem10(const SimpleCharFn& q);

/// Overall verdict from a list of results; throws Error{InternalContradiction}
/// when a Stable result fires together with Unstable or NotAsymptoticallyStable.
[[nodiscard]] Overall aggregate(const std::vector<CriterionResult>& results);

struct AssessOptions {
  bool run_oracle = true;
  /// Throw Error{CriterionOracleMismatch} instead of only recording it.
  bool throw_on_mismatch = true;
};

/// Runs every criterion applicable to Q, aggregates, and optionally attaches
/// the winding-number count.
[[nodiscard]] StabilityReport assess(const GeneralCharFn& q, const AssessOptions& options = {});

/// Same pipeline for a system (validated first).
[[nodiscard]] StabilityReport assess(const MultiOrderSystem& sys, const AssessOptions& options = {});

/// Describes a disagreement between fired criteria and the oracle, if any.
[[nodiscard]] std::optional<std::string> oracle_mismatch(const StabilityReport& report);

}  // namespace fracstab
