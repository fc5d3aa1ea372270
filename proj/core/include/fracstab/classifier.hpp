#pragma once

// The twenty coefficient patterns under which three of the six middle
// coefficients of Q vanish. Each pattern is a triple of equalities drawn from
//
//   a11 = 0, a22 = 0, a33 = 0,
//   a22 a33 = a23 a32, a11 a33 = a13 a31, a11 a22 = a12 a21,
//
// together with a closed-form prediction of the surviving exponents
// (beta1, beta2, beta3). Coefficients themselves are never taken from the
// patterns; they come from the structurally reduced Q (extract_simple). The
// patterns serve as an explanation layer and as a cross-check on exponents.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracstab/char_fn.hpp"
#include "fracstab/model.hpp"

namespace fracstab {

inline constexpr int kCaseCount = 20;

struct ConditionCheck {
  std::string label;  // e.g. "a22 a33 = a23 a32"
  double residual = 0.0;
};

struct CaseMatch {
  int case_id = 0;
  std::vector<ConditionCheck> conditions;
  std::array<double, 3> predicted_beta{};
  double conditions_residual = 0.0;
  /// (a, b, c) where the pattern pins them down (cases 1 and 20).
  std::optional<std::array<double, 3>> predicted_coefficients;
};

/// Tolerance on the defining equalities for a given matrix.
[[nodiscard]] double case_equality_tol(const SystemMatrix& matrix) noexcept;

/// Evaluates one pattern regardless of whether it matches.
[[nodiscard]] CaseMatch evaluate_case(int case_id, const MultiOrder& order, const SystemMatrix& matrix);

/// Every pattern whose equalities hold within tolerance, sorted by case id.
[[nodiscard]] std::vector<CaseMatch> classify(const MultiOrder& order, const SystemMatrix& matrix);

/// Structural reduction of Q; throws Error{NotReducible}.
[[nodiscard]] SimpleCharFn extract_simple(const MultiOrder& order, const SystemMatrix& matrix);

/// True when every middle exponent present in `simple` is one of the
/// exponents predicted by `match` (within the exponent merge tolerance).
[[nodiscard]] bool exponents_consistent(const CaseMatch& match, const SimpleCharFn& simple) noexcept;

struct ClassificationReport {
  std::vector<CaseMatch> matches;
  std::optional<SimpleCharFn> simple;  // empty when Q is not reducible
  /// One line per matched pattern comparing its predicted exponents with Q.
  std::vector<std::string> cross_checks;
  /// The subset of cross_checks where the prediction disagrees with Q.
  std::vector<std::string> discrepancies;
};

[[nodiscard]] ClassificationReport classify_report(const MultiOrder& order, const SystemMatrix& matrix);

}  // namespace fracstab
