#include "fracstab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracstab/error.hpp"

namespace fracstab {

namespace {

enum class Cond { D1, D2, D3, M1, M2, M3 };

struct CaseDef {
  std::array<Cond, 3> conditions;
  std::array<double, 3> (*beta)(const Vec3& al, const std::array<std::size_t, 3>& j);
};

// Exponent formulas exactly as tabulated for each pattern; al = (a1, a2, a3)
// in equation order, j = sorting permutation.
constexpr std::array<CaseDef, kCaseCount> kCases = {{
    {{Cond::D1, Cond::D2, Cond::D3},
     [](const Vec3& al, const auto& j) -> std::array<double, 3> {
       return {al[j[0]], al[j[1]], al[j[2]]};
     }},
    {{Cond::D1, Cond::D2, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[1], al[2]);
       const double b3 = std::max(al[0] + al[1], al[2]);
       return {b1, al[0] + 2 * al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D1, Cond::D2, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0], al[2]);
       const double b3 = std::max(al[0] + al[1], al[2]);
       return {b1, 2 * al[0] + al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D1, Cond::D2, Cond::M3},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {std::min(al[0], al[1]), std::max(al[0], al[1]), al[0] + al[1]};
     }},
    {{Cond::D1, Cond::D3, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[1], al[2]);
       const double b3 = std::max(al[0] + al[2], al[1]);
       return {b1, al[0] + al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::D1, Cond::D3, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {std::min(al[0], al[2]), std::max(al[0], al[2]), al[0] + al[2]};
     }},
    {{Cond::D1, Cond::D3, Cond::M3},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0], al[1]);
       const double b3 = std::max(al[0] + al[2], al[1]);
       return {b1, 2 * al[0] + al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D2, Cond::D3, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {std::min(al[1], al[2]), std::max(al[1], al[2]), al[1] + al[2]};
     }},
    {{Cond::D2, Cond::D3, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0], al[2]);
       const double b3 = std::max(al[0], al[1] + al[2]);
       return {b1, al[0] + al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::D2, Cond::D3, Cond::M3},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0], al[1]);
       const double b3 = std::max(al[0], al[1] + al[2]);
       return {b1, al[0] + 2 * al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D1, Cond::M1, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0] + al[1], al[2]);
       const double b3 = std::max(al[0] + al[1], al[0] + al[2]);
       return {b1, 2 * al[0] + al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::D1, Cond::M3, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {al[0], std::min(al[0] + al[1], al[0] + al[2]), std::max(al[0] + al[1], al[0] + al[2])};
     }},
    {{Cond::D1, Cond::M3, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0] + al[2], al[1]);
       const double b3 = std::max(al[0] + al[1], al[0] + al[2]);
       return {b1, 2 * al[0] + 2 * al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D2, Cond::M1, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0] + al[1], al[2]);
       const double b3 = std::max(al[1] + al[2], al[0] + al[1]);
       return {b1, al[0] + 2 * al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::D2, Cond::M3, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[1] + al[2], al[0]);
       const double b3 = std::max(al[0] + al[1], al[1] + al[2]);
       return {b1, 2 * al[0] + 2 * al[1] + al[2] - b1 - b3, b3};
     }},
    {{Cond::D2, Cond::M3, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {al[1], std::min(al[0] + al[1], al[1] + al[2]), std::max(al[1] + al[2], al[0] + al[1])};
     }},
    {{Cond::D3, Cond::M1, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       return {al[2], std::min(al[1] + al[2], al[0] + al[2]), std::max(al[0] + al[2], al[1] + al[2])};
     }},
    {{Cond::D3, Cond::M3, Cond::M2},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[1] + al[2], al[0]);
       const double b3 = std::max(al[0] + al[2], al[1] + al[2]);
       return {b1, 2 * al[0] + al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::D3, Cond::M3, Cond::M1},
     [](const Vec3& al, const auto&) -> std::array<double, 3> {
       const double b1 = std::min(al[0] + al[2], al[1]);
       const double b3 = std::max(al[0] + al[2], al[1] + al[2]);
       return {b1, al[0] + 2 * al[1] + 2 * al[2] - b1 - b3, b3};
     }},
    {{Cond::M1, Cond::M2, Cond::M3},
     [](const Vec3& al, const auto& j) -> std::array<double, 3> {
       return {al[j[0]] + al[j[1]], al[j[0]] + al[j[2]], al[j[1]] + al[j[2]]};
     }},
}};

std::string label(Cond c) {
  switch (c) {
    case Cond::D1: return "a11 = 0";
    case Cond::D2: return "a22 = 0";
    case Cond::D3: return "a33 = 0";
    case Cond::M1: return "a22 a33 = a23 a32";
    case Cond::M2: return "a11 a33 = a13 a31";
    case Cond::M3: return "a11 a22 = a12 a21";
  }
  return {};
}

double residual(Cond c, const SystemMatrix& A) {
  switch (c) {
    case Cond::D1: return A(0, 0);
    case Cond::D2: return A(1, 1);
    case Cond::D3: return A(2, 2);
    case Cond::M1: return A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    case Cond::M2: return A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
    case Cond::M3: return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  }
  return 0.0;
}

}  // namespace

double case_equality_tol(const SystemMatrix& matrix) noexcept {
  const double n = matrix.frobenius_norm();
  return 1e-10 * (1.0 + n * n);
}

CaseMatch evaluate_case(int case_id, const MultiOrder& order, const SystemMatrix& matrix) {
  if (case_id < 1 || case_id > kCaseCount) {
    throw std::out_of_range("case id must be in 1.." + std::to_string(kCaseCount));
  }
  const CaseDef& def = kCases[static_cast<std::size_t>(case_id - 1)];
  const auto j = order.sorted_indices();

  CaseMatch m;
  m.case_id = case_id;
  for (Cond c : def.conditions) {
    const double r = residual(c, matrix);
    m.conditions.push_back({label(c), r});
    m.conditions_residual = std::max(m.conditions_residual, std::abs(r));
  }
  m.predicted_beta = def.beta(order.alpha, j);

  const SystemMatrix& A = matrix;
  if (case_id == 1) {
    m.predicted_coefficients = std::array<double, 3>{A(j[0], j[1]) * A(j[1], j[0]),
                                                     A(j[0], j[2]) * A(j[2], j[0]),
                                                     A(j[1], j[2]) * A(j[2], j[1])};
  } else if (case_id == kCaseCount) {
    m.predicted_coefficients = std::array<double, 3>{A(j[0], j[0]), A(j[1], j[1]), A(j[2], j[2])};
  }
  return m;
}

std::vector<CaseMatch> classify(const MultiOrder& order, const SystemMatrix& matrix) {
  const double tol = case_equality_tol(matrix);
  std::vector<CaseMatch> out;
  for (int id = 1; id <= kCaseCount; ++id) {
    CaseMatch m = evaluate_case(id, order, matrix);
    if (m.conditions_residual <= tol) out.push_back(std::move(m));
  }
  return out;
}

SimpleCharFn extract_simple(const MultiOrder& order, const SystemMatrix& matrix) {
  return to_simple(build_general(order, matrix));
}

bool exponents_consistent(const CaseMatch& match, const SimpleCharFn& simple) noexcept {
  for (std::size_t k = 0; k < 3; ++k) {
    if (!simple.slot_present(k)) continue;
    const bool found = std::any_of(match.predicted_beta.begin(), match.predicted_beta.end(),
                                   [&](double b) { return std::abs(b - simple.beta[k]) <= kExponentMergeTol; });
    if (!found) return false;
  }
  return true;
}

ClassificationReport classify_report(const MultiOrder& order, const SystemMatrix& matrix) {
  ClassificationReport report;
  report.matches = classify(order, matrix);
  report.simple = try_simple(build_general(order, matrix));
  if (!report.simple) return report;
  for (const auto& m : report.matches) {
    const bool ok = exponents_consistent(m, *report.simple);
    std::ostringstream msg;
    msg.precision(12);
    msg << "case #" << m.case_id << " predicts beta = (" << m.predicted_beta[0] << ", "
        << m.predicted_beta[1] << ", " << m.predicted_beta[2] << "), Q has middle exponents {";
    bool first = true;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!report.simple->slot_present(k)) continue;
      msg << (first ? "" : ", ") << report.simple->beta[k];
      first = false;
    }
    msg << (ok ? "}: consistent" : "}: inconsistent, the structural exponents are used");
    report.cross_checks.push_back(msg.str());
    if (!ok) report.discrepancies.push_back(msg.str());
  }
  return report;
}

}  // namespace fracstab
