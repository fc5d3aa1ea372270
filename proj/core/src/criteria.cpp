#include "fracstab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracstab/error.hpp"
#include "fracstab/zero_oracle.hpp"

namespace fracstab {

std::string_view to_string(CriterionId id) noexcept {
  switch (id) {
    case CriterionId::Thm2a: return "Thm2a";
    case CriterionId::Thm2b: return "Thm2b";
    case CriterionId::Thm4: return "Thm4";
    case CriterionId::Lem7: return "Lem7";
    case CriterionId::Lem8: return "Lem8";
    case CriterionId::Lem9a: return "Lem9a";
    case CriterionId::Lem9b: return "Lem9b";
    case CriterionId::Lem10i: return "Lem10i";
    case CriterionId::Lem10ii: return "Lem10ii";
    case CriterionId::Lem10iii: return "Lem10iii";
  }
  return "?";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::NotAsymptoticallyStable: return "NotAsymptoticallyStable";
    case Verdict::NoConclusion: return "NoConclusion";
  }
  return "?";
}

std::string_view to_string(Overall v) noexcept {
  switch (v) {
    case Overall::Stable: return "Stable";
    case Overall::Unstable: return "Unstable";
    case Overall::NotAsymptoticallyStable: return "NotAsymptoticallyStable";
    case Overall::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::optional<double> CriterionResult::witness_value(std::string_view name) const {
  for (const auto& [k, v] : witness) {
    if (k == name) return v;
  }
  return std::nullopt;
}

std::vector<CriterionId> StabilityReport::fired() const {
  std::vector<CriterionId> ids;
  for (const auto& r : results) {
    if (r.applicable && r.verdict != Verdict::NoConclusion) ids.push_back(r.id);
  }
  return ids;
}

namespace {

// Coefficients within the drop tolerance count as zero; anything else has a
// definite sign.
int sign_of(double x, double tol) noexcept { return x > tol ? 1 : x < -tol ? -1 : 0; }

// Exponent comparisons allow for rounding in sums of orders.
bool exp_lt(double x, double y) noexcept { return x < y - kExponentMergeTol; }
bool exp_le(double x, double y) noexcept { return x <= y + kExponentMergeTol; }

CriterionResult not_applicable(CriterionId id, std::string note,
                               std::vector<std::pair<std::string, double>> witness = {}) {
  CriterionResult r;
  r.id = id;
  r.note = std::move(note);
  r.witness = std::move(witness);
  return r;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

bool beta4_below_two(const SimpleCharFn& q) {
  if (std::abs(q.beta[3] - 2.0) <= kExponentMergeTol) {
    throw Error(ErrorCode::Beta4EqualsTwo, "rho quantities are undefined for beta4 = 2");
  }
  return q.beta[3] < 2.0;
}

// Present middle exponents strictly increasing and inside (0, beta4).
// Exponents of absent terms are free and can always be placed in the gaps.
bool present_strictly_ordered(const SimpleCharFn& q) {
  double prev = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!q.slot_present(k)) continue;
    if (!exp_lt(prev, q.beta[k])) return false;
    prev = q.beta[k];
  }
  return exp_lt(prev, q.beta[3]);
}

// Single-term threshold  -x rho (x rho~)^(beta/(beta4 - beta)).
double single_term_threshold(double coeff, double rho, double rho_tilde, double beta, double beta4) {
  return -coeff * rho * std::pow(coeff * rho_tilde, beta / (beta4 - beta));
}

}  // namespace

std::vector<CriterionResult> check_thm2(const GeneralCharFn& q) {
  const double tol = q.zero_tol();
  const double det = q.det();
  const double beta4 = q.leading_exponent();
  std::vector<CriterionResult> out;

  CriterionResult a;
  a.id = CriterionId::Thm2a;
  a.witness = {{"det", det}};
  switch (sign_of(det, tol)) {
    case 1:
      a.applicable = true;
      a.verdict = Verdict::Unstable;
      a.note = "det A > 0: Q has a positive real zero";
      break;
    case 0:
      a.applicable = true;
      a.verdict = Verdict::NotAsymptoticallyStable;
      a.note = "det A = 0: Q(0) = 0";
      break;
    default:
      a.note = "det A < 0";
  }
  out.push_back(std::move(a));

  const auto middle = q.middle_terms();
  std::vector<std::pair<std::string, double>> witness = {{"det", det}, {"beta4", beta4},
                                                        {"n", static_cast<double>(middle.size())}};
  if (sign_of(det, tol) >= 0) {
    out.push_back(not_applicable(CriterionId::Thm2b, "requires det A < 0", witness));
    return out;
  }
  if (exp_lt(beta4, 2.0)) {
    out.push_back(not_applicable(CriterionId::Thm2b, "requires sum of orders >= 2", witness));
    return out;
  }
  double cmin = 0.0;
  double cmax = 0.0;
  for (std::size_t k = 0; k < middle.size(); ++k) {
    const double ck = -middle[k].coefficient;
    if (ck < 0.0) {
      out.push_back(not_applicable(CriterionId::Thm2b, "a middle term has c_k < 0", witness));
      return out;
    }
    if (!(middle[k].exponent > 0.0 && exp_lt(middle[k].exponent, 2.0))) {
      out.push_back(not_applicable(CriterionId::Thm2b, "a middle exponent is outside (0, 2)", witness));
      return out;
    }
    cmin = k == 0 ? ck : std::min(cmin, ck);
    cmax = k == 0 ? ck : std::max(cmax, ck);
  }
  witness.emplace_back("c_min", cmin);
  witness.emplace_back("c_max", cmax);
  if (middle.size() < 2 || !(cmax - cmin > tol)) {
    out.push_back(not_applicable(CriterionId::Thm2b, "requires max c_k > min c_k", witness));
    return out;
  }
  CriterionResult b;
  b.id = CriterionId::Thm2b;
  b.applicable = true;
  b.verdict = Verdict::Unstable;
  b.witness = std::move(witness);
  b.note = "h2 < 0 on the whole positive axis; Q has two zeros in the right half plane";
  out.push_back(std::move(b));
  return out;
}

CriterionResult check_thm4(const SimpleCharFn& q) {
  const double tol = q.zero_tol;
  const auto& be = q.beta;
  std::vector<std::pair<std::string, double>> witness = {
      {"a", q.a}, {"b", q.b}, {"c", q.c}, {"d", q.d},
      {"beta4-beta3", be[3] - be[2]},
      {"|beta1+beta3-beta4|", std::abs(be[0] + be[2] - be[3])},
      {"|beta2+beta3-beta4|", std::abs(be[1] + be[2] - be[3])}};
  if (sign_of(q.d, tol) >= 0) return not_applicable(CriterionId::Thm4, "requires d < 0", witness);
  if (sign_of(q.a, tol) > 0 || sign_of(q.b, tol) > 0 || sign_of(q.c, tol) > 0) {
    return not_applicable(CriterionId::Thm4, "requires a, b, c <= 0", witness);
  }
  if (!exp_le(be[0], 1.0) || !exp_le(be[1], 1.0) || !exp_le(be[2], 1.0)) {
    return not_applicable(CriterionId::Thm4, "requires beta1, beta2, beta3 <= 1", witness);
  }
  if (!exp_lt(be[3] - be[2], 1.0)) {
    return not_applicable(CriterionId::Thm4, "requires beta4 - beta3 < 1", witness);
  }
  if (!exp_le(std::abs(be[0] + be[2] - be[3]), 1.0) || !exp_le(std::abs(be[1] + be[2] - be[3]), 1.0)) {
    return not_applicable(CriterionId::Thm4, "requires |beta_i + beta3 - beta4| <= 1", witness);
  }
  CriterionResult r;
  r.id = CriterionId::Thm4;
  r.applicable = true;
  r.verdict = Verdict::Stable;
  r.witness = std::move(witness);
  r.note = "sign and exponent conditions hold";
  return r;
}

CriterionResult check_lem7(const SimpleCharFn& q) {
  const double tol = q.zero_tol;
  std::vector<std::pair<std::string, double>> witness = {
      {"a", q.a}, {"b", q.b}, {"c", q.c}, {"d", q.d}, {"beta4", q.beta[3]}};
  if (!exp_lt(q.beta[3], 2.0)) return not_applicable(CriterionId::Lem7, "requires beta4 < 2", witness);
  if (!present_strictly_ordered(q)) {
    return not_applicable(CriterionId::Lem7, "requires 0 < beta1 < beta2 < beta3 < beta4", witness);
  }
  if (sign_of(q.d, tol) >= 0) return not_applicable(CriterionId::Lem7, "requires d < 0", witness);
  if (sign_of(q.a, tol) > 0 || sign_of(q.b, tol) > 0 || sign_of(q.c, tol) > 0) {
    return not_applicable(CriterionId::Lem7, "requires a, b, c <= 0", witness);
  }
  CriterionResult r;
  r.id = CriterionId::Lem7;
  r.applicable = true;
  r.verdict = Verdict::Stable;
  r.witness = std::move(witness);
  r.note = "h1 > 0 at every root of h2";
  return r;
}

std::vector<CriterionResult> check_lem8_9(const SimpleCharFn& q) {
  const double tol = q.zero_tol;
  const bool below_two = beta4_below_two(q);
  const int sa = sign_of(q.a, tol);
  const int sb = sign_of(q.b, tol);
  const int sc = sign_of(q.c, tol);

  struct Spec {
    CriterionId id;
    bool pattern;
    std::size_t slot;
    double coeff;
    const char* pattern_note;
  };
  const std::array<Spec, 3> specs = {{
      {CriterionId::Lem8, sa == 0 && sb == 0 && sc > 0, 0, q.c, "requires a = b = 0, c > 0"},
      {CriterionId::Lem9a, sb == 0 && sc == 0 && sa > 0, 2, q.a, "requires b = c = 0, a > 0"},
      {CriterionId::Lem9b, sa == 0 && sc == 0 && sb > 0, 1, q.b, "requires a = c = 0, b > 0"},
  }};

  std::vector<CriterionResult> out;
  for (const auto& s : specs) {
    if (!below_two) {
      out.push_back(not_applicable(s.id, "requires beta4 < 2", {{"beta4", q.beta[3]}}));
      continue;
    }
    if (!s.pattern) {
      out.push_back(not_applicable(s.id, s.pattern_note, {{"a", q.a}, {"b", q.b}, {"c", q.c}}));
      continue;
    }
    const RhoSet rho = rho_set(q);
    const double thr =
        single_term_threshold(s.coeff, rho.rho[s.slot], rho.rho_tilde[s.slot], q.beta[s.slot], q.beta[3]);
    CriterionResult r;
    r.id = s.id;
    r.applicable = true;
    r.witness = {{"d", q.d},
                 {"threshold", thr},
                 {"rho", rho.rho[s.slot]},
                 {"rho_tilde", rho.rho_tilde[s.slot]},
                 {"omega0", std::pow(s.coeff * rho.rho_tilde[s.slot], 1.0 / (q.beta[3] - q.beta[s.slot]))}};
    if (q.d < thr) {
      r.verdict = Verdict::Stable;
      r.note = "d = " + fmt(q.d) + " < threshold " + fmt(thr);
    } else {
      r.note = "d = " + fmt(q.d) + " is not below threshold " + fmt(thr);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CriterionResult> check_lem10(const SimpleCharFn& q) {
  const double tol = q.zero_tol;
  const bool below_two = beta4_below_two(q);
  const int sa = sign_of(q.a, tol);
  const int sb = sign_of(q.b, tol);
  const int sc = sign_of(q.c, tol);

  // hi/lo: slots of the two present terms; the gap exponent is beta4 - beta[hi].
  struct Spec {
    CriterionId id;
    bool pattern;
    std::size_t hi;
    std::size_t lo;
    const char* pattern_note;
  };
  const std::array<Spec, 3> specs = {{
      {CriterionId::Lem10i, sa == 0 && sb > 0 && sc > 0, 1, 0, "requires a = 0, b > 0, c > 0"},
      {CriterionId::Lem10ii, sb == 0 && sa > 0 && sc > 0, 2, 0, "requires b = 0, a > 0, c > 0"},
      {CriterionId::Lem10iii, sc == 0 && sa > 0 && sb > 0, 2, 1, "requires c = 0, a > 0, b > 0"},
  }};

  std::vector<CriterionResult> out;
  for (const auto& s : specs) {
    if (!below_two) {
      out.push_back(not_applicable(s.id, "requires beta4 < 2", {{"beta4", q.beta[3]}}));
      continue;
    }
    if (!s.pattern) {
      out.push_back(not_applicable(s.id, s.pattern_note, {{"a", q.a}, {"b", q.b}, {"c", q.c}}));
      continue;
    }
    if (!present_strictly_ordered(q)) {
      out.push_back(not_applicable(s.id, "requires beta1 < beta2 < beta3"));
      continue;
    }
    const RhoSet rho = rho_set(q);
    const double ch = q.slot_coefficient(s.hi);
    const double cl = q.slot_coefficient(s.lo);
    const double gate = ch * rho.rho_tilde[s.hi] + cl * rho.rho_tilde[s.lo];
    std::vector<std::pair<std::string, double>> witness = {{"d", q.d}, {"gate", gate}};
    if (!(gate > 1.0)) {
      out.push_back(not_applicable(s.id, "requires 1 < gate sum, got " + fmt(gate), std::move(witness)));
      continue;
    }
    const double gap = q.beta[3] - q.beta[s.hi];
    const double thr = -ch * std::pow(gate, q.beta[s.hi] / gap) * rho.rho[s.hi] -
                       cl * std::pow(gate, q.beta[s.lo] / gap) * rho.rho[s.lo];
    witness.emplace_back("threshold", thr);
    CriterionResult r;
    r.id = s.id;
    r.applicable = true;
    r.witness = std::move(witness);
    if (q.d <= thr) {
      r.verdict = Verdict::Stable;
      r.note = "d = " + fmt(q.d) + " <= threshold " + fmt(thr);
    } else {
      r.note = "d = " + fmt(q.d) + " exceeds threshold " + fmt(thr);
    }
    out.push_back(std::move(r));
  }
  return out;
}

Overall aggregate(const std::vector<CriterionResult>& results) {
  bool stable = false;
  bool unstable = false;
  bool nas = false;
  for (const auto& r : results) {
    if (!r.applicable) continue;
    stable |= r.verdict == Verdict::Stable;
    unstable |= r.verdict == Verdict::Unstable;
    nas |= r.verdict == Verdict::NotAsymptoticallyStable;
  }
  if (stable && (unstable || nas)) {
    std::string ids;
    for (const auto& r : results) {
      if (r.applicable && r.verdict != Verdict::NoConclusion) {
        ids += std::string(ids.empty() ? "" : ", ") + std::string(to_string(r.id)) + "=" +
               std::string(to_string(r.verdict));
      }
    }
    throw Error(ErrorCode::InternalContradiction, "criteria disagree: " + ids);
  }
  if (unstable) return Overall::Unstable;
  if (nas) return Overall::NotAsymptoticallyStable;
  if (stable) return Overall::Stable;
  return Overall::Inconclusive;
}

std::optional<std::string> oracle_mismatch(const StabilityReport& report) {
  if (!report.oracle) return std::nullopt;
  const OracleSummary& o = *report.oracle;
  for (const auto& r : report.results) {
    if (!r.applicable) continue;
    const std::string id(to_string(r.id));
    if (r.verdict == Verdict::Stable) {
      if (o.axis_zero) return id + " says Stable but the oracle found a zero on the imaginary axis";
      if (o.rhp_zero_count && *o.rhp_zero_count > 0) {
        return id + " says Stable but the oracle counts " + std::to_string(*o.rhp_zero_count) +
               " right-half-plane zeros";
      }
    } else if (r.verdict == Verdict::Unstable && o.rhp_zero_count) {
      if (*o.rhp_zero_count == 0) return id + " says Unstable but the oracle counts no right-half-plane zero";
      if (r.id == CriterionId::Thm2b && *o.rhp_zero_count != 2) {
        return id + " predicts exactly two right-half-plane zeros, oracle counts " +
               std::to_string(*o.rhp_zero_count);
      }
    }
  }
  return std::nullopt;
}

StabilityReport assess(const GeneralCharFn& q, const AssessOptions& options) {
  StabilityReport report;
  report.results = check_thm2(q);
  report.simple = try_simple(q);
  if (report.simple) {
    const SimpleCharFn& s = *report.simple;
    report.results.push_back(check_thm4(s));
    report.results.push_back(check_lem7(s));
    try {
      for (auto& r : check_lem8_9(s)) report.results.push_back(std::move(r));
      for (auto& r : check_lem10(s)) report.results.push_back(std::move(r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Beta4EqualsTwo) throw;
      for (CriterionId id : {CriterionId::Lem8, CriterionId::Lem9a, CriterionId::Lem9b, CriterionId::Lem10i,
                             CriterionId::Lem10ii, CriterionId::Lem10iii}) {
        report.results.push_back(not_applicable(id, "requires beta4 < 2 (beta4 = 2)"));
      }
    }
  }
  report.overall = aggregate(report.results);

  if (options.run_oracle) {
    OracleSummary o;
    if (sign_of(q.constant(), q.zero_tol()) == 0) {
      o.status = "skipped: Q(0) = 0";
    } else {
      try {
        o.rhp_zero_count = count_rhp_zeros(q).zero_count;
        o.status = "ok";
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroOnAxis) o.axis_zero = true;
        o.status = e.what();
      }
    }
    report.oracle = std::move(o);
    if (auto msg = oracle_mismatch(report); msg && options.throw_on_mismatch) {
      throw Error(ErrorCode::CriterionOracleMismatch, *msg);
    }
  }
  return report;
}

StabilityReport assess(const MultiOrderSystem& sys, const AssessOptions& options) {
  const MultiOrderSystem checked = validate(sys);
  return assess(build_general(checked.order, checked.matrix), options);
}

}  // namespace fracstab
