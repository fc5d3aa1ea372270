#include "fracstab/char_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "compensated_sum.hpp"
#include "fracstab/error.hpp"

namespace fracstab {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

}  // namespace

GeneralCharFn GeneralCharFn::from_terms(std::vector<Term> terms, double zero_tol) {
  if (terms.empty()) throw std::invalid_argument("characteristic function needs at least one term");
  for (const auto& t : terms) {
    if (!std::isfinite(t.exponent) || !std::isfinite(t.coefficient) || t.exponent < 0.0) {
      throw std::invalid_argument("terms need finite coefficients and nonnegative exponents");
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& l, const Term& r) { return l.exponent > r.exponent; });

  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().exponent - t.exponent <= kExponentMergeTol) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(t);
    }
  }
  if (merged.back().exponent <= kExponentMergeTol) {
    merged.back().exponent = 0.0;
  } else {
    merged.push_back({0.0, 0.0});
  }
  if (merged.size() < 2 || merged.front().coefficient != 1.0) {
    throw std::invalid_argument("leading coefficient must be exactly 1 with a positive exponent");
  }

  GeneralCharFn q;
  q.zero_tol_ = zero_tol;
  q.terms_.push_back(merged.front());
  for (std::size_t i = 1; i + 1 < merged.size(); ++i) {
    if (std::abs(merged[i].coefficient) > zero_tol) q.terms_.push_back(merged[i]);
  }
  q.terms_.push_back(merged.back());
  return q;
}

std::vector<Term> GeneralCharFn::middle_terms() const {
  return {terms_.begin() + 1, terms_.end() - 1};
}

double GeneralCharFn::coefficient_mass() const noexcept {
  double m = 0.0;
  for (std::size_t i = 1; i < terms_.size(); ++i) m += std::abs(terms_[i].coefficient);
  return m;
}

std::string GeneralCharFn::to_string() const {
  std::ostringstream out;
  out.precision(12);
  bool first = true;
  for (const auto& t : terms_) {
    if (!first && t.coefficient == 0.0) continue;
    double mag = t.coefficient;
    if (first) {
      if (mag < 0.0) {
        out << "-";
        mag = -mag;
      }
    } else {
      out << (mag < 0.0 ? " - " : " + ");
      mag = std::abs(mag);
    }
    if (t.exponent == 0.0) {
      out << mag;
    } else {
      if (mag != 1.0) out << mag << " ";
      out << "s^" << t.exponent;
    }
    first = false;
  }
  return out.str();
}

bool SimpleCharFn::slot_present(std::size_t k) const noexcept {
  return std::abs(slot_coefficient(k)) > zero_tol;
}

GeneralCharFn SimpleCharFn::to_general() const {
  return GeneralCharFn::from_terms(
      {{beta[3], 1.0}, {beta[2], -a}, {beta[1], -b}, {beta[0], -c}, {0.0, -d}}, zero_tol);
}

double coefficient_zero_tol(const SystemMatrix& matrix) noexcept {
  const double n = matrix.frobenius_norm();
  return 1e-12 * (1.0 + n * n);
}

GeneralCharFn build_general(const MultiOrder& order, const SystemMatrix& matrix) {
  const auto& al = order.alpha;
  const SystemMatrix& A = matrix;
  std::vector<Term> terms = {
      {al[0] + al[1] + al[2], 1.0},
      {al[1] + al[2], -A(0, 0)},
      {al[0] + al[2], -A(1, 1)},
      {al[0] + al[1], -A(2, 2)},
      {al[0], A.principal_minor(0)},
      {al[1], A.principal_minor(1)},
      {al[2], A.principal_minor(2)},
      {0.0, -A.det()},
  };
  return GeneralCharFn::from_terms(std::move(terms), coefficient_zero_tol(matrix));
}

std::optional<SimpleCharFn> try_simple(const GeneralCharFn& q) {
  auto middle = q.middle_terms();
  if (middle.size() > 3) return std::nullopt;
  std::reverse(middle.begin(), middle.end());  // ascending exponent

  SimpleCharFn s;
  s.zero_tol = q.zero_tol();
  s.beta[3] = q.leading_exponent();
  s.d = -q.constant();
  std::array<double, 3> coeff{};
  for (std::size_t k = 0; k < 3; ++k) {
    if (k < middle.size()) {
      s.beta[k] = middle[k].exponent;
      coeff[k] = -middle[k].coefficient;
    } else {
      s.beta[k] = middle.empty() ? s.beta[3] / 2.0 : middle.back().exponent;
    }
  }
  s.c = coeff[0];
  s.b = coeff[1];
  s.a = coeff[2];
  return s;
}

SimpleCharFn to_simple(const GeneralCharFn& q) {
  if (auto s = try_simple(q)) return *s;
  throw Error(ErrorCode::NotReducible,
              std::to_string(q.middle_terms().size()) + " middle terms survive in Q(s) = " + q.to_string());
}

Complex principal_pow(Complex s, double beta) noexcept {
  if (beta == 0.0) return {1.0, 0.0};
  const double r = std::abs(s);
  if (r == 0.0) return {0.0, 0.0};
  const double theta = std::arg(s);
  return std::polar(std::pow(r, beta), beta * theta);
}

Complex eval(const GeneralCharFn& q, Complex s) noexcept {
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  for (const auto& t : q.terms()) {
    const Complex v = t.coefficient * principal_pow(s, t.exponent);
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

Complex eval(const SimpleCharFn& q, Complex s) noexcept {
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  const std::array<Term, 5> terms = {
      Term{q.beta[3], 1.0}, Term{q.beta[2], -q.a}, Term{q.beta[1], -q.b}, Term{q.beta[0], -q.c},
      Term{0.0, -q.d}};
  for (const auto& t : terms) {
    const Complex v = t.coefficient * principal_pow(s, t.exponent);
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

namespace {

template <class TermRange>
Complex axis_sum(const TermRange& terms, double omega) noexcept {
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  for (const auto& t : terms) {
    if (t.exponent == 0.0) {
      re.add(t.coefficient);
      continue;
    }
    const double mag = t.coefficient * std::pow(omega, t.exponent);
    re.add(mag * std::cos(t.exponent * kHalfPi));
    im.add(mag * std::sin(t.exponent * kHalfPi));
  }
  return {re.value(), im.value()};
}

std::array<Term, 5> simple_terms(const SimpleCharFn& q) noexcept {
  return {Term{q.beta[3], 1.0}, Term{q.beta[2], -q.a}, Term{q.beta[1], -q.b},
          Term{q.beta[0], -q.c}, Term{0.0, -q.d}};
}

}  // namespace

Complex eval_on_axis(const GeneralCharFn& q, double omega) noexcept {
  return axis_sum(q.terms(), omega);
}

double h1(const SimpleCharFn& q, double omega) noexcept {
  return axis_sum(simple_terms(q), omega).real();
}

double h2(const SimpleCharFn& q, double omega) noexcept {
  return axis_sum(simple_terms(q), omega).imag();
}

RhoSet rho_set(const SimpleCharFn& q) {
  if (std::abs(q.beta[3] - 2.0) <= kExponentMergeTol) {
    throw Error(ErrorCode::Beta4EqualsTwo, "sin(beta4 pi / 2) vanishes for beta4 = 2");
  }
  const double denom = std::sin(q.beta[3] * kHalfPi);
  RhoSet r;
  for (std::size_t i = 0; i < 3; ++i) {
    r.rho[i] = std::sin((q.beta[3] - q.beta[i]) * kHalfPi) / denom;
    r.rho_tilde[i] = std::sin(q.beta[i] * kHalfPi) / denom;
  }
  return r;
}

}  // namespace fracstab
