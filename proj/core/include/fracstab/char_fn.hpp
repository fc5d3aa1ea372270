#pragma once

// Fractional characteristic function Q(s) = det(diag(s^a1, s^a2, s^a3) - A).
//
// Expanded, Q is a sum of at most eight powers of s,
//
//   Q(s) = s^(a1+a2+a3) - a11 s^(a2+a3) - a22 s^(a1+a3) - a33 s^(a1+a2)
//        + m1 s^a1 + m2 s^a2 + m3 s^a3 - det A,
//
// where m_k is the principal 2x2 minor of A that excludes row/column k.
// When at most three middle terms survive, Q has the quadrinomial form
//
//   Q(s) = s^b4 - a s^b3 - b s^b2 - c s^b1 - d,   0 < b1 <= b2 <= b3 < b4.
//
// All complex powers use the principal branch, arg s in (-pi, pi].

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fracstab/model.hpp"

namespace fracstab {

using Complex = std::complex<double>;

/// Two exponents closer than this are the same power of s.
inline constexpr double kExponentMergeTol = 1e-12;

struct Term {
  double exponent = 0.0;
  double coefficient = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Q as an exponent -> coefficient list. Exponents are distinct and strictly
/// decreasing; the first term has coefficient 1 and the last is the constant.
class GeneralCharFn {
 public:
  /// Sorts, merges equal exponents and drops coefficients with magnitude at
  /// most `zero_tol` (the leading and constant terms are always kept). The
  /// highest power must end up with coefficient 1.
  static GeneralCharFn from_terms(std::vector<Term> terms, double zero_tol = 1e-12);

  [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
  [[nodiscard]] double leading_exponent() const noexcept { return terms_.front().exponent; }
  [[nodiscard]] double constant() const noexcept { return terms_.back().coefficient; }
  /// Q(0) = -det A, so det A is recovered from the constant term.
  [[nodiscard]] double det() const noexcept { return -constant(); }
  /// Terms with exponent strictly between 0 and the leading exponent, highest first.
  [[nodiscard]] std::vector<Term> middle_terms() const;
  [[nodiscard]] double zero_tol() const noexcept { return zero_tol_; }
  /// Sum of absolute coefficients, excluding the leading one.
  [[nodiscard]] double coefficient_mass() const noexcept;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const GeneralCharFn&, const GeneralCharFn&) = default;

 private:
  std::vector<Term> terms_;
  double zero_tol_ = 1e-12;
};

/// Quadrinomial form. Slot k (0-based) pairs beta[k] with the coefficient
/// c, b, a for k = 0, 1, 2; an absent term has coefficient exactly 0.
struct SimpleCharFn {
  std::array<double, 4> beta{};
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double zero_tol = 1e-12;

  [[nodiscard]] double slot_coefficient(std::size_t k) const noexcept {
    return k == 0 ? c : k == 1 ? b : a;
  }
  [[nodiscard]] bool slot_present(std::size_t k) const noexcept;

  [[nodiscard]] GeneralCharFn to_general() const;

  friend bool operator==(const SimpleCharFn&, const SimpleCharFn&) = default;
};

/// Sine ratios rho_i = sin((b4-b_i)pi/2)/sin(b4 pi/2), rho~_i = sin(b_i pi/2)/sin(b4 pi/2).
struct RhoSet {
  std::array<double, 3> rho{};
  std::array<double, 3> rho_tilde{};
};

/// Coefficient drop tolerance used for a given matrix.
[[nodiscard]] double coefficient_zero_tol(const SystemMatrix& matrix) noexcept;

[[nodiscard]] GeneralCharFn build_general(const MultiOrder& order, const SystemMatrix& matrix);

/// nullopt when more than three middle terms survive merging.
[[nodiscard]] std::optional<SimpleCharFn> try_simple(const GeneralCharFn& q);
/// Throws Error{NotReducible}.
[[nodiscard]] SimpleCharFn to_simple(const GeneralCharFn& q);

/// Principal-branch power; 0^beta = 0 for beta > 0 and 1 for beta == 0.
[[nodiscard]] Complex principal_pow(Complex s, double beta) noexcept;

[[nodiscard]] Complex eval(const GeneralCharFn& q, Complex s) noexcept;
[[nodiscard]] Complex eval(const SimpleCharFn& q, Complex s) noexcept;

/// Q(i omega) for omega > 0 using exact cos/sin of the axis angle and
/// compensated summation: real part h1, imaginary part h2.
[[nodiscard]] Complex eval_on_axis(const GeneralCharFn& q, double omega) noexcept;

[[nodiscard]] double h1(const SimpleCharFn& q, double omega) noexcept;
[[nodiscard]] double h2(const SimpleCharFn& q, double omega) noexcept;

/// Throws Error{Beta4EqualsTwo}.
[[nodiscard]] RhoSet rho_set(const SimpleCharFn& q);

}  // namespace fracstab
