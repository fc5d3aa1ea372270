#pragma once

// Problem-instance types for three-dimensional multi-order Caputo systems
//
//   D^{alpha_k} x_k(t) = sum_j a_kj x_j(t) + f_k(t) + n_k(x(t)),  x(0) = x0
//
// with alpha_k in (0, 1]. Every other module consumes these types; validate()
// is the single gate that enforces their invariants.

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace fracstab {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// The three differentiation orders, kept in equation order.
struct MultiOrder {
  Vec3 alpha{1.0, 1.0, 1.0};

  [[nodiscard]] double sum() const noexcept { return alpha[0] + alpha[1] + alpha[2]; }
  [[nodiscard]] double min() const noexcept;

  /// Indices (j1, j2, j3) with alpha[j1] <= alpha[j2] <= alpha[j3]; ties keep
  /// the original equation order.
  [[nodiscard]] std::array<std::size_t, 3> sorted_indices() const;

  friend bool operator==(const MultiOrder&, const MultiOrder&) = default;
};

/// Coefficient matrix A; entries are addressed zero-based as (row, column).
struct SystemMatrix {
  Mat3 a{};

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return a[i][j]; }
  [[nodiscard]] double& operator()(std::size_t i, std::size_t j) noexcept { return a[i][j]; }

  [[nodiscard]] double det() const noexcept;
  [[nodiscard]] double frobenius_norm() const noexcept;
  /// Principal 2x2 minor obtained by deleting row and column `k`.
  [[nodiscard]] double principal_minor(std::size_t k) const noexcept;

  friend bool operator==(const SystemMatrix&, const SystemMatrix&) = default;
};

namespace forcing {

struct Zero {
  friend bool operator==(const Zero&, const Zero&) = default;
};

struct Constant {
  double value = 0.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// f(t) = constant_before for t < t_break, t^exponent_after for t >= t_break.
struct PiecewisePower {
  double t_break = 1.0;
  double constant_before = 1.0;
  double exponent_after = -1.0;
  friend bool operator==(const PiecewisePower&, const PiecewisePower&) = default;
};

/// Sampled forcing, linearly interpolated; held constant outside the samples.
struct Table {
  std::vector<std::pair<double, double>> samples;
  friend bool operator==(const Table&, const Table&) = default;
};

}  // namespace forcing

using ForcingComponent =
    std::variant<forcing::Zero, forcing::Constant, forcing::PiecewisePower, forcing::Table>;

[[nodiscard]] double evaluate(const ForcingComponent& f, double t);

struct ForcingSpec {
  std::array<ForcingComponent, 3> components{};

  [[nodiscard]] Vec3 operator()(double t) const;

  /// Algebraic decay exponent eta with |f(t)| = O(t^-eta), when every
  /// component has one (Zero counts as arbitrarily fast). nullopt for
  /// non-decaying kinds.
  [[nodiscard]] std::optional<double> decay_exponent() const;

  friend bool operator==(const ForcingSpec&, const ForcingSpec&) = default;
};

/// coefficient * x1^p1 * x2^p2 * x3^p3
struct PolyTerm {
  double coefficient = 0.0;
  std::array<int, 3> powers{};

  [[nodiscard]] int degree() const noexcept { return powers[0] + powers[1] + powers[2]; }
  friend bool operator==(const PolyTerm&, const PolyTerm&) = default;
};

struct NonlinearitySpec {
  std::array<std::vector<PolyTerm>, 3> terms{};

  [[nodiscard]] Vec3 operator()(const Vec3& x) const;
  /// d n_k / d x_j
  [[nodiscard]] Mat3 jacobian(const Vec3& x) const;
  [[nodiscard]] bool empty() const noexcept;

  friend bool operator==(const NonlinearitySpec&, const NonlinearitySpec&) = default;
};

struct MultiOrderSystem {
  MultiOrder order;
  SystemMatrix matrix;
  std::optional<ForcingSpec> forcing;
  std::optional<NonlinearitySpec> nonlinearity;
  Vec3 x0{};

  friend bool operator==(const MultiOrderSystem&, const MultiOrderSystem&) = default;
};

/// Checks all type invariants and returns the instance unchanged.
/// Throws Error{OrderOutOfRange | NonFiniteEntry | BadForcingTable | BadNonlinearity}.
MultiOrderSystem validate(MultiOrderSystem sys);

void validate_order(const MultiOrder& order);
void validate_matrix(const SystemMatrix& matrix);

}  // namespace fracstab
