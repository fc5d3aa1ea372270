#pragma once

// Shared fixtures, random instance generators and independent reference
// computations for the test binaries.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "fracstab/char_fn.hpp"
#include "fracstab/model.hpp"

namespace fracstab::testing {

inline MultiOrderSystem example3() {
  MultiOrderSystem s;
  s.order.alpha = {0.4, 0.3, 0.5};
  s.matrix.a = {{{-3.0, 0.0, 1.5}, {-0.5, 0.0, 0.5}, {6.0, -1.0, -3.0}}};
  s.x0 = {1.0, -2.0, 2.0};
  return s;
}

inline MultiOrderSystem example13() {
  MultiOrderSystem s;
  s.order.alpha = {0.4, 0.3, 0.5};
  s.matrix.a = {{{0.0, 1.0, -1.0}, {0.2, 0.0, 0.0}, {0.0, 0.5, 0.0}}};
  s.x0 = {1.0, -2.0, 2.0};
  return s;
}

inline ForcingSpec example13_forcing() {
  ForcingSpec f;
  for (std::size_t k = 0; k < 3; ++k) {
    f.components[k] = forcing::PiecewisePower{1.0, 1.0, -2.0 * static_cast<double>(k + 1)};
  }
  return f;
}

inline NonlinearitySpec quadratic_x1x2() {
  NonlinearitySpec n;
  for (auto& t : n.terms) t.push_back(PolyTerm{1.0, {1, 1, 0}});
  return n;
}

inline GeneralCharFn q_of(std::vector<Term> terms) { return GeneralCharFn::from_terms(std::move(terms)); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  /// Multiple of 1/10 in [lo, hi] (tenths).
  double tenth(int lo, int hi) { return integer(lo, hi) / 10.0; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// det(diag(s^alpha) - A) by cofactor expansion of the complex matrix.
inline Complex det_reference(const MultiOrder& order, const SystemMatrix& A, Complex s) {
  std::array<std::array<Complex, 3>, 3> m{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = -A(i, j);
    m[i][i] += std::pow(s, order.alpha[i]);
  }
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Determinant as the signed sum over all six permutations.
inline double det_permutations(const SystemMatrix& A) {
  const int p[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  double s = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double prod = A(0, p[k][0]) * A(1, p[k][1]) * A(2, p[k][2]);
    s += k < 3 ? prod : -prod;
  }
  return s;
}

struct RootCount {
  int rhp = 0;
  bool ambiguous = false;
};

/// Zeros of Q in Re s > 0 when every exponent is a multiple of 1/m:
/// with z = s^{1/m} on the principal branch Q becomes a polynomial P(z), the
/// sheet is |arg z| <= pi/m and the right half plane is |arg z| < pi/(2m).
/// Roots are eigenvalues of the companion matrix.
inline std::optional<RootCount> rhp_zeros_by_polynomial(const GeneralCharFn& q, int m) {
  std::vector<std::pair<int, double>> powers;
  int degree = 0;
  for (const auto& t : q.terms()) {
    const double e = t.exponent * m;
    const int k = static_cast<int>(std::lround(e));
    if (std::abs(e - k) > 1e-9) return std::nullopt;
    powers.emplace_back(k, t.coefficient);
    degree = std::max(degree, k);
  }
  std::vector<double> coef(static_cast<std::size_t>(degree) + 1, 0.0);  // coef[k] z^k
  for (const auto& [k, c] : powers) coef[static_cast<std::size_t>(k)] += c;
  const double lead = coef.back();

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) C(i, degree - 1) = -coef[static_cast<std::size_t>(i)] / lead;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C.cast<std::complex<double>>());

  const double pi = std::numbers::pi;
  const double rhp_edge = pi / (2.0 * m);
  RootCount out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z) < 1e-9) continue;
    const double a = std::abs(std::arg(z));
    if (std::abs(a - rhp_edge) < 1e-6) out.ambiguous = true;
    if (a < rhp_edge) ++out.rhp;
  }
  return out;
}

/// Matrix satisfying the three defining equalities of `pattern`, with the
/// remaining entries random. conditions: 0..2 = a_kk = 0, 3..5 = principal
/// minor excluding index k - 3 vanishes.
inline SystemMatrix matrix_with_conditions(Rng& rng, const std::array<int, 3>& conditions) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SystemMatrix A;
    for (auto& row : A.a) {
      for (double& v : row) v = rng.coin(0.15) ? 0.0 : rng.uniform(-2.0, 2.0);
    }
    for (int c : conditions) {
      if (c < 3) A(static_cast<std::size_t>(c), static_cast<std::size_t>(c)) = 0.0;
    }
    bool ok = true;
    for (int c : conditions) {
      if (c < 3) continue;
      // minor excluding k involves indices i < j, both != k: a_ii a_jj = a_ij a_ji
      const std::size_t k = static_cast<std::size_t>(c - 3);
      const std::size_t i = k == 0 ? 1 : 0;
      const std::size_t j = k == 2 ? 1 : 2;
      if (A(j, i) != 0.0) {
        A(i, j) = A(i, i) * A(j, j) / A(j, i);
      } else if (A(i, j) != 0.0) {
        A(j, i) = A(i, i) * A(j, j) / A(i, j);
      } else if (A(i, i) * A(j, j) != 0.0) {
        ok = false;
      }
    }
    // Diagonal zeros set earlier must survive the minor adjustments (only
    // off-diagonal entries were touched), so all equalities now hold.
    if (ok) return A;
  }
  return SystemMatrix{};
}

/// Quadrinomial with tenth-valued exponents, b4 in [0.5, 1.9], biased towards
/// the sign patterns the stability lemmas address; d is drawn around the
/// relevant threshold so both outcomes occur.
inline SimpleCharFn random_simple(Rng& rng) {
  SimpleCharFn q;
  const int top = rng.integer(5, 19);
  q.beta[3] = top / 10.0;
  std::array<int, 3> e{};
  do {
    e = {rng.integer(1, top - 1), rng.integer(1, top - 1), rng.integer(1, top - 1)};
    std::sort(e.begin(), e.end());
  } while (e[0] == e[1] || e[1] == e[2]);
  for (std::size_t k = 0; k < 3; ++k) q.beta[k] = e[k] / 10.0;

  auto pos = [&] { return rng.uniform(0.05, 3.0); };
  auto neg = [&] { return -rng.uniform(0.0, 3.0); };
  const int pattern = rng.integer(0, 7);
  switch (pattern) {
    case 0: q.a = neg(); q.b = neg(); q.c = neg(); break;
    case 1: q.c = pos(); break;
    case 2: q.a = pos(); break;
    case 3: q.b = pos(); break;
    case 4: q.b = pos(); q.c = pos(); break;
    case 5: q.a = pos(); q.c = pos(); break;
    case 6: q.a = pos(); q.b = pos(); break;
    default:
      q.a = rng.uniform(-2.0, 2.0);
      q.b = rng.uniform(-2.0, 2.0);
      q.c = rng.uniform(-2.0, 2.0);
      break;
  }
  // Rough magnitude of the lemma thresholds: mass^(b4 / gap).
  const double mass = std::abs(q.a) + std::abs(q.b) + std::abs(q.c);
  const double scale = std::max(0.05, std::pow(1.0 + mass, 2.0));
  q.d = rng.coin(0.1) ? rng.uniform(0.01, 1.0) : -rng.uniform(0.0, 1.0) * scale;
  if (q.d == 0.0) q.d = -0.5;
  return q;
}

}  // namespace fracstab::testing
