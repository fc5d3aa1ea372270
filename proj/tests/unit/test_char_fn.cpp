#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracstab/char_fn.hpp"
#include "fracstab/error.hpp"
#include "support.hpp"

using namespace fracstab;
using namespace fracstab::testing;

namespace {

constexpr double kPi = std::numbers::pi;

void check_terms(const GeneralCharFn& q, const std::vector<Term>& expected, double tol) {
  REQUIRE(q.terms().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(q.terms()[i].exponent - expected[i].exponent) <= 1e-12);
    CHECK(std::abs(q.terms()[i].coefficient - expected[i].coefficient) <= tol);
  }
}

}  // namespace

TEST_CASE("example with four middle terms expands to the printed quasi-polynomial") {
  const auto s = example3();
  const GeneralCharFn q = build_general(s.order, s.matrix);
  check_terms(q, {{1.2, 1.0}, {0.8, 3.0}, {0.7, 3.0}, {0.4, 0.5}, {0.0, 0.75}}, 1e-12);
  const SimpleCharFn simple = to_simple(q);
  CHECK(simple.beta == std::array<double, 4>{0.4, 0.7, 0.8, 1.2});
  CHECK(simple.a == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(simple.b == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(simple.c == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(simple.d == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("zero-diagonal example keeps a single middle term") {
  const auto s = example13();
  const GeneralCharFn q = build_general(s.order, s.matrix);
  check_terms(q, {{1.2, 1.0}, {0.5, -0.2}, {0.0, 0.1}}, 1e-12);
  const SimpleCharFn simple = to_simple(q);
  CHECK(simple.c == doctest::Approx(0.2));
  CHECK(simple.beta[0] == doctest::Approx(0.5));
  CHECK(simple.a == 0.0);
  CHECK(simple.b == 0.0);
  CHECK(simple.d == doctest::Approx(-0.1));
  CHECK(eval(q, Complex{1.0, 0.0}).real() == doctest::Approx(0.9));
}

TEST_CASE("zero matrix gives the pure power") {
  MultiOrderSystem s;
  s.order.alpha = {0.2, 0.9, 0.6};
  const GeneralCharFn q = build_general(s.order, s.matrix);
  check_terms(q, {{1.7, 1.0}, {0.0, 0.0}}, 0.0);
}

TEST_CASE("generic matrices are not reducible") {
  MultiOrderSystem s;
  s.order.alpha = {0.3, 0.5, 0.9};
  s.matrix.a = {{{-1.0, 0.3, 0.2}, {0.4, -2.0, 0.7}, {0.1, 0.6, -1.5}}};
  const GeneralCharFn q = build_general(s.order, s.matrix);
  CHECK(q.middle_terms().size() == 6);
  CHECK_FALSE(try_simple(q).has_value());
  CHECK_THROWS_AS((void)to_simple(q), Error);
}

TEST_CASE("term expansion agrees with the complex determinant") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    MultiOrderSystem s;
    s.order.alpha = {rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)};
    for (auto& row : s.matrix.a) {
      for (double& v : row) v = rng.coin(0.3) ? 0.0 : rng.uniform(-2.0, 2.0);
    }
    const GeneralCharFn q = build_general(s.order, s.matrix);
    const Complex z = std::polar(rng.uniform(0.01, 20.0), rng.uniform(-kPi, kPi));
    const Complex ref = det_reference(s.order, s.matrix, z);
    const double scale = 1.0 + std::pow(std::abs(z), s.order.sum()) * 30.0;
    CHECK(std::abs(eval(q, z) - ref) <= 1e-11 * scale);
  }
}

TEST_CASE("conjugate symmetry Q(conj s) = conj Q(s)") {
  Rng rng(7);
  const auto s = example3();
  const GeneralCharFn q = build_general(s.order, s.matrix);
  for (int i = 0; i < 500; ++i) {
    const Complex z = std::polar(rng.uniform(0.001, 100.0), rng.uniform(-kPi + 1e-9, kPi - 1e-9));
    const Complex lhs = eval(q, std::conj(z));
    const Complex rhs = std::conj(eval(q, z));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("axis evaluation matches the generic evaluator and the limits at zero") {
  const GeneralCharFn q = build_general(example3().order, example3().matrix);
  for (double w : {1e-3, 0.1, 1.0, 7.5, 300.0}) {
    const Complex a = eval_on_axis(q, w);
    const Complex b = eval(q, Complex{0.0, w});
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
  }
  const SimpleCharFn simple = to_simple(q);
  CHECK(h1(simple, 1e-14) == doctest::Approx(-simple.d).epsilon(1e-4));
  CHECK(std::abs(h2(simple, 1e-14)) < 1e-4);
}

TEST_CASE("principal branch powers") {
  CHECK(std::abs(principal_pow({-1.0, 0.0}, 0.5) - Complex{0.0, 1.0}) < 1e-15);
  CHECK(principal_pow({0.0, 0.0}, 0.7) == Complex{0.0, 0.0});
  CHECK(principal_pow({0.0, 0.0}, 0.0) == Complex{1.0, 0.0});
  CHECK(eval(q_of({{1.2, 1.0}, {0.0, 1.0}}), Complex{1.0, 0.0}).real() == doctest::Approx(2.0));
}

TEST_CASE("sine ratios follow their definition") {
  SimpleCharFn q;
  q.beta = {0.5, 0.5, 0.5, 1.2};
  q.c = 0.2;
  q.d = -0.1;
  const RhoSet r = rho_set(q);
  CHECK(r.rho[0] == doctest::Approx(std::sin(0.35 * kPi) / std::sin(0.6 * kPi)));
  CHECK(r.rho[0] == doctest::Approx(0.93686).epsilon(1e-5));
  CHECK(r.rho_tilde[0] == doctest::Approx(0.74350).epsilon(1e-5));

  q.beta[3] = 2.0;
  try {
    (void)rho_set(q);
    FAIL("expected Beta4EqualsTwo");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Beta4EqualsTwo);
  }
}

TEST_CASE("leading coefficient must be one") {
  CHECK_THROWS_AS((void)GeneralCharFn::from_terms({{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
  const GeneralCharFn merged = GeneralCharFn::from_terms({{1.0, 1.0}, {0.5, 0.25}, {0.5 + 1e-14, 0.25}, {0.0, 1.0}});
  REQUIRE(merged.terms().size() == 3);
  CHECK(merged.terms()[1].coefficient == doctest::Approx(0.5));
}

TEST_CASE("relabeling the equations leaves Q unchanged") {
  Rng rng(99);
  const std::array<std::array<std::size_t, 3>, 5> perms = {
      {{0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int i = 0; i < 100; ++i) {
    MultiOrderSystem s;
    s.order.alpha = {rng.tenth(1, 10), rng.tenth(1, 10), rng.tenth(1, 10)};
    for (auto& row : s.matrix.a) {
      for (double& v : row) v = rng.coin(0.3) ? 0.0 : rng.uniform(-2.0, 2.0);
    }
    const GeneralCharFn q = build_general(s.order, s.matrix);
    for (const auto& p : perms) {
      MultiOrderSystem t;
      for (std::size_t a = 0; a < 3; ++a) {
        t.order.alpha[a] = s.order.alpha[p[a]];
        for (std::size_t b = 0; b < 3; ++b) t.matrix(a, b) = s.matrix(p[a], p[b]);
      }
      const GeneralCharFn qt = build_general(t.order, t.matrix);
      REQUIRE(qt.terms().size() == q.terms().size());
      for (std::size_t k = 0; k < q.terms().size(); ++k) {
        CHECK(qt.terms()[k].exponent == doctest::Approx(q.terms()[k].exponent));
        CHECK(qt.terms()[k].coefficient == doctest::Approx(q.terms()[k].coefficient).epsilon(1e-12));
      }
    }
  }
}
