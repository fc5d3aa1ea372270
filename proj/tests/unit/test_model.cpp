#include <cmath>
#include <limits>

#include "doctest.h"
#include "fracstab/config.hpp"
#include "fracstab/error.hpp"
#include "fracstab/model.hpp"
#include "support.hpp"

using namespace fracstab;
using namespace fracstab::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::BadConfig;
}

}  // namespace

TEST_CASE("orders are validated against (0, 1]") {
  auto s = example3();
  CHECK_NOTHROW((void)validate(s));
  s.order.alpha = {1.2, 0.3, 0.5};
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::OrderOutOfRange);
  s.order.alpha = {0.0, 0.3, 0.5};
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::OrderOutOfRange);

  MultiOrderSystem unit;
  unit.order.alpha = {1.0, 1.0, 1.0};
  CHECK_NOTHROW((void)validate(unit));
}

TEST_CASE("non-finite matrix entries and initial values are rejected") {
  auto s = example3();
  s.matrix(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::NonFiniteEntry);
  s = example3();
  s.x0[0] = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::NonFiniteEntry);
}

TEST_CASE("determinant agrees with the permutation expansion") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    SystemMatrix A;
    for (auto& row : A.a) {
      for (double& v : row) v = rng.uniform(-3.0, 3.0);
    }
    CHECK(A.det() == doctest::Approx(det_permutations(A)).epsilon(1e-12));
  }
  CHECK(example3().matrix.det() == doctest::Approx(-0.75));
  CHECK(example13().matrix.det() == doctest::Approx(-0.1));
}

TEST_CASE("principal minors drop the matching row and column") {
  const auto A = example3().matrix;
  CHECK(A.principal_minor(0) == doctest::Approx(0.0 * -3.0 - 0.5 * -1.0));
  CHECK(A.principal_minor(1) == doctest::Approx(-3.0 * -3.0 - 1.5 * 6.0));
  CHECK(A.principal_minor(2) == doctest::Approx(-3.0 * 0.0 - 0.0 * -0.5));
}

TEST_CASE("sorted indices are stable for ties") {
  MultiOrder o{{0.5, 0.3, 0.5}};
  const auto j = o.sorted_indices();
  CHECK(j == std::array<std::size_t, 3>{1, 0, 2});
  CHECK(o.min() == 0.3);
}

TEST_CASE("piecewise power forcing switches at the break") {
  const ForcingSpec f = example13_forcing();
  CHECK(f(0.5) == Vec3{1.0, 1.0, 1.0});
  const Vec3 v = f(2.0);
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[1] == doctest::Approx(1.0 / 16.0));
  CHECK(v[2] == doctest::Approx(1.0 / 64.0));
  REQUIRE(f.decay_exponent().has_value());
  CHECK(*f.decay_exponent() == doctest::Approx(2.0));
}

TEST_CASE("table forcing interpolates linearly and holds its end values") {
  forcing::Table t{{{0.0, 1.0}, {1.0, 3.0}, {3.0, -1.0}}};
  const ForcingComponent c = t;
  CHECK(evaluate(c, -1.0) == 1.0);
  CHECK(evaluate(c, 0.5) == doctest::Approx(2.0));
  CHECK(evaluate(c, 2.0) == doctest::Approx(1.0));
  CHECK(evaluate(c, 10.0) == -1.0);

  auto s = example3();
  ForcingSpec f;
  f.components[0] = forcing::Table{{{1.0, 0.0}, {0.5, 1.0}}};
  s.forcing = f;
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::BadForcingTable);
}

TEST_CASE("nonlinear terms evaluate with their Jacobian") {
  const NonlinearitySpec n = quadratic_x1x2();
  const Vec3 x{2.0, 3.0, -1.0};
  CHECK(n(x) == Vec3{6.0, 6.0, 6.0});
  const Mat3 J = n.jacobian(x);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(J[k][0] == doctest::Approx(3.0));
    CHECK(J[k][1] == doctest::Approx(2.0));
    CHECK(J[k][2] == doctest::Approx(0.0));
  }
  // Central differences.
  NonlinearitySpec cubic;
  cubic.terms[1].push_back(PolyTerm{0.5, {0, 2, 1}});
  const double h = 1e-6;
  for (std::size_t j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    CHECK(cubic.jacobian(x)[1][j] == doctest::Approx((cubic(xp)[1] - cubic(xm)[1]) / (2 * h)).epsilon(1e-6));
  }

  auto s = example3();
  NonlinearitySpec linear;
  linear.terms[0].push_back(PolyTerm{1.0, {1, 0, 0}});
  s.nonlinearity = linear;
  CHECK(code_of([&] { (void)validate(s); }) == ErrorCode::BadNonlinearity);
}

TEST_CASE("key-value config reads every supported construct") {
  const char* text = R"(# comment
name = "demo"
alpha = [0.4, 0.3,
         0.5]   # multi-line array
matrix = [[-3, 0, 1.5], [-0.5, 0, 0.5], [6, -1, -3]]
x0 = [1, -2, 2]

[forcing]
1 = { kind = "piecewise_power", t_break = 1, before = 1, exponent = -2 }
2 = { kind = "constant", value = 0.5 }
3 = { kind = "table", t = [0, 1, 2], value = [1, 0.5, 0] }

[nonlinearity]
2 = [ { coef = 1_000.0, powers = [1, 1, 0] } ]
)";
  const MultiOrderSystem s = parse_system(text);
  CHECK(s.order.alpha == Vec3{0.4, 0.3, 0.5});
  CHECK(s.matrix == example3().matrix);
  CHECK(s.x0 == Vec3{1.0, -2.0, 2.0});
  REQUIRE(s.forcing.has_value());
  CHECK(std::get<forcing::PiecewisePower>(s.forcing->components[0]).exponent_after == -2.0);
  CHECK(std::get<forcing::Constant>(s.forcing->components[1]).value == 0.5);
  CHECK(std::get<forcing::Table>(s.forcing->components[2]).samples.size() == 3);
  REQUIRE(s.nonlinearity.has_value());
  CHECK(s.nonlinearity->terms[1].front().coefficient == 1000.0);
}

TEST_CASE("JSON round trip preserves the system") {
  auto s = example13();
  s.forcing = example13_forcing();
  s.nonlinearity = quadratic_x1x2();
  const MultiOrderSystem back = parse_system(to_json(s));
  CHECK(back == s);
}

TEST_CASE("config errors name the problem") {
  CHECK(code_of([] { (void)parse_system("alpha = [0.4, 0.3]\nmatrix = [[0,0,0],[0,0,0],[0,0,0]]\n"); }) ==
        ErrorCode::BadConfig);
  CHECK(code_of([] { (void)parse_system("alpha = [0.4, 0.3, 0.5]\n"); }) == ErrorCode::BadConfig);
  CHECK(code_of([] {
          (void)parse_system("alpha = [0.4, 0.3, 0.5]\nalpha = [0.4, 0.3, 0.5]\nmatrix = [[0,0,0],[0,0,0],[0,0,0]]\n");
        }) == ErrorCode::BadConfig);
  CHECK(code_of([] {
          (void)parse_system("alpha = [0.4, 0.3, 0.5]\nmatrix = [[0,0,0],[0,0,0],[0,0,0]]\ncolour = 1\n");
        }) == ErrorCode::BadConfig);
  CHECK(code_of([] { (void)parse_system("alpha = [1.4, 0.3, 0.5]\nmatrix = [[0,0,0],[0,0,0],[0,0,0]]\n"); }) ==
        ErrorCode::OrderOutOfRange);
  try {
    (void)parse_system("alpha = [0.4, 0.3, 0.5]\nmatrix = [[0,0,0],[0,0,0],\n[0,0,0]\nx0 = 1\n");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}
