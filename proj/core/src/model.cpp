#include "fracstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fracstab/error.hpp"

namespace fracstab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::BadForcingTable: return "BadForcingTable";
    case ErrorCode::BadNonlinearity: return "BadNonlinearity";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NotReducible: return "NotReducible";
    case ErrorCode::Beta4EqualsTwo: return "Beta4EqualsTwo";
    case ErrorCode::InternalContradiction: return "InternalContradiction";
    case ErrorCode::CriterionOracleMismatch: return "CriterionOracleMismatch";
    case ErrorCode::ZeroOnAxis: return "ZeroOnAxis";
    case ErrorCode::ZeroAtOrigin: return "ZeroAtOrigin";
    case ErrorCode::SamplingInconclusive: return "SamplingInconclusive";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::BadSolverConfig: return "BadSolverConfig";
  }
  return "Unknown";
}

double MultiOrder::min() const noexcept {
  return std::min({alpha[0], alpha[1], alpha[2]});
}

std::array<std::size_t, 3> MultiOrder::sorted_indices() const {
  std::array<std::size_t, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(),
                   [this](std::size_t l, std::size_t r) { return alpha[l] < alpha[r]; });
  return idx;
}

double SystemMatrix::det() const noexcept {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

double SystemMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& row : a) {
    for (double v : row) s += v * v;
  }
  return std::sqrt(s);
}

double SystemMatrix::principal_minor(std::size_t k) const noexcept {
  const std::size_t i = k == 0 ? 1 : 0;
  const std::size_t j = k == 2 ? 1 : 2;
  return a[i][i] * a[j][j] - a[i][j] * a[j][i];
}

double evaluate(const ForcingComponent& f, double t) {
  return std::visit(
      [t](const auto& kind) -> double {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, forcing::Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, forcing::Constant>) {
          return kind.value;
        } else if constexpr (std::is_same_v<K, forcing::PiecewisePower>) {
          return t < kind.t_break ? kind.constant_before : std::pow(t, kind.exponent_after);
        } else {
          const auto& s = kind.samples;
          if (s.empty()) return 0.0;
          if (t <= s.front().first) return s.front().second;
          if (t >= s.back().first) return s.back().second;
          auto hi = std::upper_bound(s.begin(), s.end(), t,
                                     [](double v, const auto& p) { return v < p.first; });
          auto lo = std::prev(hi);
          const double w = (t - lo->first) / (hi->first - lo->first);
          return (1.0 - w) * lo->second + w * hi->second;
        }
      },
      f);
}

Vec3 ForcingSpec::operator()(double t) const {
  return {evaluate(components[0], t), evaluate(components[1], t), evaluate(components[2], t)};
}

std::optional<double> ForcingSpec::decay_exponent() const {
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& c : components) {
    if (std::holds_alternative<forcing::Zero>(c)) continue;
    if (const auto* p = std::get_if<forcing::PiecewisePower>(&c)) {
      if (p->exponent_after >= 0.0) return std::nullopt;
      eta = std::min(eta, -p->exponent_after);
      continue;
    }
    if (const auto* k = std::get_if<forcing::Constant>(&c); k && k->value == 0.0) continue;
    if (const auto* tab = std::get_if<forcing::Table>(&c);
        tab && (tab->samples.empty() || tab->samples.back().second == 0.0)) {
      continue;
    }
    return std::nullopt;
  }
  return eta;
}

Vec3 NonlinearitySpec::operator()(const Vec3& x) const {
  Vec3 out{};
  for (std::size_t k = 0; k < 3; ++k) {
    for (const auto& term : terms[k]) {
      double v = term.coefficient;
      for (std::size_t j = 0; j < 3; ++j) v *= std::pow(x[j], term.powers[j]);
      out[k] += v;
    }
  }
  return out;
}

Mat3 NonlinearitySpec::jacobian(const Vec3& x) const {
  Mat3 jac{};
  for (std::size_t k = 0; k < 3; ++k) {
    for (const auto& term : terms[k]) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (term.powers[j] == 0) continue;
        double v = term.coefficient * term.powers[j];
        for (std::size_t m = 0; m < 3; ++m) {
          const int p = m == j ? term.powers[m] - 1 : term.powers[m];
          v *= std::pow(x[m], p);
        }
        jac[k][j] += v;
      }
    }
  }
  return jac;
}

bool NonlinearitySpec::empty() const noexcept {
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.empty(); });
}

void validate_order(const MultiOrder& order) {
  for (std::size_t k = 0; k < 3; ++k) {
    const double a = order.alpha[k];
    if (!std::isfinite(a)) {
      throw Error(ErrorCode::NonFiniteEntry, "alpha[" + std::to_string(k + 1) + "] is not finite");
    }
    if (!(a > 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::OrderOutOfRange,
                  "alpha[" + std::to_string(k + 1) + "] = " + std::to_string(a) +
                      " is outside (0, 1]");
    }
  }
}

void validate_matrix(const SystemMatrix& matrix) {
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (!std::isfinite(matrix(i, j))) {
        throw Error(ErrorCode::NonFiniteEntry, "matrix entry a" + std::to_string(i + 1) +
                                                   std::to_string(j + 1) + " is not finite");
      }
    }
  }
}

namespace {

void validate_forcing(const ForcingSpec& spec) {
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string where = "forcing." + std::to_string(k + 1);
    std::visit(
        [&](const auto& kind) {
          using K = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<K, forcing::Constant>) {
            if (!std::isfinite(kind.value)) {
              throw Error(ErrorCode::NonFiniteEntry, where + " value is not finite");
            }
          } else if constexpr (std::is_same_v<K, forcing::PiecewisePower>) {
            if (!std::isfinite(kind.t_break) || !std::isfinite(kind.constant_before) ||
                !std::isfinite(kind.exponent_after)) {
              throw Error(ErrorCode::NonFiniteEntry, where + " has a non-finite parameter");
            }
            // t^p must be finite on [t_break, inf)
            if (kind.t_break <= 0.0 && kind.exponent_after < 0.0) {
              throw Error(ErrorCode::BadForcingTable,
                          where + " needs t_break > 0 for a negative exponent");
            }
          } else if constexpr (std::is_same_v<K, forcing::Table>) {
            if (kind.samples.empty()) {
              throw Error(ErrorCode::BadForcingTable, where + " table has no samples");
            }
            for (std::size_t i = 0; i < kind.samples.size(); ++i) {
              const auto [t, v] = kind.samples[i];
              if (!std::isfinite(t) || !std::isfinite(v)) {
                throw Error(ErrorCode::BadForcingTable, where + " table has a non-finite sample");
              }
              if (i > 0 && !(t > kind.samples[i - 1].first)) {
                throw Error(ErrorCode::BadForcingTable,
                            where + " table times are not strictly increasing");
              }
            }
          }
        },
        spec.components[k]);
  }
}

void validate_nonlinearity(const NonlinearitySpec& spec) {
  for (std::size_t k = 0; k < 3; ++k) {
    for (const auto& term : spec.terms[k]) {
      if (!std::isfinite(term.coefficient)) {
        throw Error(ErrorCode::NonFiniteEntry, "nonlinearity coefficient is not finite");
      }
      if (std::any_of(term.powers.begin(), term.powers.end(), [](int p) { return p < 0; })) {
        throw Error(ErrorCode::BadNonlinearity, "nonlinearity powers must be nonnegative");
      }
      if (term.degree() < 2) {
        throw Error(ErrorCode::BadNonlinearity,
                    "nonlinearity term in component " + std::to_string(k + 1) +
                        " has total degree < 2");
      }
    }
  }
}

}  // namespace

MultiOrderSystem validate(MultiOrderSystem sys) {
  validate_order(sys.order);
  validate_matrix(sys.matrix);
  for (std::size_t k = 0; k < 3; ++k) {
    if (!std::isfinite(sys.x0[k])) {
      throw Error(ErrorCode::NonFiniteEntry, "x0[" + std::to_string(k + 1) + "] is not finite");
    }
  }
  if (sys.forcing) validate_forcing(*sys.forcing);
  if (sys.nonlinearity) validate_nonlinearity(*sys.nonlinearity);
  return sys;
}

}  // namespace fracstab
