#include "fracstab/zero_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "compensated_sum.hpp"
#include "fracstab/error.hpp"

namespace fracstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
// Keeps exp(log_bound) finite.
constexpr double kMaxLogBound = 650.0;

// Real generalized polynomial  p(w) = sum_k weight_k w^exponent_k  on w > 0.
struct RealPowerSum {
  std::vector<Term> terms;  // exponent ascending, nonzero weights

  [[nodiscard]] double operator()(double w) const noexcept {
    detail::CompensatedSum s;
    for (const auto& t : terms) s.add(t.exponent == 0.0 ? t.coefficient : t.coefficient * std::pow(w, t.exponent));
    return s.value();
  }
};

// Imaginary part of Q(i w): coefficients scaled by sin(e pi / 2). sin(pi) and
// friends are not exactly zero in floating point, so vanishing factors are cut.
RealPowerSum axis_imag(const GeneralCharFn& q) {
  RealPowerSum p;
  for (const auto& t : q.terms()) {
    const double s = std::sin(t.exponent * kHalfPi);
    if (t.exponent == 0.0 || std::abs(s) < 1e-14) continue;
    p.terms.push_back({t.exponent, t.coefficient * s});
  }
  std::reverse(p.terms.begin(), p.terms.end());
  return p;
}

RealPowerSum axis_real(const GeneralCharFn& q) {
  RealPowerSum p;
  for (const auto& t : q.terms()) {
    const double c = t.exponent == 0.0 ? 1.0 : std::cos(t.exponent * kHalfPi);
    if (std::abs(c) < 1e-14 || t.coefficient == 0.0) continue;
    p.terms.push_back({t.exponent, t.coefficient * c});
  }
  std::reverse(p.terms.begin(), p.terms.end());
  return p;
}

// Interval [lo, hi] outside of which the extreme terms of p dominate the rest,
// so p has no roots there. Returned as natural logs.
std::pair<double, double> log_root_bounds(const RealPowerSum& p) {
  const auto& t = p.terms;
  if (t.size() < 2) return {0.0, 0.0};
  double rest_top = 0.0;
  double rest_bottom = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) rest_top += std::abs(t[k].coefficient);
  for (std::size_t k = 1; k < t.size(); ++k) rest_bottom += std::abs(t[k].coefficient);
  const double top_gap = t.back().exponent - t[t.size() - 2].exponent;
  const double bottom_gap = t[1].exponent - t[0].exponent;
  double log_hi = std::log(rest_top / std::abs(t.back().coefficient)) / top_gap;
  double log_lo = std::log(std::abs(t.front().coefficient) / rest_bottom) / bottom_gap;
  log_hi = std::clamp(std::max(log_hi, 0.0), 0.0, kMaxLogBound);
  log_lo = std::clamp(std::min(log_lo, 0.0), -kMaxLogBound, 0.0);
  return {log_lo, log_hi};
}

std::vector<double> bracket_roots(const RealPowerSum& p, double log_lo, double log_hi) {
  std::vector<double> roots;
  if (p.terms.size() < 2 || !(log_hi > log_lo)) return roots;
  constexpr double kPointsPerUnitLog = 48.0;
  const auto n = static_cast<std::size_t>(std::ceil((log_hi - log_lo) * kPointsPerUnitLog)) + 1;
  double w_prev = std::exp(log_lo);
  double v_prev = p(w_prev);
  for (std::size_t i = 1; i <= n; ++i) {
    const double w = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(n));
    const double v = p(w);
    if (v_prev == 0.0) {
      roots.push_back(w_prev);
    } else if ((v_prev < 0.0) != (v < 0.0) && v != 0.0) {
      double lo = w_prev;
      double hi = w;
      double v_lo = v_prev;
      for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = p(mid);
        if (vm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((vm < 0.0) == (v_lo < 0.0)) {
          lo = mid;
          v_lo = vm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    w_prev = w;
    v_prev = v;
  }
  if (v_prev == 0.0) roots.push_back(w_prev);
  return roots;
}

std::vector<AxisRoot> scan_between(const GeneralCharFn& q, double log_lo, double log_hi) {
  RealPowerSum im = axis_imag(q);
  // h2 identically zero: every zero of h1 is a zero of Q on the axis.
  const RealPowerSum& target = im.terms.empty() ? axis_real(q) : im;
  std::vector<AxisRoot> out;
  for (double w : bracket_roots(target, log_lo, log_hi)) {
    const Complex v = eval_on_axis(q, w);
    out.push_back({w, v.real(), v.imag()});
  }
  return out;
}

double leading_dominance_margin(const GeneralCharFn& q, double r) noexcept {
  const auto& t = q.terms();
  double rest = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    rest += std::abs(t[k].coefficient) * (t[k].exponent == 0.0 ? 1.0 : std::pow(r, t[k].exponent));
  }
  return std::pow(r, q.leading_exponent()) - 2.0 * rest;
}

double inner_perturbation(const GeneralCharFn& q, double eps) noexcept {
  double s = 0.0;
  for (const auto& t : q.terms()) {
    if (t.exponent > 0.0) s += std::abs(t.coefficient) * std::pow(eps, t.exponent);
  }
  return s;
}

Complex eval_contour(const GeneralCharFn& q, Segment seg, double t, const ContourSpec& spec) {
  switch (seg) {
    case Segment::Gamma1: return eval_on_axis(q, t);
    case Segment::Gamma4: return std::conj(eval_on_axis(q, t));
    case Segment::Gamma2:
    case Segment::Gamma3: {
      const double r = seg == Segment::Gamma2 ? spec.radius : spec.epsilon;
      if (t == kHalfPi) return eval_on_axis(q, r);
      if (t == -kHalfPi) return std::conj(eval_on_axis(q, r));
      return eval(q, std::polar(r, t));
    }
  }
  return {};
}

double arg_step(Complex from, Complex to) noexcept { return std::arg(to / from); }

}  // namespace

double axis_zero_tol(const GeneralCharFn& q) noexcept {
  return 1e-9 * (1.0 + q.coefficient_mass() + std::abs(q.det()));
}

double axis_scan_bound(const GeneralCharFn& q) noexcept {
  RealPowerSum im = axis_imag(q);
  const RealPowerSum& target = im.terms.empty() ? axis_real(q) : im;
  return std::exp(log_root_bounds(target).second + std::log(2.0));
}

std::vector<AxisRoot> scan_imaginary_axis(const GeneralCharFn& q, double omega_max) {
  if (!(omega_max > 0.0)) return {};
  RealPowerSum im = axis_imag(q);
  const RealPowerSum& target = im.terms.empty() ? axis_real(q) : im;
  const double log_lo = log_root_bounds(target).first - std::log(2.0);
  return scan_between(q, log_lo, std::log(omega_max));
}

std::vector<AxisRoot> scan_imaginary_axis(const GeneralCharFn& q) {
  return scan_imaginary_axis(q, axis_scan_bound(q));
}

std::vector<AxisRoot> scan_imaginary_axis(const SimpleCharFn& q, double omega_max) {
  return scan_imaginary_axis(q.to_general(), omega_max);
}

bool axis_roots_positive(const std::vector<AxisRoot>& roots) noexcept {
  return std::all_of(roots.begin(), roots.end(), [](const AxisRoot& r) { return r.h1 > 0.0; });
}

bool contour_certified(const GeneralCharFn& q, const ContourSpec& spec) noexcept {
  const double q0 = std::abs(q.constant());
  return spec.epsilon > 0.0 && spec.radius > spec.epsilon && q0 > 0.0 &&
         inner_perturbation(q, spec.epsilon) <= 0.5 * q0 && leading_dominance_margin(q, spec.radius) >= 0.0;
}

ContourSpec auto_contour(const GeneralCharFn& q) {
  const double q0 = std::abs(q.constant());
  if (q0 <= q.zero_tol()) throw Error(ErrorCode::ZeroAtOrigin, "Q(0) = -det A vanishes");

  ContourSpec spec;
  double eps = 1e-2;
  for (int i = 0; i < 2000 && inner_perturbation(q, eps) > 0.5 * q0; ++i) eps *= 0.5;
  if (inner_perturbation(q, eps) > 0.5 * q0 || eps == 0.0) {
    throw Error(ErrorCode::SamplingInconclusive, "no inner radius isolates Q(0)");
  }

  const auto& t = q.terms();
  const double next = t.size() > 1 ? t[1].exponent : 0.0;
  double radius = std::max(1.0, std::pow(2.0 * q.coefficient_mass(), 1.0 / (q.leading_exponent() - next)));
  if (!std::isfinite(radius)) radius = 1.0;
  for (int i = 0; i < 4000 && leading_dominance_margin(q, radius) < 0.0; ++i) radius *= 2.0;
  if (leading_dominance_margin(q, radius) < 0.0 || !std::isfinite(radius)) {
    throw Error(ErrorCode::SamplingInconclusive, "no outer radius makes the leading term dominant");
  }
  spec.epsilon = eps;
  spec.radius = radius;
  return spec;
}

std::vector<ContourSample> sample_contour(const GeneralCharFn& q, const ContourSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.radius > spec.epsilon)) {
    throw std::invalid_argument("contour needs 0 < epsilon < radius");
  }
  struct Piece {
    Segment seg;
    double t0, t1;  // parameter: phi, or log(w) on the axis
    bool log_param;
  };
  const double le = std::log(spec.epsilon);
  const double lr = std::log(spec.radius);
  const std::array<Piece, 4> pieces = {{
      {Segment::Gamma2, -kHalfPi, kHalfPi, false},
      {Segment::Gamma1, lr, le, true},
      {Segment::Gamma3, kHalfPi, -kHalfPi, false},
      {Segment::Gamma4, le, lr, true},
  }};

  std::vector<ContourSample> out;
  for (const Piece& p : pieces) {
    const double density = p.log_param ? spec.samples_per_unit_log_length : spec.samples_per_unit_angle;
    const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(std::abs(p.t1 - p.t0) * density)));
    auto param = [&](double u) { return p.log_param ? std::exp(u) : u; };
    auto value = [&](double u) { return eval_contour(q, p.seg, param(u), spec); };

    // Depth-first refinement keeps the samples ordered along the contour.
    std::function<void(double, Complex, double, Complex, int)> refine =
        [&](double ua, Complex qa, double ub, Complex qb, int depth) {
          if (std::abs(arg_step(qa, qb)) < kMaxArgStep || depth > 60) {
            out.push_back({p.seg, param(ub), qb});
            return;
          }
          if (out.size() >= kMaxContourSamples) {
            throw Error(ErrorCode::SamplingInconclusive, "contour refinement exceeded the sample cap");
          }
          const double um = 0.5 * (ua + ub);
          const Complex qm = value(um);
          refine(ua, qa, um, qm, depth + 1);
          refine(um, qm, ub, qb, depth + 1);
        };

    double u_prev = p.t0;
    Complex q_prev = value(u_prev);
    out.push_back({p.seg, param(u_prev), q_prev});
    for (std::size_t i = 1; i <= n; ++i) {
      const double u = i == n ? p.t1 : p.t0 + (p.t1 - p.t0) * static_cast<double>(i) / static_cast<double>(n);
      const Complex qv = value(u);
      refine(u_prev, q_prev, u, qv, 0);
      u_prev = u;
      q_prev = qv;
      if (out.size() > kMaxContourSamples) {
        throw Error(ErrorCode::SamplingInconclusive, "contour refinement exceeded the sample cap");
      }
    }
  }
  return out;
}

WindingResult count_rhp_zeros(const GeneralCharFn& q) { return count_rhp_zeros(q, auto_contour(q)); }

WindingResult count_rhp_zeros(const GeneralCharFn& q, const ContourSpec& spec) {
  if (std::abs(q.constant()) <= q.zero_tol()) {
    throw Error(ErrorCode::ZeroAtOrigin, "Q(0) = -det A vanishes");
  }
  const double tol = axis_zero_tol(q);
  for (const AxisRoot& r : scan_imaginary_axis(q)) {
    if (std::abs(r.h1) <= tol) {
      throw Error(ErrorCode::ZeroOnAxis, "Q vanishes near s = " + std::to_string(r.omega) + " i");
    }
  }

  const auto samples = sample_contour(q, spec);
  WindingResult res;
  res.contour = spec;
  res.samples = samples.size();
  res.min_abs_on_contour = std::numeric_limits<double>::infinity();
  detail::CompensatedSum total;
  std::array<detail::CompensatedSum, 4> per_segment;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    res.min_abs_on_contour = std::min(res.min_abs_on_contour, std::abs(samples[i].value));
    const auto& next = samples[(i + 1) % samples.size()];
    const double step = arg_step(samples[i].value, next.value);
    total.add(step);
    if (next.segment == samples[i].segment) {
      per_segment[static_cast<std::size_t>(samples[i].segment) - 1].add(step);
    }
  }
  res.total_turning = total.value();
  for (std::size_t k = 0; k < 4; ++k) res.segment_turning[k] = per_segment[k].value();

  const double turns = res.total_turning / (2.0 * kPi);
  res.zero_count = static_cast<int>(std::lround(turns));
  if (std::abs(turns - res.zero_count) > kTurningResidualTol || res.zero_count < 0) {
    throw Error(ErrorCode::SamplingInconclusive,
                "winding residual " + std::to_string(turns - res.zero_count) + " exceeds tolerance");
  }
  return res;
}

}  // namespace fracstab
