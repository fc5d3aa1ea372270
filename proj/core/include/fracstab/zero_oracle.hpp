#pragma once

// Numerical certification of where the zeros of Q lie.
//
// count_rhp_zeros applies the argument principle on the boundary of the
// right half annulus {eps < |s| < R, Re s > 0}, traversed counter-clockwise:
//
//   gamma2: s = R e^{i phi},   phi  -pi/2 -> pi/2   (outer arc)
//   gamma1: s = i w,           w     R    -> eps    (upper axis, downwards)
//   gamma3: s = eps e^{i phi}, phi   pi/2 -> -pi/2  (inner arc, clockwise)
//   gamma4: s = -i w,          w     eps  -> R      (lower axis, downwards)
//
// The accumulated change of arg Q divided by 2 pi is the number of zeros in
// the open right half plane once eps is small and R large enough.
// scan_imaginary_axis locates sign changes of h2(w) = Im Q(i w) and reports
// h1 = Re Q(i w) at each root; a root with h1 ~ 0 is a zero on the axis.

#include <array>
#include <cstddef>
#include <vector>

#include "fracstab/char_fn.hpp"

namespace fracstab {

struct ContourSpec {
  double epsilon = 1e-2;
  double radius = 10.0;
  int samples_per_unit_angle = 32;
  int samples_per_unit_log_length = 32;
};

enum class Segment { Gamma1 = 1, Gamma2 = 2, Gamma3 = 3, Gamma4 = 4 };

struct ContourSample {
  Segment segment = Segment::Gamma1;
  double t = 0.0;  // phi on the arcs, w on the axis segments
  Complex value;   // Q(s)
};

struct WindingResult {
  int zero_count = 0;
  double min_abs_on_contour = 0.0;
  double total_turning = 0.0;  // radians
  std::array<double, 4> segment_turning{};  // gamma1..gamma4, radians
  ContourSpec contour;
  std::size_t samples = 0;
};

struct AxisRoot {
  double omega = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// Largest consecutive change of arg Q accepted between contour samples.
inline constexpr double kMaxArgStep = 0.7853981633974483;  // pi / 4
inline constexpr std::size_t kMaxContourSamples = std::size_t{1} << 20;
inline constexpr double kTurningResidualTol = 0.01;

/// Contour whose inner arc keeps |Q - Q(0)| <= |Q(0)|/2 and whose outer arc
/// has |s^b4| >= 2 * sum of the other term magnitudes. Throws
/// Error{ZeroAtOrigin} when Q(0) = 0.
[[nodiscard]] ContourSpec auto_contour(const GeneralCharFn& q);

/// True when `spec` satisfies the inner and outer dominance conditions.
[[nodiscard]] bool contour_certified(const GeneralCharFn& q, const ContourSpec& spec) noexcept;

/// Adaptively refined samples of Q along gamma2, gamma1, gamma3, gamma4.
/// Throws Error{SamplingInconclusive} when the sample cap is exceeded.
[[nodiscard]] std::vector<ContourSample> sample_contour(const GeneralCharFn& q, const ContourSpec& spec);

/// Throws Error{ZeroAtOrigin | ZeroOnAxis | SamplingInconclusive}.
[[nodiscard]] WindingResult count_rhp_zeros(const GeneralCharFn& q);
[[nodiscard]] WindingResult count_rhp_zeros(const GeneralCharFn& q, const ContourSpec& spec);

/// An axis root whose |h1| is at most this is treated as a zero of Q.
[[nodiscard]] double axis_zero_tol(const GeneralCharFn& q) noexcept;

/// Upper bound beyond which h2 (or h1 when h2 vanishes identically) keeps its sign.
[[nodiscard]] double axis_scan_bound(const GeneralCharFn& q) noexcept;

/// Roots of h2 on (0, omega_max], each refined by bisection, with h1 at the root.
/// When h2 vanishes identically the roots of h1 are returned instead.
[[nodiscard]] std::vector<AxisRoot> scan_imaginary_axis(const GeneralCharFn& q, double omega_max);
[[nodiscard]] std::vector<AxisRoot> scan_imaginary_axis(const GeneralCharFn& q);
[[nodiscard]] std::vector<AxisRoot> scan_imaginary_axis(const SimpleCharFn& q, double omega_max);

/// Every h2 root has h1 > 0: with d < 0 and b4 < 2 this excludes zeros of Q
/// on the imaginary axis and in the open right half plane.
[[nodiscard]] bool axis_roots_positive(const std::vector<AxisRoot>& roots) noexcept;

}  // namespace fracstab
