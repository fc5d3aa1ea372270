#pragma once

// Implicit product-integration trapezoidal solver for
//
//   D^{alpha_k} x_k = (A x)_k + f_k(t) + n_k(x),  x(0) = x0,
//
// on a uniform grid with full memory, plus decay diagnostics on the result.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracstab/model.hpp"

namespace fracstab {

struct SolverConfig {
  double step = 0.005;
  double t_end = 1.0;
  /// Stage residual tolerance, scaled by max(1, |x|_inf).
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec3> x;
  double nu = 0.0;
  /// (t, t^nu |x(t)|) over the last diagnostic window, empty until one is attached.
  std::vector<std::pair<double, double>> scaled_norm;
};

/// Convolution weights of the rule for one order alpha and step count n.
/// w[j] multiplies g(t_j); the sum of w equals t_n^alpha / Gamma(alpha + 1)
/// up to the h^alpha factor, which is included.
[[nodiscard]] std::vector<double> pi_trapezoid_weights(double alpha, double step, std::size_t n);

/// Second-difference kernel a_k = ((k-1)^p - 2 k^p + (k+1)^p) / Gamma(p + 1),
/// p = alpha + 1, with a_0 = 1 / Gamma(p + 1). Accurate for large k.
[[nodiscard]] double pi_kernel(double alpha, std::size_t k);

/// Number of steps N with N * step = t_end. Throws Error{BadSolverConfig}.
[[nodiscard]] std::size_t step_count(const SolverConfig& cfg);

/// Throws Error{BadSolverConfig | NewtonDivergence | StepTooLarge}.
[[nodiscard]] Trajectory integrate(const MultiOrderSystem& sys, const SolverConfig& cfg);

struct DecayDiagnostic {
  double sup = 0.0;
  bool plateau = false;
  double third_quarter_sup = 0.0;
  double last_quarter_sup = 0.0;
  std::vector<std::pair<double, double>> series;
};

/// sup over [t_lo, t_hi] of t^nu |x(t)|, and whether the last quarter of the
/// log-time window stays within (0.5, 2) times the third quarter's sup.
/// Throws std::invalid_argument when the window is not inside (0, t_end].
[[nodiscard]] DecayDiagnostic decay_diagnostic(const Trajectory& traj, double nu, std::pair<double, double> window);

/// Computes the diagnostic and stores nu and the series in `traj`.
DecayDiagnostic attach_diagnostic(Trajectory& traj, double nu, std::pair<double, double> window);

enum class BasinStatus { Decaying, NotPlateau, SolverFailure };

[[nodiscard]] std::string_view to_string(BasinStatus s) noexcept;

struct BasinResult {
  double radius = 0.0;
  BasinStatus status = BasinStatus::SolverFailure;
  double sup = 0.0;
  bool plateau = false;
  double final_norm = 0.0;
  std::string message;
};

struct BasinOptions {
  /// Defaults to [t_end / 10, t_end].
  std::optional<std::pair<double, double>> window;
  /// Worker cap; 0 means FRACSTAB_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Integrates the autonomous system (forcing dropped) from x0 scaled to each
/// radius, direction x0 / |x0| or (1, 1, 1) / sqrt 3 when x0 = 0, and applies
/// decay_diagnostic with nu = min alpha.
[[nodiscard]] std::vector<BasinResult> simulate_nonlinear_basin(const MultiOrderSystem& sys, const SolverConfig& cfg,
                                                                const std::vector<double>& radii,
                                                                const BasinOptions& options = {});

/// Worker count from FRACSTAB_THREADS, else hardware concurrency, at least 1.
[[nodiscard]] unsigned worker_count(unsigned requested = 0);

}  // namespace fracstab
