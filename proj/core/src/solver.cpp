#include "fracstab/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "compensated_sum.hpp"
#include "fracstab/error.hpp"

namespace fracstab {

namespace {

// Above this index the differences are summed as a binomial series instead
// of being formed directly, which would cancel catastrophically.
constexpr std::size_t kSeriesFrom = 8;

double norm2(const Vec3& v) noexcept { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double norm_inf(const Vec3& v) noexcept {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

bool finite(const Vec3& v) noexcept {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// k^p * sum_{m >= m0, step} C(p, m) (sign)^m k^-m
double binomial_tail(double p, double k, int m0, int stride, bool alternating) {
  double c = 1.0;  // C(p, 0)
  int m = 0;
  for (; m < m0; ++m) c = c * (p - m) / (m + 1);
  detail::CompensatedSum s;
  for (int it = 0; it < 80; ++it) {
    if (c == 0.0) break;
    double term = c * std::pow(k, p - m);
    if (alternating && (m % 2 != 0)) term = -term;
    s.add(term);
    if (std::abs(term) < 1e-18 * std::abs(s.value())) break;
    for (int r = 0; r < stride; ++r, ++m) c = c * (p - m) / (m + 1);
  }
  return s.value();
}

// Weight of g(t_0) after n steps, without the h^alpha / Gamma factors.
double start_kernel(double alpha, std::size_t n) {
  const double p = alpha + 1.0;
  const auto nd = static_cast<double>(n);
  if (n < kSeriesFrom) return std::pow(nd - 1.0, p) - std::pow(nd, alpha) * (nd - alpha - 1.0);
  // (n-1)^p - n^p + p n^alpha = n^p sum_{m >= 2} C(p, m) (-1/n)^m
  return binomial_tail(p, nd, 2, 1, true);
}

double raw_kernel(double alpha, std::size_t k) {
  const double p = alpha + 1.0;
  if (k == 0) return 1.0;
  const auto kd = static_cast<double>(k);
  if (k < kSeriesFrom) return std::pow(kd - 1.0, p) - 2.0 * std::pow(kd, p) + std::pow(kd + 1.0, p);
  return 2.0 * binomial_tail(p, kd, 2, 2, false);
}

double dot(const double* a, const double* b, std::size_t len) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < len; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

bool on_grid(double t, double step) noexcept {
  const double r = t / step;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

void check_forcing_alignment(const ForcingSpec& f, const SolverConfig& cfg) {
  for (const auto& c : f.components) {
    if (const auto* pw = std::get_if<forcing::PiecewisePower>(&c)) {
      if (pw->t_break > 0.0 && pw->t_break <= cfg.t_end && !on_grid(pw->t_break, cfg.step)) {
        throw Error(ErrorCode::BadSolverConfig,
                    "forcing break t = " + std::to_string(pw->t_break) + " is not a multiple of the step");
      }
    }
  }
}

struct Rhs {
  const SystemMatrix& A;
  const NonlinearitySpec* nl;

  Vec3 operator()(const Vec3& x, const Vec3& f) const {
    Vec3 g{};
    for (std::size_t i = 0; i < 3; ++i) g[i] = A(i, 0) * x[0] + A(i, 1) * x[1] + A(i, 2) * x[2] + f[i];
    if (nl) {
      const Vec3 n = (*nl)(x);
      for (std::size_t i = 0; i < 3; ++i) g[i] += n[i];
    }
    return g;
  }
};

// Solves x = hist + D g(x) for the stage value.
Vec3 solve_stage(const Rhs& rhs, const Vec3& hist, const Vec3& D, const Vec3& f, Vec3 x, const SolverConfig& cfg,
                 double t) {
  auto residual = [&](const Vec3& y) {
    const Vec3 g = rhs(y, f);
    Vec3 r{};
    for (std::size_t i = 0; i < 3; ++i) r[i] = y[i] - hist[i] - D[i] * g[i];
    return r;
  };
  auto fail = [&](ErrorCode code, const std::string& what) {
    return Error(code, what + " at t = " + std::to_string(t));
  };

  Vec3 r = residual(x);
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    if (!finite(x) || !finite(r)) throw fail(ErrorCode::NewtonDivergence, "non-finite stage value");
    if (norm_inf(r) <= cfg.newton_tol * std::max(1.0, norm_inf(x))) return x;

    Eigen::Matrix3d J;
    const Mat3 jn = rhs.nl ? rhs.nl->jacobian(x) : Mat3{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (i == j ? 1.0 : 0.0) - D[i] * (rhs.A(i, j) + jn[i][j]);
      }
    }
    const Eigen::PartialPivLU<Eigen::Matrix3d> lu(J);
    const double det = lu.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) {
      throw fail(ErrorCode::StepTooLarge, "singular stage Jacobian (det " + std::to_string(det) + ")");
    }
    const Eigen::Vector3d dx = lu.solve(-Eigen::Vector3d(r[0], r[1], r[2]));

    // Damped update: halve until the residual drops.
    double lambda = 1.0;
    bool reduced = false;
    Vec3 trial{};
    Vec3 r_trial{};
    for (int h = 0; h < 12; ++h, lambda *= 0.5) {
      for (std::size_t i = 0; i < 3; ++i) trial[i] = x[i] + lambda * dx(static_cast<Eigen::Index>(i));
      r_trial = residual(trial);
      if (finite(r_trial) && norm_inf(r_trial) < norm_inf(r)) {
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      // Fixed-point fallback.
      const Vec3 g = rhs(x, f);
      for (std::size_t i = 0; i < 3; ++i) trial[i] = hist[i] + D[i] * g[i];
      r_trial = residual(trial);
      if (!finite(r_trial) || norm_inf(r_trial) >= norm_inf(r)) {
        throw fail(ErrorCode::NewtonDivergence, "stage residual not reduced");
      }
    }
    x = trial;
    r = r_trial;
  }
  if (finite(r) && norm_inf(r) <= cfg.newton_tol * std::max(1.0, norm_inf(x))) return x;
  throw fail(ErrorCode::NewtonDivergence,
             "no convergence in " + std::to_string(cfg.newton_max_iter) + " iterations");
}

}  // namespace

double pi_kernel(double alpha, std::size_t k) { return raw_kernel(alpha, k) / std::tgamma(alpha + 2.0); }

std::vector<double> pi_trapezoid_weights(double alpha, double step, std::size_t n) {
  std::vector<double> w(n + 1, 0.0);
  const double scale = std::pow(step, alpha) / std::tgamma(alpha + 2.0);
  if (n == 0) return w;
  w[0] = scale * start_kernel(alpha, n);
  for (std::size_t j = 1; j <= n; ++j) w[j] = scale * raw_kernel(alpha, n - j);
  return w;
}

std::size_t step_count(const SolverConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw Error(ErrorCode::BadSolverConfig, "step must be positive");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorCode::BadSolverConfig, "t_end must be positive");
  }
  if (!(cfg.newton_tol > 0.0) || cfg.newton_max_iter < 1) {
    throw Error(ErrorCode::BadSolverConfig, "Newton tolerance and iteration cap must be positive");
  }
  if (!on_grid(cfg.t_end, cfg.step)) {
    throw Error(ErrorCode::BadSolverConfig, "t_end is not an integer multiple of step");
  }
  return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.step));
}

Trajectory integrate(const MultiOrderSystem& input, const SolverConfig& cfg) {
  const MultiOrderSystem sys = validate(input);
  const std::size_t N = step_count(cfg);
  if (sys.forcing) check_forcing_alignment(*sys.forcing, cfg);

  const NonlinearitySpec* nl = sys.nonlinearity && !sys.nonlinearity->empty() ? &*sys.nonlinearity : nullptr;
  const Rhs rhs{sys.matrix, nl};
  auto forcing_at = [&](double t) { return sys.forcing ? (*sys.forcing)(t) : Vec3{}; };

  // reversed[k][m] = a_{N - m}, so the history sum runs over contiguous memory.
  std::array<std::vector<double>, 3> reversed;
  Vec3 h_alpha{};
  Vec3 gamma_inv{};
  Vec3 D{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double al = sys.order.alpha[k];
    h_alpha[k] = std::pow(cfg.step, al);
    gamma_inv[k] = 1.0 / std::tgamma(al + 2.0);
    reversed[k].resize(N + 1);
    for (std::size_t m = 0; m <= N; ++m) reversed[k][m] = raw_kernel(al, N - m) * gamma_inv[k];
    D[k] = h_alpha[k] * reversed[k][N];
  }

  Trajectory traj;
  traj.t.resize(N + 1);
  traj.x.resize(N + 1);
  std::array<std::vector<double>, 3> g;
  for (auto& v : g) v.resize(N + 1);

  traj.t[0] = 0.0;
  traj.x[0] = sys.x0;
  {
    const Vec3 g0 = rhs(sys.x0, forcing_at(0.0));
    for (std::size_t k = 0; k < 3; ++k) g[k][0] = g0[k];
  }

  for (std::size_t n = 1; n <= N; ++n) {
    const double t = static_cast<double>(n) * cfg.step;
    traj.t[n] = t;
    Vec3 hist{};
    for (std::size_t k = 0; k < 3; ++k) {
      const double conv = n > 1 ? dot(&reversed[k][N - n + 1], &g[k][1], n - 1) : 0.0;
      const double start = start_kernel(sys.order.alpha[k], n) * gamma_inv[k] * g[k][0];
      hist[k] = sys.x0[k] + h_alpha[k] * (start + conv);
    }
    const Vec3 f = forcing_at(t);
    const Vec3 x = solve_stage(rhs, hist, D, f, traj.x[n - 1], cfg, t);
    traj.x[n] = x;
    const Vec3 gn = rhs(x, f);
    for (std::size_t k = 0; k < 3; ++k) g[k][n] = gn[k];
  }
  return traj;
}

DecayDiagnostic decay_diagnostic(const Trajectory& traj, double nu, std::pair<double, double> window) {
  const auto [lo, hi] = window;
  if (traj.t.empty() || !(lo > 0.0) || !(hi > lo) || hi > traj.t.back() * (1.0 + 1e-12) || !(nu >= 0.0)) {
    throw std::invalid_argument("decay window must satisfy 0 < t_lo < t_hi <= t_end and nu >= 0");
  }
  const double q2 = lo * std::pow(hi / lo, 0.5);
  const double q3 = lo * std::pow(hi / lo, 0.75);
  DecayDiagnostic d;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double t = traj.t[i];
    if (t < lo || t > hi * (1.0 + 1e-12)) continue;
    const double v = std::pow(t, nu) * norm2(traj.x[i]);
    d.series.emplace_back(t, v);
    d.sup = std::max(d.sup, v);
    if (t >= q2 && t <= q3) d.third_quarter_sup = std::max(d.third_quarter_sup, v);
    if (t >= q3) d.last_quarter_sup = std::max(d.last_quarter_sup, v);
  }
  d.plateau = d.last_quarter_sup > 0.5 * d.third_quarter_sup && d.last_quarter_sup < 2.0 * d.third_quarter_sup;
  return d;
}

DecayDiagnostic attach_diagnostic(Trajectory& traj, double nu, std::pair<double, double> window) {
  DecayDiagnostic d = decay_diagnostic(traj, nu, window);
  traj.nu = nu;
  traj.scaled_norm = d.series;
  return d;
}

std::string_view to_string(BasinStatus s) noexcept {
  switch (s) {
    case BasinStatus::Decaying: return "Decaying";
    case BasinStatus::NotPlateau: return "NotPlateau";
    case BasinStatus::SolverFailure: return "SolverFailure";
  }
  return "?";
}

unsigned worker_count(unsigned requested) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACSTAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) cap = static_cast<unsigned>(v);
  }
  return requested > 0 ? std::min(requested, cap) : cap;
}

std::vector<BasinResult> simulate_nonlinear_basin(const MultiOrderSystem& sys, const SolverConfig& cfg,
                                                  const std::vector<double>& radii, const BasinOptions& options) {
  MultiOrderSystem base = validate(sys);
  base.forcing.reset();
  Vec3 dir = base.x0;
  const double n0 = norm2(dir);
  if (n0 > 0.0) {
    for (double& v : dir) v /= n0;
  } else {
    dir = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  }
  const std::pair<double, double> window = options.window.value_or(std::make_pair(cfg.t_end / 10.0, cfg.t_end));
  const double nu = base.order.min();

  std::vector<BasinResult> out(radii.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < radii.size(); i = next++) {
      BasinResult& r = out[i];
      r.radius = radii[i];
      MultiOrderSystem s = base;
      for (std::size_t k = 0; k < 3; ++k) s.x0[k] = radii[i] * dir[k];
      try {
        const Trajectory traj = integrate(s, cfg);
        const DecayDiagnostic d = decay_diagnostic(traj, nu, window);
        r.sup = d.sup;
        r.plateau = d.plateau;
        r.final_norm = norm2(traj.x.back());
        if (d.sup == 0.0) {
          r.status = BasinStatus::Decaying;
          r.message = "equilibrium";
        } else {
          r.status = d.plateau && r.final_norm <= radii[i] ? BasinStatus::Decaying : BasinStatus::NotPlateau;
        }
      } catch (const std::exception& e) {
        r.status = BasinStatus::SolverFailure;
        r.message = e.what();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(options.threads), static_cast<unsigned>(radii.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace fracstab
