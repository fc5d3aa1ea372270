#include "fracstab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fracstab/char_fn.hpp"
#include "fracstab/classifier.hpp"
#include "fracstab/config.hpp"
#include "fracstab/criteria.hpp"
#include "fracstab/error.hpp"
#include "fracstab/solver.hpp"
#include "fracstab/zero_oracle.hpp"
#include "json.hpp"

namespace fracstab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised after the diagnostic dump has been written.
class Contradiction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::string join_fired(const StabilityReport& r) {
  std::string s;
  for (CriterionId id : r.fired()) {
    if (!s.empty()) s += '+';
    s += to_string(id);
  }
  return s.empty() ? "none" : s;
}

std::string witness_text(const CriterionResult& r) {
  std::string s;
  for (const auto& [k, v] : r.witness) {
    s += s.empty() ? "" : ", ";
    s += k + "=" + fmt(v);
  }
  return s;
}

json report_json(const StabilityReport& r) {
  json j;
  j["overall"] = std::string(to_string(r.overall));
  j["fired"] = json::array();
  for (CriterionId id : r.fired()) j["fired"].push_back(std::string(to_string(id)));
  j["criteria"] = json::array();
  for (const auto& c : r.results) {
    json w = json::object();
    for (const auto& [k, v] : c.witness) w[k] = v;
    j["criteria"].push_back({{"id", std::string(to_string(c.id))},
                             {"applicable", c.applicable},
                             {"verdict", std::string(to_string(c.verdict))},
                             {"witness", w},
                             {"note", c.note}});
  }
  if (r.simple) {
    const auto& q = *r.simple;
    j["simple"] = {{"beta", q.beta}, {"a", q.a}, {"b", q.b}, {"c", q.c}, {"d", q.d}};
  }
  if (r.oracle) {
    j["oracle"] = {{"status", r.oracle->status}, {"axis_zero", r.oracle->axis_zero}};
    if (r.oracle->rhp_zero_count) j["oracle"]["rhp_zero_count"] = *r.oracle->rhp_zero_count;
  }
  return j;
}

void write_diagnostic(const fs::path& dir, const MultiOrderSystem& sys, const std::string& what,
                      const std::optional<StabilityReport>& report) {
  json j;
  j["error"] = what;
  j["system"] = json::parse(to_json(sys));
  j["characteristic_function"] = build_general(sys.order, sys.matrix).to_string();
  if (report) j["report"] = report_json(*report);
  write_atomic(dir / "diagnostic.json", j.dump(2) + "\n");
}

MultiOrderSystem load(const RunManifest& m) {
  MultiOrderSystem sys = load_system(m.input_path);
  if (m.x0) sys.x0 = *m.x0;
  return validate(sys);
}

// ---------------------------------------------------------------- classify

int do_classify(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem sys = load(m);
  const ClassificationReport rep = classify_report(sys.order, sys.matrix);
  out << "matched patterns: " << rep.matches.size() << "\n";
  for (const auto& c : rep.matches) {
    out << "  case #" << c.case_id << ":";
    for (const auto& cond : c.conditions) out << " [" << cond.label << ", residual " << fmt(cond.residual) << "]";
    out << "\n    predicted beta = (" << fmt(c.predicted_beta[0]) << ", " << fmt(c.predicted_beta[1]) << ", "
        << fmt(c.predicted_beta[2]) << ")\n";
  }
  if (rep.simple) {
    const auto& q = *rep.simple;
    out << "structural form: beta = (" << fmt(q.beta[0]) << ", " << fmt(q.beta[1]) << ", " << fmt(q.beta[2]) << ", "
        << fmt(q.beta[3]) << "), a = " << fmt(q.a) << ", b = " << fmt(q.b) << ", c = " << fmt(q.c)
        << ", d = " << fmt(q.d) << "\n";
  } else {
    out << "structural form: not reducible (more than three middle terms)\n";
  }
  for (const auto& line : rep.cross_checks) out << "cross-check: " << line << "\n";
  for (const auto& line : rep.discrepancies) out << "discrepancy: " << line << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- print-charfn

int do_print(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem sys = load(m);
  const GeneralCharFn q = build_general(sys.order, sys.matrix);
  const auto simple = try_simple(q);
  if (m.json) {
    json j;
    j["q"] = q.to_string();
    j["terms"] = json::array();
    for (const auto& t : q.terms()) j["terms"].push_back({{"exponent", t.exponent}, {"coefficient", t.coefficient}});
    j["det"] = q.det();
    if (simple) {
      j["simple"] = {{"beta", simple->beta}, {"a", simple->a}, {"b", simple->b}, {"c", simple->c}, {"d", simple->d}};
    } else {
      j["simple"] = nullptr;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "Q(s) = " << q.to_string() << "\n";
  out << "det A = " << fmt(q.det()) << "\n";
  if (!simple) {
    out << "simple form: not reducible\n";
    return kExitOk;
  }
  out << "simple form: s^" << fmt(simple->beta[3]) << " - a s^" << fmt(simple->beta[2]) << " - b s^"
      << fmt(simple->beta[1]) << " - c s^" << fmt(simple->beta[0]) << " - d\n";
  out << "  a = " << fmt(simple->a) << ", b = " << fmt(simple->b) << ", c = " << fmt(simple->c)
      << ", d = " << fmt(simple->d) << "\n";
  try {
    const RhoSet r = rho_set(*simple);
    out << "  rho = (" << fmt(r.rho[0]) << ", " << fmt(r.rho[1]) << ", " << fmt(r.rho[2]) << "), rho~ = ("
        << fmt(r.rho_tilde[0]) << ", " << fmt(r.rho_tilde[1]) << ", " << fmt(r.rho_tilde[2]) << ")\n";
  } catch (const Error&) {
    out << "  rho undefined (beta4 = 2)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

int do_analyze(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const MultiOrderSystem sys = load(m);
  const GeneralCharFn q = build_general(sys.order, sys.matrix);
  out << "Q(s) = " << q.to_string() << "\n";
  StabilityReport report;
  try {
    report = assess(q, AssessOptions{true, false});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InternalContradiction) throw;
    write_diagnostic(m.output_dir, sys, e.what(), std::nullopt);
    err << e.what() << "\n";
    throw Contradiction(e.what());
  }
  for (const auto& r : report.results) {
    out << to_string(r.id) << ": ";
    if (!r.applicable) {
      out << "not applicable (" << r.note << ")\n";
      continue;
    }
    out << to_string(r.verdict);
    const std::string w = witness_text(r);
    if (!w.empty()) out << " [" << w << "]";
    if (!r.note.empty()) out << " " << r.note;
    out << "\n";
  }
  if (report.oracle) {
    out << "oracle: ";
    if (report.oracle->rhp_zero_count) {
      out << "Z = " << *report.oracle->rhp_zero_count << " zeros in Re s > 0\n";
    } else {
      out << report.oracle->status << "\n";
    }
  }
  out << "overall: " << to_string(report.overall) << " by " << join_fired(report) << "\n";
  json j = report_json(report);
  j["q"] = q.to_string();
  write_atomic(m.output_dir / "analyze.json", j.dump(2) + "\n");
  if (const auto mismatch = oracle_mismatch(report)) {
    write_diagnostic(m.output_dir, sys, *mismatch, report);
    err << "criterion/oracle mismatch: " << *mismatch << "\n";
    throw Contradiction(*mismatch);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

int do_oracle(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem sys = load(m);
  const GeneralCharFn q = build_general(sys.order, sys.matrix);
  out << "Q(s) = " << q.to_string() << "\n";

  const auto roots = scan_imaginary_axis(q);
  out << "imaginary-axis scan up to w = " << fmt(axis_scan_bound(q)) << ": " << roots.size() << " root(s) of h2\n";
  for (const auto& r : roots) out << "  w = " << fmt(r.omega) << ", h1 = " << fmt(r.h1) << "\n";

  ContourSpec spec;
  try {
    spec = auto_contour(q);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroAtOrigin) throw;
    out << "result: Q(0) = 0, zero at the origin; not asymptotically stable\n";
    return kExitOk;
  }
  if (m.epsilon) spec.epsilon = *m.epsilon;
  if (m.radius) spec.radius = *m.radius;
  if (!contour_certified(q, spec)) out << "warning: contour eps/R do not satisfy the dominance bounds\n";

  if (m.dump_contour) {
    std::ostringstream csv;
    csv << "segment,t,re,im\n";
    for (const auto& s : sample_contour(q, spec)) {
      csv << static_cast<int>(s.segment) << "," << fmt(s.t) << "," << fmt(s.value.real()) << ","
          << fmt(s.value.imag()) << "\n";
    }
    write_atomic(m.output_dir / "contour.csv", csv.str());
  }

  try {
    const WindingResult w = count_rhp_zeros(q, spec);
    out << "contour: eps = " << fmt(spec.epsilon) << ", R = " << fmt(spec.radius) << ", samples = " << w.samples
        << ", min |Q| = " << fmt(w.min_abs_on_contour) << "\n";
    out << "turning (rad): gamma1 = " << fmt(w.segment_turning[0]) << ", gamma2 = " << fmt(w.segment_turning[1])
        << ", gamma3 = " << fmt(w.segment_turning[2]) << ", gamma4 = " << fmt(w.segment_turning[3])
        << ", total = " << fmt(w.total_turning) << "\n";
    out << "result: Z = " << w.zero_count << " zeros in Re s > 0 (winding count)\n";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroOnAxis) {
      out << "result: zero on the imaginary axis; not asymptotically stable (" << e.what() << ")\n";
    } else if (e.code() == ErrorCode::SamplingInconclusive) {
      out << "result: inconclusive (" << e.what() << ")\n";
    } else {
      throw;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

SolverConfig solver_config(const RunManifest& m) {
  SolverConfig cfg;
  cfg.step = m.step.value_or(0.005);
  cfg.t_end = m.t_end.value_or(100.0);
  return cfg;
}

// Log-x line plot, one polyline per series.
std::string svg_plot(const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
                     const std::string& title) {
  constexpr double W = 800, H = 480, L = 70, R = 20, T = 40, B = 50;
  double tmin = INFINITY, tmax = 0, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& [name, pts] : series) {
    for (const auto& [t, y] : pts) {
      if (!(t > 0.0) || !std::isfinite(y)) continue;
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(tmax > tmin)) {
    tmin = 1.0;
    tmax = 10.0;
  }
  if (!(ymax > ymin)) {
    ymin = std::isfinite(ymin) ? ymin - 1.0 : -1.0;
    ymax = ymin + 2.0;
  }
  const double lt0 = std::log10(tmin), lt1 = std::log10(tmax);
  auto px = [&](double t) { return L + (std::log10(t) - lt0) / (lt1 - lt0) * (W - L - R); };
  auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(lt0)); d <= static_cast<int>(std::floor(lt1)); ++d) {
    const double x = px(std::pow(10.0, d));
    s << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/><text x=\"" << x - 12 << "\" y=\"" << H - B + 20
      << "\" font-family=\"sans-serif\" font-size=\"11\">1e" << d << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    s << "<text x=\"4\" y=\"" << py(y) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(y)
      << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    s << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  std::size_t idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = colors[idx % 4];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    // Thin to at most ~4 points per horizontal pixel.
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 3000);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
      const auto& [t, y] = pts[i];
      if (t > 0.0 && std::isfinite(y)) s << px(t) << "," << py(y) << " ";
    }
    s << "\"/>\n";
    s << "<text x=\"" << W - R - 60 << "\" y=\"" << T + 16 + 14 * idx << "\" fill=\"" << color
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
    ++idx;
  }
  s << "</svg>\n";
  return s.str();
}

int do_simulate(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem sys = load(m);
  const SolverConfig cfg = solver_config(m);
  Trajectory traj = integrate(sys, cfg);
  const std::size_t stride = std::max<std::size_t>(1, m.stride);

  std::string csv = "t,x1,x2,x3\n";
  csv.reserve(traj.t.size() / stride * 80 + 64);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (i % stride != 0 && i + 1 != traj.t.size()) continue;
    csv += fmt(traj.t[i]) + "," + fmt(traj.x[i][0]) + "," + fmt(traj.x[i][1]) + "," + fmt(traj.x[i][2]) + "\n";
  }
  write_atomic(m.output_dir / "trajectory.csv", csv);
  const auto& xe = traj.x.back();
  out << "integrated " << traj.t.size() - 1 << " steps of " << fmt(cfg.step) << " to t = " << fmt(cfg.t_end) << "\n";
  out << "x(t_end) = (" << fmt(xe[0]) << ", " << fmt(xe[1]) << ", " << fmt(xe[2]) << ")\n";

  std::optional<DecayDiagnostic> diag;
  if (m.nu || m.window) {
    const double nu = m.nu.value_or(sys.order.min());
    const auto window = m.window.value_or(std::make_pair(cfg.t_end / 10.0, cfg.t_end));
    try {
      diag = attach_diagnostic(traj, nu, window);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    std::string sc = "t,scaled_norm\n";
    for (const auto& [t, v] : diag->series) sc += fmt(t) + "," + fmt(v) + "\n";
    write_atomic(m.output_dir / "scaled_norm.csv", sc);
    out << "decay diagnostic nu = " << fmt(nu) << " on [" << fmt(window.first) << ", " << fmt(window.second)
        << "]: sup = " << fmt(diag->sup) << ", third-quarter sup = " << fmt(diag->third_quarter_sup)
        << ", last-quarter sup = " << fmt(diag->last_quarter_sup) << ", plateau = " << (diag->plateau ? "yes" : "no")
        << "\n";
  }

  if (m.svg) {
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series(3);
    for (std::size_t k = 0; k < 3; ++k) {
      series[k].first = "x" + std::to_string(k + 1);
      for (std::size_t i = 1; i < traj.t.size(); ++i) series[k].second.emplace_back(traj.t[i], traj.x[i][k]);
    }
    write_atomic(m.output_dir / "trajectory.svg", svg_plot(series, "x(t), logarithmic time axis"));
    if (diag) {
      std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> sn(3);
      for (std::size_t k = 0; k < 3; ++k) {
        sn[k].first = "t^nu x" + std::to_string(k + 1);
        for (std::size_t i = 1; i < traj.t.size(); ++i) {
          sn[k].second.emplace_back(traj.t[i], std::pow(traj.t[i], traj.nu) * traj.x[i][k]);
        }
      }
      write_atomic(m.output_dir / "scaled.svg", svg_plot(sn, "t^nu x(t), nu = " + fmt(traj.nu)));
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- basin

int do_basin(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem sys = load(m);
  const SolverConfig cfg = solver_config(m);
  BasinOptions opts;
  opts.window = m.window;
  const auto results = simulate_nonlinear_basin(sys, cfg, m.radii, opts);
  std::string csv = "radius,status,sup,plateau,final_norm,message\n";
  for (const auto& r : results) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    csv += fmt(r.radius) + "," + std::string(to_string(r.status)) + "," + fmt(r.sup) + "," +
           (r.plateau ? "true" : "false") + "," + fmt(r.final_norm) + "," + msg + "\n";
    out << "radius " << fmt(r.radius) << ": " << to_string(r.status) << " (sup t^nu|x| = " << fmt(r.sup)
        << ", |x(t_end)| = " << fmt(r.final_norm) << ")";
    if (!r.message.empty()) out << " " << r.message;
    out << "\n";
  }
  write_atomic(m.output_dir / "basin.csv", csv);
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepTarget {
  bool is_order = false;
  std::size_t i = 0;
  std::size_t j = 0;
};

SweepTarget parse_target(const std::string& p) {
  auto digit = [&](char c) -> std::size_t {
    if (c < '1' || c > '3') throw UsageError("parameter index must be 1..3 in '" + p + "'");
    return static_cast<std::size_t>(c - '1');
  };
  if (p.size() == 6 && p.rfind("alpha", 0) == 0) return {true, digit(p[5]), 0};
  if (p.size() == 3 && p[0] == 'a') return {false, digit(p[1]), digit(p[2])};
  throw UsageError("sweep parameter must be aIJ (matrix entry) or alphaK (order), got '" + p + "'");
}

struct SweepRow {
  double value = 0.0;
  std::string verdict;
  std::string fired;
  std::string z = "NA";
};

int do_sweep(const RunManifest& m, std::ostream& out) {
  const MultiOrderSystem base = load(m);
  const SweepTarget target = parse_target(m.sweep_param);
  const std::vector<double> values = parse_grid(m.sweep_grid).values();

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = values[i];
      MultiOrderSystem s = base;
      if (target.is_order) {
        s.order.alpha[target.i] = values[i];
      } else {
        s.matrix(target.i, target.j) = values[i];
      }
      try {
        const StabilityReport r = assess(validate(s), AssessOptions{true, false});
        row.verdict = std::string(to_string(r.overall));
        row.fired = join_fired(r);
        if (r.oracle && r.oracle->rhp_zero_count) row.z = std::to_string(*r.oracle->rhp_zero_count);
        if (r.oracle && r.oracle->axis_zero) row.z = "axis";
        if (oracle_mismatch(r)) row.verdict = "Mismatch";
      } catch (const Error& e) {
        row.verdict = "Error:" + std::string(to_string(e.code()));
        row.fired = "none";
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(1, values.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::string csv = "value,overall_verdict,fired_criterion,oracle_Z\n";
  for (const auto& r : rows) csv += fmt(r.value) + "," + r.verdict + "," + r.fired + "," + r.z + "\n";
  write_atomic(m.output_dir / "sweep.csv", csv);

  std::size_t changes = 0;
  std::size_t at = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].verdict != rows[i - 1].verdict) {
      ++changes;
      at = i;
    }
  }
  out << "swept " << m.sweep_param << " over " << rows.size() << " value(s)\n";
  if (changes == 1) {
    out << "boundary: " << rows[at - 1].verdict << " at " << fmt(rows[at - 1].value) << " -> " << rows[at].verdict
        << " at " << fmt(rows[at].value) << "\n";
  } else {
    out << "boundary: none (verdict changes " << changes << " time(s))\n";
  }
  const bool mismatch = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.verdict == "Mismatch"; });
  if (mismatch) {
    json j;
    j["error"] = "criterion/oracle mismatch in sweep";
    j["system"] = json::parse(to_json(base));
    j["parameter"] = m.sweep_param;
    for (const auto& r : rows) {
      if (r.verdict == "Mismatch") j["values"].push_back(r.value);
    }
    write_atomic(m.output_dir / "diagnostic.json", j.dump(2) + "\n");
    throw Contradiction("criterion/oracle mismatch in sweep");
  }
  return kExitOk;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "classify") return Command::Classify;
  if (name == "print-charfn") return Command::PrintCharFn;
  if (name == "analyze") return Command::Analyze;
  if (name == "oracle") return Command::Oracle;
  if (name == "simulate") return Command::Simulate;
  if (name == "basin") return Command::Basin;
  if (name == "sweep") return Command::Sweep;
  return std::nullopt;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::PrintCharFn: return "print-charfn";
    case Command::Analyze: return "analyze";
    case Command::Oracle: return "oracle";
    case Command::Simulate: return "simulate";
    case Command::Basin: return "basin";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

std::string fmt(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, p) : std::string("nan");
}

std::pair<double, double> parse_window(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("window must be lo:hi, got '" + spec + "'");
  return {parse_number(spec.substr(0, colon)), parse_number(spec.substr(colon + 1))};
}

std::pair<double, std::pair<double, double>> parse_diag(const std::string& spec) {
  std::optional<double> nu;
  std::optional<std::pair<double, double>> window;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("diag item must be key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (key == "nu") {
      nu = parse_number(val);
    } else if (key == "window") {
      window = parse_window(val);
    } else {
      throw UsageError("unknown diag key '" + key + "'");
    }
  }
  if (!nu || !window) throw UsageError("diag needs nu=<v>,window=<lo>:<hi>");
  return {*nu, *window};
}

std::vector<double> SweepGrid::values() const {
  std::vector<double> v;
  v.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto last = static_cast<double>(count - 1);
    const auto k = static_cast<double>(i);
    v.push_back(count == 1 ? lo : (lo * (last - k) + hi * k) / last);
  }
  return v;
}

SweepGrid parse_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw UsageError("grid must be lo:hi:count, got '" + spec + "'");
  SweepGrid g;
  g.lo = parse_number(spec.substr(0, c1));
  g.hi = parse_number(spec.substr(c1 + 1, c2 - c1 - 1));
  const double n = parse_number(spec.substr(c2 + 1));
  if (n < 0 || n != std::floor(n)) throw UsageError("grid count must be a non-negative integer");
  g.count = static_cast<std::size_t>(n);
  return g;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(m.output_dir, ec);
    if (ec) throw UsageError("cannot create output directory " + m.output_dir.string() + ": " + ec.message());
    switch (m.command) {
      case Command::Classify: return do_classify(m, out);
      case Command::PrintCharFn: return do_print(m, out);
      case Command::Analyze: return do_analyze(m, out, err);
      case Command::Oracle: return do_oracle(m, out);
      case Command::Simulate: return do_simulate(m, out);
      case Command::Basin: return do_basin(m, out);
      case Command::Sweep: return do_sweep(m, out);
    }
  } catch (const Contradiction&) {
    return kExitContradiction;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error in " << command_name(m.command) << " for " << m.input_path.string() << ": " << e.what() << "\n";
    if (e.code() == ErrorCode::InternalContradiction || e.code() == ErrorCode::CriterionOracleMismatch) {
      return kExitContradiction;
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error in " << command_name(m.command) << ": " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fracstab::cli
