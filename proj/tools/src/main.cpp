#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fracstab/cli.hpp"

int main(int argc, char** argv) {
  using fracstab::cli::Command;
  using fracstab::cli::RunManifest;

  CLI::App app{"Stability analysis and simulation of three-dimensional multi-order Caputo systems"};
  app.require_subcommand(1);

  RunManifest m;
  std::string input;
  std::string out_dir = ".";
  std::string x0_text;
  std::string window_text;
  std::string diag_text;
  std::vector<double> x0;
  std::vector<double> radii;
  double step = 0, t_end = 0, eps = 0, radius = 0, nu = 0;

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::Classify, "classify", "Match the matrix against the structural patterns"},
      {Command::PrintCharFn, "print-charfn", "Print the characteristic function"},
      {Command::Analyze, "analyze", "Run every criterion and the winding-number check"},
      {Command::Oracle, "oracle", "Count zeros of Q in the right half plane"},
      {Command::Simulate, "simulate", "Integrate the system and write trajectory.csv"},
      {Command::Basin, "basin", "Simulate the nonlinear system from several initial radii"},
      {Command::Sweep, "sweep", "Analyze a one-parameter family"},
  };

  std::vector<std::pair<CLI::App*, Command>> handles;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    handles.emplace_back(sub, s.command);
    sub->add_option("input", input, "System description (key-value or JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    if (s.command == Command::PrintCharFn) sub->add_flag("--json", m.json, "Emit JSON");
    if (s.command == Command::Oracle) {
      sub->add_option("--epsilon", eps, "Inner contour radius");
      sub->add_option("--radius", radius, "Outer contour radius");
      sub->add_flag("--dump-contour", m.dump_contour, "Write contour.csv");
    }
    if (s.command == Command::Simulate || s.command == Command::Basin) {
      sub->add_option("--step", step, "Grid step");
      sub->add_option("--t-end", t_end, "Final time");
      sub->add_option("--window", window_text, "Diagnostic window lo:hi");
    }
    if (s.command == Command::Simulate) {
      sub->add_option("--x0", x0, "Initial value x1 x2 x3")->expected(3);
      sub->add_option("--nu", nu, "Decay exponent for the diagnostic");
      sub->add_option("--diag", diag_text, "nu=<v>,window=<lo>:<hi>");
      sub->add_option("--stride", m.stride, "Write every n-th grid point");
      sub->add_flag("--svg", m.svg, "Write SVG plots");
    }
    if (s.command == Command::Basin) {
      sub->add_option("--x0", x0, "Direction of the initial values")->expected(3);
      sub->add_option("--radii", radii, "Initial-value norms");
    }
    if (s.command == Command::Sweep) {
      sub->add_option("--param", m.sweep_param, "Matrix entry aIJ or order alphaK")->required();
      sub->add_option("--grid", m.sweep_grid, "lo:hi:count")->required();
    }
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = nullptr;
  for (auto& [sub, cmd] : handles) {
    if (sub->parsed()) {
      chosen = sub;
      m.command = cmd;
    }
  }
  m.input_path = input;
  m.output_dir = out_dir;
  auto given = [&](const char* name) {
    const CLI::Option* o = chosen->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  try {
    if (given("--step")) m.step = step;
    if (given("--t-end")) m.t_end = t_end;
    if (given("--epsilon")) m.epsilon = eps;
    if (given("--radius")) m.radius = radius;
    if (given("--nu")) m.nu = nu;
    if (given("--x0")) m.x0 = fracstab::Vec3{x0[0], x0[1], x0[2]};
    if (given("--radii")) m.radii = radii;
    if (given("--window")) m.window = fracstab::cli::parse_window(window_text);
    if (given("--diag")) {
      const auto [v, w] = fracstab::cli::parse_diag(diag_text);
      m.nu = v;
      m.window = w;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fracstab::cli::kExitUsage;
  }
  return fracstab::cli::run(m, std::cout, std::cerr);
}
