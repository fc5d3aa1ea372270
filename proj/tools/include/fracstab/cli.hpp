#pragma once

// Command layer of the `fracstab` executable. Kept as a library so the
// commands can be driven from tests without spawning processes.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracstab/model.hpp"

namespace fracstab::cli {

enum class Command { Classify, PrintCharFn, Analyze, Oracle, Simulate, Basin, Sweep };

[[nodiscard]] std::optional<Command> parse_command(const std::string& name);
[[nodiscard]] std::string command_name(Command c);

struct RunManifest {
  Command command = Command::Analyze;
  std::filesystem::path input_path;
  std::filesystem::path output_dir = ".";

  std::optional<double> step;
  std::optional<double> t_end;
  std::optional<Vec3> x0;
  std::optional<double> epsilon;
  std::optional<double> radius;
  std::optional<double> nu;
  std::optional<std::pair<double, double>> window;

  bool json = false;
  bool dump_contour = false;
  bool svg = false;
  std::size_t stride = 1;
  std::vector<double> radii{1e-3, 1e-2};
  std::string sweep_param;
  std::string sweep_grid;  // lo:hi:count
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitContradiction = 2;

/// Executes one command. Reports go to `out`, problems to `err`; files are
/// written atomically into manifest.output_dir.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Parses "nu=0.3,window=100:1000".
[[nodiscard]] std::pair<double, std::pair<double, double>> parse_diag(const std::string& spec);
/// Parses "lo:hi".
[[nodiscard]] std::pair<double, double> parse_window(const std::string& spec);

struct SweepGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  [[nodiscard]] std::vector<double> values() const;
};
[[nodiscard]] SweepGrid parse_grid(const std::string& spec);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form.
[[nodiscard]] std::string fmt(double v);

}  // namespace fracstab::cli
