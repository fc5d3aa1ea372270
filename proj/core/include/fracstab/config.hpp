#pragma once

// System instances are stored as small hand-editable key-value files:
//
//   # Example: three equations, orders 0.4 / 0.3 / 0.5
//   alpha  = [0.4, 0.3, 0.5]
//   matrix = [[0, 1, -1],
//             [0.2, 0, 0],
//             [0, 0.5, 0]]
//   x0     = [1, -2, 2]
//   forcing.1 = { kind = "piecewise_power", t_break = 1, before = 1, exponent = -2 }
//   forcing.2 = { kind = "constant", value = 0.5 }
//   forcing.3 = { kind = "table", t = [0, 1, 2], value = [1, 0.5, 0] }
//   nonlinearity.1 = [ { coef = 1.0, powers = [1, 1, 0] } ]
//
// Values use TOML inline syntax (numbers, strings, booleans, arrays, inline
// tables); `[section]` headers prefix the keys that follow. A document whose
// first non-blank character is `{` is read as the equivalent JSON record.

#include <filesystem>
#include <string>
#include <string_view>

#include "fracstab/model.hpp"

namespace fracstab {

/// Parses and validates a system description. Throws Error{BadConfig} on
/// syntax or schema problems and the validate() errors on invariant violations.
[[nodiscard]] MultiOrderSystem parse_system(std::string_view text);

[[nodiscard]] MultiOrderSystem load_system(const std::filesystem::path& path);

/// JSON rendering of a system; parse_system() accepts it back unchanged.
[[nodiscard]] std::string to_json(const MultiOrderSystem& sys);

}  // namespace fracstab
