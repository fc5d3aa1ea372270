#include "fracstab/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracstab/error.hpp"
#include "json.hpp"

namespace fracstab {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

// Recursive-descent reader for the key-value subset described in config.hpp.
class KeyValueReader {
 public:
  explicit KeyValueReader(std::string_view text) : text_(text) {}

  json read() {
    json root = json::object();
    std::vector<std::string> section;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        section = read_key_path();
        skip_inline_space();
        expect(']');
        end_of_statement();
        continue;
      }
      std::vector<std::string> path = section;
      for (auto& part : read_key_path()) path.push_back(std::move(part));
      skip_inline_space();
      expect('=');
      skip_inline_space();
      json value = read_value();
      assign(root, path, std::move(value));
      end_of_statement();
    }
    return root;
  }

 private:
  [[nodiscard]] bool eof() const { return pos_ >= text_.size(); }
  [[nodiscard]] char peek() const { return eof() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    bad_config("line " + std::to_string(line()) + ": " + what);
  }

  [[nodiscard]] std::size_t line() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) n += text_[i] == '\n';
    return n;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  // Whitespace, newlines and comments; legal inside brackets and between statements.
  void skip_blank_lines() {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        skip_comment();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void end_of_statement() {
    skip_inline_space();
    if (peek() == '#') skip_comment();
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string read_key_part() {
    if (peek() == '"') return read_string();
    std::string key;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> read_key_path() {
    std::vector<std::string> parts{read_key_part()};
    skip_inline_space();
    while (peek() == '.') {
      ++pos_;
      skip_inline_space();
      parts.push_back(read_key_part());
      skip_inline_space();
    }
    return parts;
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (!eof() && peek() != '"') {
      char c = peek();
      ++pos_;
      if (c == '\\' && !eof()) {
        const char e = peek();
        ++pos_;
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      if (c == '\n') fail("unterminated string");
      out.push_back(c);
    }
    expect('"');
    return out;
  }

  json read_value() {
    const char c = peek();
    if (c == '[') return read_array();
    if (c == '{') return read_inline_table();
    if (c == '"') return read_string();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return read_number();
  }

  json read_number() {
    std::size_t end = pos_;
    while (end < text_.size()) {
      const char c = text_[end];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-' ||
          c == '_') {
        ++end;
      } else {
        break;
      }
    }
    std::string token(text_.substr(pos_, end - pos_));
    std::erase(token, '_');
    if (token.empty()) fail("expected a value");
    char* parse_end = nullptr;
    const double v = std::strtod(token.c_str(), &parse_end);
    if (parse_end != token.c_str() + token.size()) fail("malformed number '" + token + "'");
    pos_ = end;
    return v;
  }

  json read_array() {
    expect('[');
    json arr = json::array();
    skip_blank_lines();
    while (peek() != ']') {
      arr.push_back(read_value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
        skip_blank_lines();
      } else if (peek() != ']') {
        fail("expected ',' or ']'");
      }
    }
    expect(']');
    return arr;
  }

  json read_inline_table() {
    expect('{');
    json obj = json::object();
    skip_blank_lines();
    while (peek() != '}') {
      auto path = read_key_path();
      skip_inline_space();
      expect('=');
      skip_blank_lines();
      assign(obj, path, read_value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
        skip_blank_lines();
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    expect('}');
    return obj;
  }

  void assign(json& root, const std::vector<std::string>& path, json value) const {
    json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) fail("key '" + path[i] + "' is both a value and a table");
      node = &child;
    }
    if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*node)[path.back()] = std::move(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad_config(where + " must be a number");
  return j.get<double>();
}

Vec3 as_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad_config(where + " must be an array of 3 numbers");
  return {as_number(j[0], where), as_number(j[1], where), as_number(j[2], where)};
}

const json* find_any(const json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (auto it = obj.find(n); it != obj.end()) return &*it;
  }
  return nullptr;
}

double required(const json& obj, std::initializer_list<const char*> names, const std::string& where) {
  const json* v = find_any(obj, names);
  if (!v) bad_config(where + " is missing '" + *names.begin() + "'");
  return as_number(*v, where + "." + *names.begin());
}

const json* component(const json& table, std::size_t k) {
  if (table.is_array()) return k < table.size() ? &table[k] : nullptr;
  if (auto it = table.find(std::to_string(k + 1)); it != table.end()) return &*it;
  return nullptr;
}

void check_component_keys(const json& table, const std::string& where) {
  if (table.is_array()) {
    if (table.size() > 3) bad_config(where + " has more than 3 components");
    return;
  }
  if (!table.is_object()) bad_config(where + " must be a table keyed 1, 2, 3");
  for (const auto& [key, _] : table.items()) {
    if (key != "1" && key != "2" && key != "3") {
      bad_config(where + " has unknown component '" + key + "'");
    }
  }
}

ForcingComponent forcing_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) bad_config(where + " must be an inline table");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) bad_config(where + " needs a string 'kind'");
  const std::string kind = kind_it->get<std::string>();
  if (kind == "zero") return forcing::Zero{};
  if (kind == "constant") return forcing::Constant{required(j, {"value"}, where)};
  if (kind == "piecewise_power") {
    return forcing::PiecewisePower{required(j, {"t_break"}, where),
                                   required(j, {"before", "constant_before"}, where),
                                   required(j, {"exponent", "exponent_after"}, where)};
  }
  if (kind == "table") {
    forcing::Table table;
    if (const json* samples = find_any(j, {"samples"})) {
      if (!samples->is_array()) bad_config(where + ".samples must be an array of [t, value]");
      for (const auto& s : *samples) {
        if (!s.is_array() || s.size() != 2) bad_config(where + ".samples entries must be [t, value]");
        table.samples.emplace_back(as_number(s[0], where), as_number(s[1], where));
      }
    } else {
      const json* t = find_any(j, {"t"});
      const json* v = find_any(j, {"value", "values"});
      if (!t || !v || !t->is_array() || !v->is_array() || t->size() != v->size()) {
        bad_config(where + " needs equally long arrays 't' and 'value'");
      }
      for (std::size_t i = 0; i < t->size(); ++i) {
        table.samples.emplace_back(as_number((*t)[i], where + ".t"), as_number((*v)[i], where + ".value"));
      }
    }
    return table;
  }
  bad_config(where + " has unknown kind '" + kind + "'");
}

std::vector<PolyTerm> poly_from_json(const json& j, const std::string& where) {
  const json list = j.is_object() ? json::array({j}) : j;
  if (!list.is_array()) bad_config(where + " must be an array of terms");
  std::vector<PolyTerm> terms;
  for (const auto& t : list) {
    if (!t.is_object()) bad_config(where + " terms must be inline tables");
    PolyTerm term;
    term.coefficient = required(t, {"coef", "coefficient"}, where);
    const json* p = find_any(t, {"powers", "exponents"});
    if (!p || !p->is_array() || p->size() != 3) bad_config(where + " term needs 'powers' = [p1, p2, p3]");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(*p)[i].is_number_integer() &&
          !((*p)[i].is_number() && std::floor((*p)[i].get<double>()) == (*p)[i].get<double>())) {
        bad_config(where + " powers must be integers");
      }
      term.powers[i] = static_cast<int>((*p)[i].get<double>());
    }
    terms.push_back(term);
  }
  return terms;
}

MultiOrderSystem system_from_json(const json& root) {
  if (!root.is_object()) bad_config("top level must be a table");
  static const std::vector<std::string> known = {"alpha",  "matrix",       "x0",   "forcing",
                                                 "nonlinearity", "name", "description"};
  for (const auto& [key, _] : root.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      bad_config("unknown key '" + key + "'");
    }
  }
  MultiOrderSystem sys;
  auto alpha = root.find("alpha");
  if (alpha == root.end()) bad_config("missing 'alpha'");
  sys.order.alpha = as_vec3(*alpha, "alpha");

  auto matrix = root.find("matrix");
  if (matrix == root.end()) bad_config("missing 'matrix'");
  if (!matrix->is_array() || matrix->size() != 3) bad_config("matrix must have 3 rows");
  for (std::size_t i = 0; i < 3; ++i) {
    sys.matrix.a[i] = as_vec3((*matrix)[i], "matrix row " + std::to_string(i + 1));
  }

  if (auto x0 = root.find("x0"); x0 != root.end()) sys.x0 = as_vec3(*x0, "x0");

  if (auto f = root.find("forcing"); f != root.end()) {
    check_component_keys(*f, "forcing");
    ForcingSpec spec;
    for (std::size_t k = 0; k < 3; ++k) {
      if (const json* c = component(*f, k)) {
        spec.components[k] = forcing_from_json(*c, "forcing." + std::to_string(k + 1));
      }
    }
    sys.forcing = spec;
  }

  if (auto n = root.find("nonlinearity"); n != root.end()) {
    check_component_keys(*n, "nonlinearity");
    NonlinearitySpec spec;
    for (std::size_t k = 0; k < 3; ++k) {
      if (const json* c = component(*n, k)) {
        spec.terms[k] = poly_from_json(*c, "nonlinearity." + std::to_string(k + 1));
      }
    }
    sys.nonlinearity = spec;
  }
  return validate(sys);
}

json forcing_to_json(const ForcingComponent& f) {
  return std::visit(
      [](const auto& kind) -> json {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, forcing::Zero>) {
          return {{"kind", "zero"}};
        } else if constexpr (std::is_same_v<K, forcing::Constant>) {
          return {{"kind", "constant"}, {"value", kind.value}};
        } else if constexpr (std::is_same_v<K, forcing::PiecewisePower>) {
          return {{"kind", "piecewise_power"},
                  {"t_break", kind.t_break},
                  {"before", kind.constant_before},
                  {"exponent", kind.exponent_after}};
        } else {
          json samples = json::array();
          for (const auto& [t, v] : kind.samples) samples.push_back({t, v});
          return {{"kind", "table"}, {"samples", samples}};
        }
      },
      f);
}

}  // namespace

MultiOrderSystem parse_system(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    json root;
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      bad_config(std::string("invalid JSON: ") + e.what());
    }
    return system_from_json(root);
  }
  return system_from_json(KeyValueReader(text).read());
}

MultiOrderSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string to_json(const MultiOrderSystem& sys) {
  json root;
  root["alpha"] = sys.order.alpha;
  root["matrix"] = sys.matrix.a;
  root["x0"] = sys.x0;
  if (sys.forcing) {
    json f = json::object();
    for (std::size_t k = 0; k < 3; ++k) f[std::to_string(k + 1)] = forcing_to_json(sys.forcing->components[k]);
    root["forcing"] = f;
  }
  if (sys.nonlinearity) {
    json n = json::object();
    for (std::size_t k = 0; k < 3; ++k) {
      json terms = json::array();
      for (const auto& t : sys.nonlinearity->terms[k]) {
        terms.push_back({{"coef", t.coefficient}, {"powers", t.powers}});
      }
      n[std::to_string(k + 1)] = terms;
    }
    root["nonlinearity"] = n;
  }
  return root.dump(2);
}

}  // namespace fracstab
