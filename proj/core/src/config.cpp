#include "kfp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kfp/errors.hpp"

namespace kfp {

namespace {

struct Token {
  std::string text;
  int line = 0;
  int column = 0;
};

struct ParsedFile {
  // section -> ordered list of (key token, value token)
  std::vector<std::pair<std::string, std::vector<std::pair<Token, Token>>>> sections;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

ParsedFile tokenize(const std::string& text) {
  ParsedFile file;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<Token, Token>>* current = nullptr;
  std::string current_name;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
    const std::string_view body = trim(line);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError(line_no, static_cast<int>(line.find('[')) + 1,
                          "unterminated section header");
      const std::string name{trim(body.substr(1, body.size() - 2))};
      if (name.empty()) throw ConfigError(line_no, 1, "empty section name");
      current = nullptr;
      for (auto& section : file.sections)
        if (section.first == name) current = &section.second;
      if (current == nullptr) {
        file.sections.emplace_back(name, std::vector<std::pair<Token, Token>>{});
        current = &file.sections.back().second;
      }
      current_name = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, 1, "expected 'key = value' or '[section]'");
    if (current == nullptr)
      throw ConfigError(line_no, 1, "key outside of any section");

    const std::string_view key_view = trim(std::string_view(line).substr(0, eq));
    const std::string_view val_view = trim(std::string_view(line).substr(eq + 1));
    if (key_view.empty()) throw ConfigError(line_no, 1, "empty key");
    if (val_view.empty())
      throw ConfigError(line_no, static_cast<int>(eq) + 2, "empty value");

    Token key{std::string(key_view), line_no,
              static_cast<int>(line.find_first_not_of(" \t")) + 1};
    Token val{std::string(val_view), line_no,
              static_cast<int>(line.find_first_not_of(" \t", eq + 1)) + 1};
    for (const auto& kv : *current)
      if (kv.first.text == key.text)
        throw ConfigError(line_no, key.column, "duplicate key '" + key.text + "' in [" +
                                                   current_name + "]");
    current->emplace_back(std::move(key), std::move(val));
  }
  return file;
}

double parse_real(const Token& t) {
  try {
    std::size_t used = 0;
    const double v = std::stod(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(t.line, t.column, "expected a number, got '" + t.text + "'");
  }
}

long long parse_int(const Token& t) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(t.line, t.column, "expected an integer, got '" + t.text + "'");
  }
}

bool parse_bool(const Token& t) {
  if (t.text == "true" || t.text == "on" || t.text == "1") return true;
  if (t.text == "false" || t.text == "off" || t.text == "0") return false;
  throw ConfigError(t.line, t.column, "expected a boolean, got '" + t.text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (const auto p = trim(cur); !p.empty()) parts.emplace_back(p);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (const auto p = trim(cur); !p.empty()) parts.emplace_back(p);
  return parts;
}

[[noreturn]] void validation_error(const std::string& field, const std::string& constraint) {
  throw ConfigError(0, 0, field + ": " + constraint);
}

}  // namespace

std::vector<double> RunConfig::effective_sample_times() const {
  if (!solver.sample_times.empty()) return solver.sample_times;
  return default_sample_times(solver.t_end, sample_count, sample_decades);
}

RunConfig parse_config(const std::string& text) {
  const ParsedFile file = tokenize(text);

  RunConfig cfg;
  bool saw_grid = false, saw_operator = false;
  int grid_dim = 1;
  double grid_l = 0.0;
  int grid_n = 0;
  double op_gamma = 0.0, op_s = 0.0;
  bool saw_gamma = false, saw_s = false, saw_l = false, saw_n = false;

  for (const auto& [section, entries] : file.sections) {
    if (section == "grid") {
      saw_grid = true;
      for (const auto& [key, val] : entries) {
        if (key.text == "dim") grid_dim = static_cast<int>(parse_int(val));
        else if (key.text == "L") { grid_l = parse_real(val); saw_l = true; }
        else if (key.text == "N") { grid_n = static_cast<int>(parse_int(val)); saw_n = true; }
        else throw ConfigError(key.line, key.column, "unknown key 'grid." + key.text + "'");
      }
    } else if (section == "operator") {
      saw_operator = true;
      for (const auto& [key, val] : entries) {
        if (key.text == "gamma") { op_gamma = parse_real(val); saw_gamma = true; }
        else if (key.text == "s") { op_s = parse_real(val); saw_s = true; }
        else throw ConfigError(key.line, key.column, "unknown key 'operator." + key.text + "'");
      }
    } else if (section == "solver") {
      for (const auto& [key, val] : entries) {
        if (key.text == "method") {
          if (val.text == "rk4") cfg.solver.method = SolverConfig::Method::rk4;
          else if (val.text == "backward_euler")
            cfg.solver.method = SolverConfig::Method::backward_euler;
          else throw ConfigError(val.line, val.column, "method must be rk4 or backward_euler");
        } else if (key.text == "dt") {
          if (val.text == "auto") { cfg.solver.dt_auto = true; cfg.solver.dt = 0.0; }
          else { cfg.solver.dt_auto = false; cfg.solver.dt = parse_real(val); }
        } else if (key.text == "t_end") cfg.solver.t_end = parse_real(val);
        else if (key.text == "samples") {
          if (val.text.find(',') == std::string::npos && val.text.find('.') == std::string::npos) {
            cfg.sample_count = static_cast<int>(parse_int(val));
          } else {
            cfg.solver.sample_times.clear();
            for (const auto& part : split_list(val.text)) {
              try {
                cfg.solver.sample_times.push_back(std::stod(part));
              } catch (const std::exception&) {
                throw ConfigError(val.line, val.column, "bad sample time '" + part + "'");
              }
            }
          }
        } else if (key.text == "sample_decades") cfg.sample_decades = parse_real(val);
        else if (key.text == "krylov_tol") cfg.solver.krylov_tol = parse_real(val);
        else if (key.text == "krylov_max_iter")
          cfg.solver.krylov_max_iter = static_cast<int>(parse_int(val));
        else throw ConfigError(key.line, key.column, "unknown key 'solver." + key.text + "'");
      }
    } else if (section == "initial") {
      for (const auto& [key, val] : entries) {
        if (key.text == "kind") {
          if (val.text == "gaussian") cfg.initial.kind = InitialDataSpec::Kind::gaussian;
          else if (val.text == "rough_random")
            cfg.initial.kind = InitialDataSpec::Kind::rough_random;
          else throw ConfigError(val.line, val.column, "kind must be gaussian or rough_random");
        } else if (key.text == "amplitude") cfg.initial.amplitude = parse_real(val);
        else if (key.text == "width") cfg.initial.width = parse_real(val);
        else if (key.text == "epsilon") cfg.initial.epsilon = parse_real(val);
        else if (key.text == "seed") cfg.initial.seed = static_cast<std::uint64_t>(parse_int(val));
        else throw ConfigError(key.line, key.column, "unknown key 'initial." + key.text + "'");
      }
    } else if (section == "source") {
      for (const auto& [key, val] : entries) {
        if (key.text == "kind") {
          if (val.text == "zero") cfg.source.kind = SourceSpec::Kind::zero;
          else if (val.text == "gaussian") cfg.source.kind = SourceSpec::Kind::gaussian;
          else throw ConfigError(val.line, val.column, "kind must be zero or gaussian");
        } else if (key.text == "amplitude") cfg.source.amplitude = parse_real(val);
        else if (key.text == "width") cfg.source.width = parse_real(val);
        else if (key.text == "time_decay") cfg.source.time_decay = parse_real(val);
        else throw ConfigError(key.line, key.column, "unknown key 'source." + key.text + "'");
      }
    } else if (section == "verify") {
      for (const auto& [key, val] : entries) {
        if (key.text == "k_max") cfg.verify.k_max = static_cast<int>(parse_int(val));
        else if (key.text == "gevrey_threshold") cfg.verify.gevrey_threshold = parse_real(val);
        else if (key.text == "family_spread_max") cfg.verify.family_spread_max = parse_real(val);
        else if (key.text == "t_min") cfg.verify.t_min = parse_real(val);
        else if (key.text == "c_max") cfg.verify.c_max = parse_real(val);
        else if (key.text == "b0_mode") {
          if (val.text == "finite_only") cfg.verify.b0_mode = EnergyThreshold::finite_only;
          else if (val.text == "exponential_envelope")
            cfg.verify.b0_mode = EnergyThreshold::exponential_envelope;
          else
            throw ConfigError(val.line, val.column,
                              "b0_mode must be finite_only or exponential_envelope");
        } else if (key.text == "checks") {
          cfg.verify.checks = split_list(val.text);
          for (const auto& c : cfg.verify.checks)
            if (c != "energy" && c != "gevrey_frequency" && c != "gevrey_weight")
              throw ConfigError(val.line, val.column, "unknown check '" + c + "'");
        } else throw ConfigError(key.line, key.column, "unknown key 'verify." + key.text + "'");
      }
    } else if (section == "output") {
      for (const auto& [key, val] : entries) {
        if (key.text == "directory") cfg.output.directory = val.text;
        else if (key.text == "csv") cfg.output.csv = parse_bool(val);
        else if (key.text == "json") cfg.output.json = parse_bool(val);
        else if (key.text == "svg") cfg.output.svg = parse_bool(val);
        else throw ConfigError(key.line, key.column, "unknown key 'output." + key.text + "'");
      }
    } else {
      throw ConfigError(0, 0, "unknown section [" + section + "]");
    }
  }

  if (!saw_grid) validation_error("grid", "section is required");
  if (!saw_operator) validation_error("operator", "section is required");
  if (!saw_l || !saw_n) validation_error("grid", "both L and N are required");
  if (!saw_gamma || !saw_s) validation_error("operator", "both gamma and s are required");

  try {
    cfg.grid = make_grid(grid_dim, grid_l, grid_n);
  } catch (const std::invalid_argument& e) {
    validation_error("grid", e.what());
  }
  try {
    cfg.params = make_operator_params(op_gamma, op_s);
  } catch (const std::invalid_argument& e) {
    validation_error("operator", e.what());
  }

  if (!(cfg.solver.t_end > 0.0)) validation_error("solver.t_end", "must be positive");
  if (!cfg.solver.dt_auto && !(cfg.solver.dt > 0.0))
    validation_error("solver.dt", "must be positive or auto");
  if (cfg.sample_count < 1) validation_error("solver.samples", "count must be at least 1");
  if (!(cfg.sample_decades > 0.0)) validation_error("solver.sample_decades", "must be positive");
  if (!cfg.solver.sample_times.empty()) {
    if (!std::is_sorted(cfg.solver.sample_times.begin(), cfg.solver.sample_times.end()))
      validation_error("solver.samples", "times must be sorted");
    if (cfg.solver.sample_times.front() <= 0.0 ||
        cfg.solver.sample_times.back() > cfg.solver.t_end)
      validation_error("solver.samples", "times must lie in (0, t_end]");
  }
  if (!(cfg.solver.krylov_tol > 0.0)) validation_error("solver.krylov_tol", "must be positive");
  if (cfg.solver.krylov_max_iter < 1)
    validation_error("solver.krylov_max_iter", "must be at least 1");
  if (cfg.initial.kind == InitialDataSpec::Kind::gaussian && !(cfg.initial.width > 0.0))
    validation_error("initial.width", "must be positive");
  if (cfg.initial.kind == InitialDataSpec::Kind::rough_random && !(cfg.initial.epsilon > 0.0))
    validation_error("initial.epsilon", "must be positive");
  if (cfg.source.kind == SourceSpec::Kind::gaussian && !(cfg.source.width > 0.0))
    validation_error("source.width", "must be positive");
  if (cfg.source.time_decay < 0.0) validation_error("source.time_decay", "must be nonnegative");
  if (cfg.verify.k_max < 1) validation_error("verify.k_max", "must be at least 1");
  if (!(cfg.verify.gevrey_threshold >= 1.0))
    validation_error("verify.gevrey_threshold", "must be at least 1");
  if (!(cfg.verify.family_spread_max >= 1.0))
    validation_error("verify.family_spread_max", "must be at least 1");
  if (cfg.verify.t_min < 0.0) validation_error("verify.t_min", "must be nonnegative");
  if (cfg.params.s == 1.0) {
    for (const auto& c : cfg.verify.checks)
      if (c == "gevrey_frequency" || c == "gevrey_weight")
        validation_error("verify.checks",
                         "gevrey checks require 0 < s < 1 (s = 1 is solver-only)");
  }
  if (cfg.output.directory.empty()) validation_error("output.directory", "must not be empty");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, 0, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::json config_echo(const RunConfig& c) {
  nlohmann::json j;
  j["grid"] = {{"dim", c.grid.dim}, {"L", c.grid.half_width}, {"N", c.grid.n_per_axis}};
  j["operator"] = {{"gamma", c.params.gamma},
                   {"s", c.params.s},
                   {"s_tilde", c.params.s_tilde()},
                   {"weight_exponent", c.params.weight_exponent()}};
  j["solver"] = {
      {"method", c.solver.method == SolverConfig::Method::rk4 ? "rk4" : "backward_euler"},
      {"dt", c.solver.dt_auto ? nlohmann::json("auto") : nlohmann::json(c.solver.dt)},
      {"t_end", c.solver.t_end},
      {"samples", c.solver.sample_times.empty() ? nlohmann::json(c.sample_count)
                                                : nlohmann::json(c.solver.sample_times)},
      {"sample_decades", c.sample_decades},
      {"krylov_tol", c.solver.krylov_tol},
      {"krylov_max_iter", c.solver.krylov_max_iter}};
  j["initial"] = {
      {"kind", c.initial.kind == InitialDataSpec::Kind::gaussian ? "gaussian" : "rough_random"},
      {"amplitude", c.initial.amplitude},
      {"width", c.initial.width},
      {"epsilon", c.initial.epsilon},
      {"seed", c.initial.seed}};
  j["source"] = {{"kind", c.source.kind == SourceSpec::Kind::zero ? "zero" : "gaussian"},
                 {"amplitude", c.source.amplitude},
                 {"width", c.source.width},
                 {"time_decay", c.source.time_decay}};
  j["verify"] = {{"k_max", c.verify.k_max},
                 {"gevrey_threshold", c.verify.gevrey_threshold},
                 {"family_spread_max", c.verify.family_spread_max},
                 {"t_min", c.verify.t_min},
                 {"c_max", c.verify.c_max},
                 {"b0_mode", c.verify.b0_mode == EnergyThreshold::finite_only
                                 ? "finite_only"
                                 : "exponential_envelope"},
                 {"checks", c.verify.checks}};
  j["output"] = {{"directory", c.output.directory},
                 {"csv", c.output.csv},
                 {"json", c.output.json},
                 {"svg", c.output.svg}};
  return j;
}

}  // namespace kfp
