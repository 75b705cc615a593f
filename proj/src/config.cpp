// Implementation of configuration parsing, validation, and serialization.
#include "pcosync/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pcosync/errors.hpp"

namespace pcosync {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw ConfigError(path.empty() ? key + ": unknown key"
                                     : path + "." + key + ": unknown key");
    }
  }
}

std::string joined(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
void read_field(const json& obj, const std::string& path, const char* key, T& out,
                const char* type_name, bool (json::*is_type)() const) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!(v.*is_type)()) {
    throw ConfigError(joined(path, key) + ": expected " + type_name);
  }
  out = v.get<T>();
}

void read_double(const json& obj, const std::string& path, const char* key,
                 double& out) {
  read_field(obj, path, key, out, "a number", &json::is_number);
}

void read_int(const json& obj, const std::string& path, const char* key, int& out) {
  read_field(obj, path, key, out, "an integer", &json::is_number_integer);
}

void read_u64(const json& obj, const std::string& path, const char* key,
              std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw ConfigError(joined(path, key) + ": expected a non-negative integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw ConfigError(joined(path, key) + ": expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void read_string(const json& obj, const std::string& path, const char* key,
                 std::string& out) {
  read_field(obj, path, key, out, "a string", &json::is_string);
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.phase_kind != "peskin" && cfg.phase_kind != "tabulated") {
    bad("phase.kind", "must be \"peskin\" or \"tabulated\"");
  }
  if (cfg.phase_kind == "peskin" && (!(cfg.gamma > 0) || !std::isfinite(cfg.gamma))) {
    bad("phase.gamma", "must be a positive finite number");
  }
  if (cfg.phase_kind == "tabulated" && cfg.table.size() < 2) {
    bad("phase.table", "needs at least two samples");
  }
  if (!(cfg.epsilon > 0) || !(cfg.epsilon < 1)) bad("epsilon", "must lie in (0, 1)");
  if (cfg.n < 1) bad("n", "must be at least 1");
  if (!(cfg.rho >= 0) || !std::isfinite(cfg.rho)) bad("rho", "must be non-negative");
  if (cfg.cycle_cap < 1) bad("cycle_cap", "must be at least 1");
  if (cfg.m_tilde < 1) bad("m_tilde", "must be at least 1");
  if (cfg.m_tilde > 20) bad("m_tilde", "exact enumeration supports at most 20");
  if (cfg.p_grid.empty()) bad("p_grid", "must not be empty");
  for (double p : cfg.p_grid) {
    if (!(p > 0) || !(p < 0.5)) bad("p_grid", "entries must lie in (0, 0.5)");
  }
  if (cfg.d < 1) bad("d", "must be at least 1");
  if (cfg.trials < 1) bad("trials", "must be at least 1");
  if (cfg.jam_trials < 1) bad("jam_trials", "must be at least 1");
  if (cfg.workers < 1) bad("workers", "must be at least 1");
  if (cfg.jammer != "none" && cfg.jammer != "uniform-random" &&
      cfg.jammer != "adversarial-grid") {
    bad("jammer.kind", "must be \"none\", \"uniform-random\", or \"adversarial-grid\"");
  }
  if (cfg.jammer == "adversarial-grid" && cfg.n != 2) {
    bad("jammer.kind", "adversarial-grid requires n = 2");
  }
  if (cfg.jam_grid_points < 1) bad("jammer.grid_points", "must be at least 1");
  if (!(cfg.boundary_tol > 0)) bad("tolerances.boundary", "must be positive");
  if (!(cfg.fixed_point_tol > 0)) bad("tolerances.fixed_point", "must be positive");
  if (cfg.extremum_grid < 3) bad("extremum_grid", "must be at least 3");
  if (cfg.out_dir.empty()) bad("out_dir", "must not be empty");
  if (!cfg.delays.empty()) {
    const std::size_t n = static_cast<std::size_t>(cfg.n);
    if (cfg.delays.size() != n) bad("delays", "matrix must be n×n");
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg.delays[i].size() != n) bad("delays", "matrix must be n×n");
      for (std::size_t j = 0; j < n; ++j) {
        const double dd = cfg.delays[i][j];
        if (!(dd >= 0) || !(dd < 0.5)) bad("delays", "entries must lie in [0, 0.5)");
        if (dd != cfg.delays[j][i]) bad("delays", "matrix must be symmetric");
        if (i == j && dd != 0) bad("delays", "diagonal must be zero");
      }
    }
  }
}

}  // namespace

void validate_experiment_config(const ExperimentConfig& cfg) { validate(cfg); }

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("top level: expected an object");

  ExperimentConfig cfg;
  check_keys(root, "",
             {"phase", "epsilon", "n", "rho", "delays", "cycle_cap", "m_tilde",
              "p_grid", "d", "trials", "mc_trials", "jam_trials", "seed",
              "workers", "jammer", "tolerances", "extremum_grid", "out_dir"});

  if (root.contains("phase")) {
    const json& phase = root.at("phase");
    if (!phase.is_object()) throw ConfigError("phase: expected an object");
    check_keys(phase, "phase", {"kind", "gamma", "table"});
    read_string(phase, "phase", "kind", cfg.phase_kind);
    read_double(phase, "phase", "gamma", cfg.gamma);
    if (phase.contains("table")) {
      const json& table = phase.at("table");
      if (!table.is_array()) throw ConfigError("phase.table: expected an array");
      cfg.table.clear();
      for (const json& v : table) {
        if (!v.is_number()) throw ConfigError("phase.table: expected numbers");
        cfg.table.push_back(v.get<double>());
      }
    }
  }
  read_double(root, "", "epsilon", cfg.epsilon);
  read_int(root, "", "n", cfg.n);
  read_double(root, "", "rho", cfg.rho);
  if (root.contains("delays")) {
    const json& delays = root.at("delays");
    if (!delays.is_array()) throw ConfigError("delays: expected a matrix");
    cfg.delays.clear();
    for (const json& row : delays) {
      if (!row.is_array()) throw ConfigError("delays: expected a matrix");
      std::vector<double> r;
      for (const json& v : row) {
        if (!v.is_number()) throw ConfigError("delays: expected numbers");
        r.push_back(v.get<double>());
      }
      cfg.delays.push_back(std::move(r));
    }
  }
  read_int(root, "", "cycle_cap", cfg.cycle_cap);
  read_int(root, "", "m_tilde", cfg.m_tilde);
  if (root.contains("p_grid")) {
    const json& grid = root.at("p_grid");
    if (!grid.is_array()) throw ConfigError("p_grid: expected an array");
    cfg.p_grid.clear();
    for (const json& v : grid) {
      if (!v.is_number()) throw ConfigError("p_grid: expected numbers");
      cfg.p_grid.push_back(v.get<double>());
    }
  }
  read_int(root, "", "d", cfg.d);
  read_u64(root, "", "trials", cfg.trials);
  read_u64(root, "", "mc_trials", cfg.mc_trials);
  read_u64(root, "", "jam_trials", cfg.jam_trials);
  read_u64(root, "", "seed", cfg.seed);
  read_int(root, "", "workers", cfg.workers);
  if (root.contains("jammer")) {
    const json& jam = root.at("jammer");
    if (!jam.is_object()) throw ConfigError("jammer: expected an object");
    check_keys(jam, "jammer", {"kind", "grid_points"});
    read_string(jam, "jammer", "kind", cfg.jammer);
    read_int(jam, "jammer", "grid_points", cfg.jam_grid_points);
  }
  if (root.contains("tolerances")) {
    const json& tol = root.at("tolerances");
    if (!tol.is_object()) throw ConfigError("tolerances: expected an object");
    check_keys(tol, "tolerances", {"boundary", "fixed_point"});
    read_double(tol, "tolerances", "boundary", cfg.boundary_tol);
    read_double(tol, "tolerances", "fixed_point", cfg.fixed_point_tol);
  }
  if (root.contains("extremum_grid")) {
    int grid = 0;
    read_int(root, "", "extremum_grid", grid);
    if (grid < 0) bad("extremum_grid", "must be positive");
    cfg.extremum_grid = static_cast<std::size_t>(grid);
  }
  read_string(root, "", "out_dir", cfg.out_dir);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json phase = {{"kind", cfg.phase_kind}, {"gamma", cfg.gamma}};
  if (!cfg.table.empty()) phase["table"] = cfg.table;
  json root = {
      {"phase", phase},
      {"epsilon", cfg.epsilon},
      {"n", cfg.n},
      {"rho", cfg.rho},
      {"cycle_cap", cfg.cycle_cap},
      {"m_tilde", cfg.m_tilde},
      {"p_grid", cfg.p_grid},
      {"d", cfg.d},
      {"trials", cfg.trials},
      {"mc_trials", cfg.mc_trials},
      {"jam_trials", cfg.jam_trials},
      {"seed", cfg.seed},
      {"workers", cfg.workers},
      {"jammer", {{"kind", cfg.jammer}, {"grid_points", cfg.jam_grid_points}}},
      {"tolerances",
       {{"boundary", cfg.boundary_tol}, {"fixed_point", cfg.fixed_point_tol}}},
      {"extremum_grid", static_cast<std::uint64_t>(cfg.extremum_grid)},
      {"out_dir", cfg.out_dir},
  };
  if (!cfg.delays.empty()) root["delays"] = cfg.delays;
  return root.dump(2) + "\n";
}

PhaseFunction make_phase_function(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.phase_kind == "peskin") return PhaseFunction::peskin(cfg.gamma);
  return PhaseFunction::tabulated(cfg.table);
}

}  // namespace pcosync
