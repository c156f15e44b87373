#include "rollobs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rollobs {

using nlohmann::json;

namespace {

std::vector<double> default_snapshot_times() {
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(0.01 * k);
  return times;
}

[[noreturn]] void key_error(std::string_view origin, std::string_view key, std::string_view what) {
  std::ostringstream os;
  os << origin << ": key '" << key << "': " << what;
  throw ConfigError(os.str());
}

double as_number(const json& j, std::string_view origin, std::string_view key) {
  if (!j.is_number()) key_error(origin, key, "expected a number");
  return j.get<double>();
}

Vec as_vector(const json& j, std::string_view origin, std::string_view key, Eigen::Index size) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    key_error(origin, key, "expected an array of " + std::to_string(size) + " numbers");
  Vec v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = as_number(j[static_cast<std::size_t>(i)], origin, key);
  return v;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, std::string_view origin,
                    std::string_view scope) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      std::string full = scope.empty() ? key : std::string(scope) + "." + key;
      key_error(origin, full, "unknown key");
    }
  }
}

std::vector<vehicle::SineTerm> parse_terms(const json& j, std::string_view origin, std::string_view key) {
  if (!j.is_array()) key_error(origin, key, "expected an array of {amplitude, frequency} objects");
  std::vector<vehicle::SineTerm> terms;
  for (const auto& item : j) {
    if (!item.is_object()) key_error(origin, key, "expected {amplitude, frequency} objects");
    reject_unknown(item, {"amplitude", "frequency"}, origin, key);
    if (!item.contains("amplitude") || !item.contains("frequency"))
      key_error(origin, key, "each term needs amplitude and frequency");
    terms.push_back({as_number(item["amplitude"], origin, key), as_number(item["frequency"], origin, key)});
  }
  return terms;
}

void apply_vehicle(const json& j, vehicle::VehicleParams& p, std::string_view origin) {
  if (!j.is_object()) key_error(origin, "vehicle", "expected an object");
  const std::pair<const char*, double vehicle::VehicleParams::*> fields[] = {
      {"v_x", &vehicle::VehicleParams::v_x},       {"m", &vehicle::VehicleParams::m},
      {"I_z", &vehicle::VehicleParams::I_z},       {"l1", &vehicle::VehicleParams::l1},
      {"l2", &vehicle::VehicleParams::l2},         {"L1", &vehicle::VehicleParams::L1_patch},
      {"L2", &vehicle::VehicleParams::L2_patch},   {"sigma1", &vehicle::VehicleParams::sigma1},
      {"sigma2", &vehicle::VehicleParams::sigma2}, {"p01", &vehicle::VehicleParams::p01},
      {"p02", &vehicle::VehicleParams::p02},       {"a1", &vehicle::VehicleParams::a1},
      {"a2", &vehicle::VehicleParams::a2}};
  std::set<std::string> allowed;
  for (const auto& [name, member] : fields) {
    allowed.insert(name);
    if (j.contains(name)) p.*member = as_number(j[name], origin, std::string("vehicle.") + name);
  }
  reject_unknown(j, allowed, origin, "vehicle");
}

ThetaSchedule parse_schedule(const json& j, std::string_view origin) {
  if (!j.is_array() || j.empty()) key_error(origin, "theta_schedule", "expected a non-empty array of {t, theta}");
  std::vector<ThetaPhase> phases;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("t") || !item.contains("theta"))
      key_error(origin, "theta_schedule", "each entry needs t and theta");
    reject_unknown(item, {"t", "theta"}, origin, "theta_schedule");
    phases.push_back({as_number(item["t"], origin, "theta_schedule.t"),
                      as_vector(item["theta"], origin, "theta_schedule.theta", 2)});
  }
  try {
    return ThetaSchedule(std::move(phases));
  } catch (const ConfigError& e) {
    key_error(origin, "theta_schedule", e.what());
  }
}

std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.X0 = Eigen::Vector2d(3.0, -0.4);
  cfg.z0 = Eigen::Vector2d(0.3, 0.3);
  cfg.steering = vehicle::SteeringSpec::benchmark();
  cfg.snapshot_times = default_snapshot_times();
  return cfg;
}

void ScenarioConfig::validate() const {
  const auto fail = [](std::string_view key, std::string_view what) {
    throw ConfigError("key '" + std::string(key) + "': " + std::string(what));
  };
  if (!(t_end > 0.0)) fail("t_end", "must be positive");
  if (!(dt > 0.0)) fail("dt", "must be positive");
  if (grid_cells < 2) fail("grid_cells", "must be at least 2");
  if (!(cfl_limit > 0.0)) fail("cfl_limit", "must be positive");
  if (!(rho > 0.0)) fail("rho", "must be positive");
  if (!(psi > 0.0)) fail("psi", "must be positive");
  if (!(gamma > 0.0)) fail("gamma", "must be positive");
  if (!(observer_lambda_factor > 0.0)) fail("observer_lambda_factor", "must be positive");
  if (!(record_interval > 0.0)) fail("record_interval", "must be positive");
  if (!(pe_window >= dt)) fail("pe_window", "must be at least one time step");
  if (!(pe_threshold >= 0.0)) fail("pe_threshold", "must be non-negative");
  if (!(theta_tolerance > 0.0)) fail("theta_tolerance", "must be positive");
  for (double s : snapshot_times)
    if (!(s >= 0.0) || !std::isfinite(s)) fail("snapshot_times", "entries must be finite and non-negative");
  try {
    vehicle.validate();
  } catch (const ConfigError& e) {
    fail("vehicle", e.what());
  }
  const double lambda_max = std::max(vehicle.v_x / vehicle.L1_patch, vehicle.v_x / vehicle.L2_patch) *
                            std::max(1.0, observer_lambda_factor);
  const double courant = lambda_max * dt / grid().dxi();
  if (courant > cfl_limit) {
    std::ostringstream os;
    os << "CFL condition violated: Courant number " << courant << " exceeds cfl_limit " << cfl_limit;
    fail("dt", os.str());
  }
}

ScenarioConfig parse_config(std::string_view text, std::string_view origin) {
  json root;
  try {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) text = "{}";
    root = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << origin << ": parse error at " << locate(text, e.byte) << ": " << e.what();
    throw ConfigError(os.str());
  }
  if (root.is_null()) root = json::object();
  if (!root.is_object()) throw ConfigError(std::string(origin) + ": top level must be a JSON object");

  static const std::set<std::string> allowed = {
      "grid_cells",   "dt",          "t_end",           "scheme",        "cfl_limit",       "q",
      "rho",          "psi",         "gamma",           "X0",            "z0",              "X_hat0",
      "z_hat0",       "theta_hat0",  "freeze_theta_hat", "theta_schedule", "steering",       "observer_lambda_factor",
      "smoothing_eps", "y1dot_mode", "output_dir",      "record_interval", "raw_output",    "snapshot_times",
      "pe_window",    "pe_threshold", "theta_tolerance", "vehicle"};
  reject_unknown(root, allowed, origin, "");

  ScenarioConfig cfg = default_config();
  const auto number = [&](const char* key, double& target) {
    if (root.contains(key)) target = as_number(root[key], origin, key);
  };
  const auto boolean = [&](const char* key, bool& target) {
    if (!root.contains(key)) return;
    if (!root[key].is_boolean()) key_error(origin, key, "expected true or false");
    target = root[key].get<bool>();
  };
  const auto vector2 = [&](const char* key, Vec& target) {
    if (root.contains(key)) target = as_vector(root[key], origin, key, 2);
  };

  if (root.contains("grid_cells")) {
    if (!root["grid_cells"].is_number_integer()) key_error(origin, "grid_cells", "expected an integer");
    cfg.grid_cells = root["grid_cells"].get<int>();
  }
  number("dt", cfg.dt);
  number("t_end", cfg.t_end);
  if (root.contains("scheme")) {
    if (!root["scheme"].is_string()) key_error(origin, "scheme", "expected a string");
    try {
      cfg.scheme = parse_scheme(root["scheme"].get<std::string>());
    } catch (const ConfigError& e) {
      key_error(origin, "scheme", e.what());
    }
  }
  number("cfl_limit", cfg.cfl_limit);
  number("q", cfg.q);
  number("rho", cfg.rho);
  number("psi", cfg.psi);
  number("gamma", cfg.gamma);
  vector2("X0", cfg.X0);
  vector2("z0", cfg.z0);
  vector2("X_hat0", cfg.X_hat0);
  vector2("z_hat0", cfg.z_hat0);
  vector2("theta_hat0", cfg.theta_hat0);
  boolean("freeze_theta_hat", cfg.freeze_theta_hat);
  if (root.contains("vehicle")) apply_vehicle(root["vehicle"], cfg.vehicle, origin);
  if (root.contains("theta_schedule")) cfg.vehicle.theta_schedule = parse_schedule(root["theta_schedule"], origin);
  number("smoothing_eps", cfg.vehicle.smoothing_eps);
  if (root.contains("steering")) {
    const json& s = root["steering"];
    if (!s.is_object()) key_error(origin, "steering", "expected an object with delta1/delta2");
    reject_unknown(s, {"delta1", "delta2"}, origin, "steering");
    cfg.steering = {};
    if (s.contains("delta1")) cfg.steering.delta1 = parse_terms(s["delta1"], origin, "steering.delta1");
    if (s.contains("delta2")) cfg.steering.delta2 = parse_terms(s["delta2"], origin, "steering.delta2");
  }
  number("observer_lambda_factor", cfg.observer_lambda_factor);
  if (root.contains("y1dot_mode")) {
    const json& m = root["y1dot_mode"];
    if (m == "analytic") {
      cfg.y1dot_mode = Y1RateMode::Analytic;
    } else if (m == "backward-difference") {
      cfg.y1dot_mode = Y1RateMode::BackwardDifference;
    } else {
      key_error(origin, "y1dot_mode", "expected \"analytic\" or \"backward-difference\"");
    }
  }
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) key_error(origin, "output_dir", "expected a string");
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  number("record_interval", cfg.record_interval);
  boolean("raw_output", cfg.raw_output);
  if (root.contains("snapshot_times")) {
    const json& s = root["snapshot_times"];
    if (!s.is_array()) key_error(origin, "snapshot_times", "expected an array of numbers");
    cfg.snapshot_times.clear();
    for (const auto& t : s) cfg.snapshot_times.push_back(as_number(t, origin, "snapshot_times"));
  }
  number("pe_window", cfg.pe_window);
  number("pe_threshold", cfg.pe_threshold);
  number("theta_tolerance", cfg.theta_tolerance);

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace rollobs
