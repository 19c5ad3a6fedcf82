// Copyright 2026 The hcmflight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hcmflight/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hcmflight {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  std::stringstream ss(value);
  std::string part;
  Vec3 out;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) break;
    out[i++] = parse_double(key, trim(part));
  }
  if (i != 3 || std::getline(ss, part, ',')) {
    throw ConfigError("config key '" + key + "': expected three comma-separated numbers");
  }
  return out;
}

struct Entry {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Field>
Entry real(Field field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = parse_double(k, v);
          },
          [field](const RunConfig& c) {
            return format_double(field(c));
          }};
}

template <typename Field>
Entry integer(Field field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(
                parse_integer(k, v));
          },
          [field](const RunConfig& c) {
            return std::to_string(field(c));
          }};
}

template <typename Field>
Entry boolean(Field field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = parse_bool(k, v);
          },
          [field](const RunConfig& c) {
            return std::string(field(c) ? "true" : "false");
          }};
}

template <typename Field>
Entry vec3(Field field) {
  return {[field](RunConfig& c, const std::string& k, const std::string& v) {
            field(c) = parse_vec3(k, v);
          },
          [field](const RunConfig& c) {
            const Vec3& x = field(c);
            return format_double(x[0]) + ", " + format_double(x[1]) + ", " +
                   format_double(x[2]);
          }};
}

#define HCM_FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> entries = [] {
    std::map<std::string, Entry> m;
    m["run.algorithm"] = {
        [](RunConfig& c, const std::string&, const std::string& v) {
          c.algorithm = parse_algorithm(v);
        },
        [](const RunConfig& c) { return to_string(c.algorithm); }};
    m["run.seed"] = integer(HCM_FIELD(seed));
    m["run.total_batches"] = integer(HCM_FIELD(total_batches));
    m["run.out_dir"] = {
        [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
        [](const RunConfig& c) { return c.out_dir; }};
    m["run.checkpoint_interval"] = integer(HCM_FIELD(checkpoint_interval));
    m["run.policy_hidden"] = integer(HCM_FIELD(policy_hidden));
    m["run.grid_rows"] = integer(HCM_FIELD(grid_rows));
    m["run.grid_cols"] = integer(HCM_FIELD(grid_cols));

    m["env.goal_position"] = vec3(HCM_FIELD(env.goal_position));
    m["env.goal_roll"] = real(HCM_FIELD(env.goal_roll));
    m["env.goal_pitch"] = real(HCM_FIELD(env.goal_pitch));
    m["env.bounds"] = vec3(HCM_FIELD(env.bounds));
    m["env.obstacle_count"] = integer(HCM_FIELD(env.obstacle_count));
    m["env.obstacle_radius"] = real(HCM_FIELD(env.obstacle_radius));
    m["env.obstacle_height"] = real(HCM_FIELD(env.obstacle_height));
    m["env.collision_margin"] = real(HCM_FIELD(env.collision_margin));
    m["env.obstacle_clearance"] = real(HCM_FIELD(env.obstacle_clearance));
    m["env.alpha_p"] = real(HCM_FIELD(env.alpha_p));
    m["env.alpha_a"] = real(HCM_FIELD(env.alpha_a));
    m["env.alpha_flight"] = real(HCM_FIELD(env.alpha_flight));
    m["env.alpha_yaw"] = real(HCM_FIELD(env.alpha_yaw));
    m["env.alpha_nu"] = real(HCM_FIELD(env.alpha_nu));
    m["env.alpha_omega"] = real(HCM_FIELD(env.alpha_omega));
    m["env.crash_reward"] = real(HCM_FIELD(env.crash_reward));
    m["env.crash_altitude"] = real(HCM_FIELD(env.crash_altitude));
    m["env.max_flight_steps"] = integer(HCM_FIELD(env.max_flight_steps));
    m["env.control_dt"] = real(HCM_FIELD(env.control_dt));
    m["env.spawn_position"] = vec3(HCM_FIELD(env.spawn_position));
    m["env.init_position_range"] = real(HCM_FIELD(env.init_position_range));
    m["env.init_attitude_range"] = real(HCM_FIELD(env.init_attitude_range));
    m["env.velocity_scale"] = real(HCM_FIELD(env.velocity_scale));
    m["env.angular_velocity_scale"] = real(HCM_FIELD(env.angular_velocity_scale));
    m["env.linear_accel_scale"] = real(HCM_FIELD(env.linear_accel_scale));
    m["env.angular_accel_scale"] = real(HCM_FIELD(env.angular_accel_scale));

    m["vehicle.mass"] = real(HCM_FIELD(vehicle.mass));
    m["vehicle.inertia_diag"] = vec3(HCM_FIELD(vehicle.inertia_diag));
    m["vehicle.arm_length"] = real(HCM_FIELD(vehicle.arm_length));
    m["vehicle.thrust_coeff"] = real(HCM_FIELD(vehicle.thrust_coeff));
    m["vehicle.torque_coeff"] = real(HCM_FIELD(vehicle.torque_coeff));
    m["vehicle.motor_time_constant"] = real(HCM_FIELD(vehicle.motor_time_constant));
    m["vehicle.motor_noise_std"] = real(HCM_FIELD(vehicle.motor_noise_std));
    m["vehicle.linear_drag_coeff"] = real(HCM_FIELD(vehicle.linear_drag_coeff));
    m["vehicle.angular_drag_coeff"] = real(HCM_FIELD(vehicle.angular_drag_coeff));
    m["vehicle.max_motor_speed"] = real(HCM_FIELD(vehicle.max_motor_speed));
    m["vehicle.gravity"] = real(HCM_FIELD(vehicle.gravity));
    m["vehicle.physics_dt"] = real(HCM_FIELD(vehicle.physics_dt));

    m["ppo.batch_size"] = integer(HCM_FIELD(ppo.batch_size));
    m["ppo.gamma"] = real(HCM_FIELD(ppo.gamma));
    m["ppo.lambda"] = real(HCM_FIELD(ppo.lambda));
    m["ppo.clip_epsilon"] = real(HCM_FIELD(ppo.clip_epsilon));
    m["ppo.value_coeff"] = real(HCM_FIELD(ppo.value_coeff));
    m["ppo.entropy_coeff"] = real(HCM_FIELD(ppo.entropy_coeff));
    m["ppo.epochs"] = integer(HCM_FIELD(ppo.epochs));
    m["ppo.minibatch_size"] = integer(HCM_FIELD(ppo.minibatch_size));
    m["ppo.lr_policy"] = real(HCM_FIELD(ppo.lr_policy));
    m["ppo.lr_value_ext"] = real(HCM_FIELD(ppo.lr_value_ext));
    m["ppo.lr_value_int"] = real(HCM_FIELD(ppo.lr_value_int));
    m["ppo.standard_td"] = boolean(HCM_FIELD(ppo.standard_td));
    m["ppo.normalize_advantages"] = boolean(HCM_FIELD(ppo.normalize_advantages));

    m["icm.beta"] = real(HCM_FIELD(icm.beta));
    m["icm.eta"] = real(HCM_FIELD(icm.eta));
    m["icm.hidden"] = integer(HCM_FIELD(icm.hidden));
    m["icm.lr"] = real(HCM_FIELD(icm.lr));
    m["icm.epochs"] = integer(HCM_FIELD(icm.epochs));
    m["icm.minibatch_size"] = integer(HCM_FIELD(icm.minibatch_size));

    m["hcm.segment_length"] = integer(HCM_FIELD(hcm.segment_length));
    m["hcm.stride"] = integer(HCM_FIELD(hcm.stride));
    m["hcm.heads_per_type"] = integer(HCM_FIELD(hcm.heads_per_type));
    m["hcm.beta"] = real(HCM_FIELD(hcm.beta));
    m["hcm.alpha_curiosity"] = real(HCM_FIELD(hcm.alpha_curiosity));
    m["hcm.kappa"] = real(HCM_FIELD(hcm.kappa));
    m["hcm.lr"] = real(HCM_FIELD(hcm.lr));
    m["hcm.hidden"] = integer(HCM_FIELD(hcm.hidden));
    m["hcm.epochs"] = integer(HCM_FIELD(hcm.epochs));
    m["hcm.minibatch_size"] = integer(HCM_FIELD(hcm.minibatch_size));
    return m;
  }();
  return entries;
}

#undef HCM_FIELD

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPpo: return "ppo";
    case Algorithm::kPpoIcm: return "ppo_icm";
    case Algorithm::kPpoHcm: return "ppo_hcm";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "ppo") return Algorithm::kPpo;
  if (name == "ppo_icm") return Algorithm::kPpoIcm;
  if (name == "ppo_hcm") return Algorithm::kPpoHcm;
  throw ConfigError("unknown algorithm '" + name + "' (expected ppo, ppo_icm, ppo_hcm)");
}

void RunConfig::validate() const {
  if (total_batches < 0) throw ConfigError("run.total_batches must be >= 0");
  if (checkpoint_interval <= 0) throw ConfigError("run.checkpoint_interval must be > 0");
  if (policy_hidden <= 0) throw ConfigError("run.policy_hidden must be > 0");
  if (grid_rows <= 0 || grid_cols <= 0) throw ConfigError("run grid size must be > 0");
  try {
    env.validate();
    vehicle.validate();
    ppo.validate();
    icm.validate();
    hcm.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    const auto it = registry().find(key);
    if (it == registry().end()) throw ConfigError("unknown config key: " + key);
    it->second.set(config, key, value);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, entry] : registry()) {
    out += key + " = " + entry.get(config) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, entry] : registry()) keys.push_back(key);
  return keys;
}

}  // namespace hcmflight
