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

#ifndef HCMFLIGHT_CONFIG_H_
#define HCMFLIGHT_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcmflight/dynamics.h"
#include "hcmflight/env.h"
#include "hcmflight/hcm.h"
#include "hcmflight/icm.h"
#include "hcmflight/ppo.h"

namespace hcmflight {

// Malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kPpo, kPpoIcm, kPpoHcm };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::kPpoHcm;
  std::uint64_t seed = 1;
  int total_batches = 200;
  std::string out_dir = "runs/default";
  int checkpoint_interval = 10;
  int policy_hidden = 256;
  int grid_rows = 100;
  int grid_cols = 100;

  EnvConfig env;
  VehicleParams vehicle;
  PpoConfig ppo;
  IcmConfig icm;
  HcmConfig hcm;

  void validate() const;
};

// Line-oriented `section.key = value` text. A `[section]` line sets the
// prefix for bare `key = value` lines that follow. `#` starts a comment.
// Vectors are written as comma-separated components. Unknown keys throw
// ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every key with its current value, in the format parse_config accepts.
std::string to_text(const RunConfig& config);

std::vector<std::string> config_keys();

}  // namespace hcmflight

#endif  // HCMFLIGHT_CONFIG_H_
