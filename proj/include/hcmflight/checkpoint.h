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

#ifndef HCMFLIGHT_CHECKPOINT_H_
#define HCMFLIGHT_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "hcmflight/actor_critic.h"
#include "hcmflight/common.h"

namespace hcmflight {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Versioned binary blob. Layout (little-endian):
//   "HCMFCKPT" u32 version  i64 step
//   u32 n_meta   { str key, str value } * n_meta
//   u32 n_tensor { str name, u64 rows, u64 cols } * n_tensor   (manifest)
//   f64 data for each manifest entry in order, column-major
//   "HCMFEND!"
// where str is u32 length followed by bytes.
struct Checkpoint {
  std::int64_t step = 0;
  std::map<std::string, std::string> metadata;
  std::map<std::string, MatX> tensors;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// One line per tensor: name, rows x cols, and metadata keys.
std::string shape_summary(const Checkpoint& checkpoint);

// Network parameters and optimizer moments of all three actor-critic nets.
void store_actor_critic(const ActorCritic& nets, Checkpoint& checkpoint);

// Restores into `nets`, whose shapes must match the stored ones exactly.
void restore_actor_critic(const Checkpoint& checkpoint, ActorCritic& nets);

}  // namespace hcmflight

#endif  // HCMFLIGHT_CHECKPOINT_H_
