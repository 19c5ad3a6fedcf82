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

#include "hcmflight/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hcmflight {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'H', 'C', 'M', 'F', 'C', 'K', 'P', 'T'};
constexpr char kTrailer[8] = {'H', 'C', 'M', 'F', 'E', 'N', 'D', '!'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: unexpected end of file");
  return v;
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  if (len > (1u << 28)) throw std::runtime_error("checkpoint: corrupt string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("checkpoint: unexpected end of file");
  return s;
}

std::string shape_string(const nn::MlpShape& s) {
  std::ostringstream os;
  os << s.input << "," << s.aux << "," << s.hidden1 << "," << s.hidden2 << "," << s.output;
  return os.str();
}

void store_mlp(const std::string& prefix, const Mlp& net, const AdamState& adam,
               Checkpoint& ckpt) {
  ckpt.metadata[prefix + ".shape"] = shape_string(net.shape());
  ckpt.metadata[prefix + ".adam_step"] = std::to_string(adam.step);
  ckpt.tensors[prefix + ".params"] = net.params();
  ckpt.tensors[prefix + ".adam_m"] = adam.m;
  ckpt.tensors[prefix + ".adam_v"] = adam.v;
}

const MatX& tensor(const Checkpoint& ckpt, const std::string& name, Eigen::Index size) {
  const auto it = ckpt.tensors.find(name);
  if (it == ckpt.tensors.end()) throw std::runtime_error("checkpoint: missing tensor " + name);
  if (it->second.size() != size) {
    throw std::runtime_error("checkpoint: tensor " + name + " has " +
                             std::to_string(it->second.size()) + " values, expected " +
                             std::to_string(size));
  }
  return it->second;
}

const std::string& meta(const Checkpoint& ckpt, const std::string& key) {
  const auto it = ckpt.metadata.find(key);
  if (it == ckpt.metadata.end()) throw std::runtime_error("checkpoint: missing metadata " + key);
  return it->second;
}

void restore_mlp(const std::string& prefix, const Checkpoint& ckpt, Mlp& net,
                 AdamState& adam) {
  const std::string stored = meta(ckpt, prefix + ".shape");
  const std::string expected = shape_string(net.shape());
  if (stored != expected) {
    throw std::runtime_error("checkpoint: shape mismatch for " + prefix + " (stored " +
                             stored + ", configured " + expected + ")");
  }
  const Eigen::Index n = net.num_params();
  net.params() = tensor(ckpt, prefix + ".params", n).reshaped();
  adam.m = tensor(ckpt, prefix + ".adam_m", n).reshaped();
  adam.v = tensor(ckpt, prefix + ".adam_v", n).reshaped();
  adam.step = std::stoll(meta(ckpt, prefix + ".adam_step"));
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  put(out, kCheckpointVersion);
  put(out, ckpt.step);
  put(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    put_string(out, k);
    put_string(out, v);
  }
  put(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_string(out, name);
    put(out, static_cast<std::uint64_t>(t.rows()));
    put(out, static_cast<std::uint64_t>(t.cols()));
  }
  for (const auto& [name, t] : ckpt.tensors) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  out.write(kTrailer, sizeof(kTrailer));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.step = get<std::int64_t>(in);
  const auto n_meta = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = get_string(in);
    ckpt.metadata[k] = get_string(in);
  }
  const auto n_tensors = get<std::uint32_t>(in);
  std::vector<std::pair<std::string, std::pair<std::uint64_t, std::uint64_t>>> manifest;
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = get_string(in);
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    manifest.push_back({std::move(name), {rows, cols}});
  }
  for (const auto& [name, shape] : manifest) {
    MatX t(static_cast<Eigen::Index>(shape.first), static_cast<Eigen::Index>(shape.second));
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor " + name);
    ckpt.tensors[name] = std::move(t);
  }
  char trailer[8];
  in.read(trailer, sizeof(trailer));
  if (!in || std::memcmp(trailer, kTrailer, sizeof(kTrailer)) != 0) {
    throw std::runtime_error("checkpoint: missing trailer in " + path);
  }
  return ckpt;
}

std::string shape_summary(const Checkpoint& ckpt) {
  std::ostringstream os;
  os << "hcmflight checkpoint v" << kCheckpointVersion << "  step " << ckpt.step << "\n";
  for (const auto& [name, t] : ckpt.tensors) {
    os << "tensor " << name << " " << t.rows() << "x" << t.cols() << "\n";
  }
  for (const auto& [k, v] : ckpt.metadata) {
    if (v.find('\n') == std::string::npos) {
      os << "meta " << k << " = " << v << "\n";
    } else {
      os << "meta " << k << " (" << v.size() << " bytes)\n";
    }
  }
  return os.str();
}

void store_actor_critic(const ActorCritic& nets, Checkpoint& ckpt) {
  store_mlp("policy.mean_net", nets.policy.mean_net, nets.policy.mean_adam, ckpt);
  ckpt.tensors["policy.log_std"] = nets.policy.log_std;
  ckpt.tensors["policy.log_std.adam_m"] = nets.policy.log_std_adam.m;
  ckpt.tensors["policy.log_std.adam_v"] = nets.policy.log_std_adam.v;
  ckpt.metadata["policy.log_std.adam_step"] = std::to_string(nets.policy.log_std_adam.step);
  store_mlp("value_ext", nets.value_ext.net, nets.value_ext.adam, ckpt);
  store_mlp("value_int", nets.value_int.net, nets.value_int.adam, ckpt);
}

void restore_actor_critic(const Checkpoint& ckpt, ActorCritic& nets) {
  restore_mlp("policy.mean_net", ckpt, nets.policy.mean_net, nets.policy.mean_adam);
  nets.policy.log_std = tensor(ckpt, "policy.log_std", kActionDim).reshaped();
  nets.policy.log_std_adam.m = tensor(ckpt, "policy.log_std.adam_m", kActionDim).reshaped();
  nets.policy.log_std_adam.v = tensor(ckpt, "policy.log_std.adam_v", kActionDim).reshaped();
  nets.policy.log_std_adam.step = std::stoll(meta(ckpt, "policy.log_std.adam_step"));
  restore_mlp("value_ext", ckpt, nets.value_ext.net, nets.value_ext.adam);
  restore_mlp("value_int", ckpt, nets.value_int.net, nets.value_int.adam);
}

}  // namespace hcmflight
