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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "hcmflight_cli_test.log";
  const std::string cmd =
      std::string("\"") + HCMFLIGHT_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream os;
  os << in.rdbuf();
  r.output = os.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hcmflight_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  const Run r = run_cli("--help");
  CHECK(r.code == 0);
  CHECK(r.output.find("train") != std::string::npos);
}

TEST_CASE("unknown flag is a usage error") {
  CHECK(run_cli("train --bogus").code == 1);
}

TEST_CASE("unknown config key names the key") {
  const fs::path dir = scratch("badkey");
  std::ofstream(dir / "bad.conf") << "[ppo]\nlearning_rat = 0.1\n";
  const Run r = run_cli("train --config \"" + (dir / "bad.conf").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.output.find("learning_rat") != std::string::npos);
}

TEST_CASE("missing checkpoint is a runtime error") {
  const Run r = run_cli("eval --checkpoint /nonexistent/ckpt.bin --episodes 1");
  CHECK(r.code == 2);
}

TEST_CASE("train, eval, viz and report") {
  const fs::path dir = scratch("flow");
  std::ofstream(dir / "tiny.conf")
      << "[run]\nalgorithm = ppo_icm\ntotal_batches = 2\npolicy_hidden = 16\n"
         "checkpoint_interval = 1\ngrid_rows = 10\ngrid_cols = 10\n"
         "[env]\nobstacle_count = 0\n"
         "[ppo]\nbatch_size = 128\nminibatch_size = 64\nepochs = 1\n"
         "[icm]\nhidden = 16\n";
  const fs::path out = dir / "run";
  Run r = run_cli("train --config \"" + (dir / "tiny.conf").string() + "\" --seed 2 --out \"" +
                  out.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(out / "metrics.csv"));

  r = run_cli("eval --checkpoint \"" + (out / "checkpoints" / "ckpt_00002.bin").string() +
              "\" --episodes 2 --out \"" + (dir / "eval").string() + "\"");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "eval" / "trajectory_000.csv"));

  r = run_cli("viz --grid \"" + (out / "grids" / "grid_00001.csv").string() + "\" --out \"" +
              (dir / "g.pgm").string() + "\"");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "g.pgm"));

  r = run_cli("report \"" + (out / "metrics.csv").string() + "\" \"" +
              (out / "metrics.csv").string() + "\" --out \"" + (dir / "agg.csv").string() + "\"");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "agg.csv"));
}
