/*
 * Copyright 2026 The ASR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Subcommands of the `asr` executable.

#ifndef ASR_TOOLS_COMMANDS_HPP_
#define ASR_TOOLS_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "asr/synthetic.hpp"
#include "asr/training.hpp"

namespace asr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag combinations detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct DataOptions {
  std::string data_dir;
  std::string train;
  std::string valid;
  std::string test;
};

struct TrainOptions {
  DataOptions data;
  std::string rules;
  std::string out;
  std::string metrics;
  double subsample = 1.0;
  TrainingConfig config;
};

struct EvalOptions {
  DataOptions data;
  std::string checkpoint;
  std::vector<std::string> filters;
  std::string rules;
  bool partition = false;
  std::vector<std::size_t> hits{3, 5, 10};
  std::string out;
};

struct SynthOptions {
  SyntheticSpec spec;
  TrainingConfig config;
  std::string out_dir;
  std::size_t replicate = 0;
  std::string metrics;
};

struct CheckOptions {
  std::string suite = "all";
  std::size_t trials = 100;
  long k = -1;  // suite default when negative
  std::string model = "distmult";
  std::string subspace = "cube";
  std::string shape = "all";
  std::size_t restarts = 10;
  std::size_t tau_a = 1000;
  double lr_a = 0.1;
  std::size_t draws = 20;
  std::size_t instances = 20;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainOptions& opts, std::ostream& out);
int cmd_eval(const EvalOptions& opts, std::ostream& out);
int cmd_synth(const SynthOptions& opts, std::ostream& out);
int cmd_check(const CheckOptions& opts, std::ostream& out);

/// Parses argv and dispatches. Returns 0 on success, 1 on runtime or I/O
/// errors and 2 on usage errors; messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace asr::cli

#endif  // ASR_TOOLS_COMMANDS_HPP_
