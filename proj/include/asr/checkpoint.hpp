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

// Text checkpoints.
//
//   #ASR-CKPT v1
//   model=complex
//   k=20
//   subspace=cube
//   entities=3
//   relations=1
//   [entities]
//   name<TAB>v1 v2 ...
//   [relations]
//   name<TAB>v1 v2 ...
//
// Complex embeddings are written as interleaved (re, im) pairs. Values use
// 17 significant digits so a reload is bit-exact.

#ifndef ASR_CHECKPOINT_HPP_
#define ASR_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>

#include "asr/graph.hpp"
#include "asr/scoring.hpp"

namespace asr {

inline constexpr const char* kCheckpointMagic = "#ASR-CKPT";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  Subspace subspace = Subspace::kUnitCube;
  Vocabulary vocab;  // frozen
};

void write_checkpoint(std::ostream& out, const ModelParams& params, Subspace subspace,
                      const Vocabulary& vocab);
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     Subspace subspace, const Vocabulary& vocab);

/// Throws ParseError (with the 1-based line number) on malformed content,
/// including unsupported versions, truncated sections and vectors whose
/// length disagrees with the header.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace asr

#endif  // ASR_CHECKPOINT_HPP_
