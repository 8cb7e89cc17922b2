// Copyright (c) 2026 The fva Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FVA_FUSION_CHECKPOINT_FORMAT_H_
#define FVA_FUSION_CHECKPOINT_FORMAT_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "fva/common/binary_io.h"

namespace fva {

// Checkpoint container: magic "FVH1" | version u32 | kind u8 | payload.
// Matrices are rows u32 | cols u32 | rows*cols f64, row-major, little-endian.
inline constexpr std::string_view kCheckpointMagic = "FVH1";
inline constexpr uint32_t kCheckpointVersion = 1;

enum class CheckpointKind : uint8_t {
  kMappingHeads = 1,    // face head, voice head, shared classifier
  kCrossAttention = 2,  // XAttnModel
};

void WriteCheckpointHeader(ByteWriter& w, CheckpointKind kind);
// Throws a format error on bad magic, version, or unexpected kind.
void ReadCheckpointHeader(ByteReader& r, CheckpointKind expected);

// Kind byte of a checkpoint after checking magic and version.
CheckpointKind PeekCheckpointKind(std::string_view bytes,
                                  const std::string& source);

}  // namespace fva

#endif  // FVA_FUSION_CHECKPOINT_FORMAT_H_
