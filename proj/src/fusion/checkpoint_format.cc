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

#include "fva/fusion/checkpoint_format.h"

#include "fva/common/error.h"

namespace fva {

void WriteCheckpointHeader(ByteWriter& w, CheckpointKind kind) {
  w.Bytes(kCheckpointMagic);
  w.U32(kCheckpointVersion);
  w.U8(static_cast<uint8_t>(kind));
}

namespace {

uint8_t ReadKind(ByteReader& r) {
  if (r.Bytes(4, "checkpoint magic") != kCheckpointMagic) {
    throw Error(ErrorKind::kFormat,
                r.source() + ": bad checkpoint magic (expected FVH1)");
  }
  const uint32_t version = r.U32("checkpoint version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kFormat, r.source() + ": unsupported version " +
                                        std::to_string(version));
  }
  return r.U8("checkpoint kind");
}

}  // namespace

void ReadCheckpointHeader(ByteReader& r, CheckpointKind expected) {
  const uint8_t kind = ReadKind(r);
  if (kind != static_cast<uint8_t>(expected)) {
    throw Error(ErrorKind::kFormat,
                r.source() + ": checkpoint kind " + std::to_string(kind) +
                    ", expected " +
                    std::to_string(static_cast<int>(expected)));
  }
}

CheckpointKind PeekCheckpointKind(std::string_view bytes,
                                  const std::string& source) {
  ByteReader r(bytes, source);
  const uint8_t kind = ReadKind(r);
  if (kind != static_cast<uint8_t>(CheckpointKind::kMappingHeads) &&
      kind != static_cast<uint8_t>(CheckpointKind::kCrossAttention)) {
    throw Error(ErrorKind::kFormat,
                source + ": unknown checkpoint kind " + std::to_string(kind));
  }
  return static_cast<CheckpointKind>(kind);
}

}  // namespace fva
