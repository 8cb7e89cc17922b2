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

#include "fva/common/error.h"

namespace fva {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerate: return "degenerate-vector";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kSampling: return "sampling";
    case ErrorKind::kMetric: return "metric";
    case ErrorKind::kProtocol: return "protocol-violation";
    case ErrorKind::kNumeric: return "numeric";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kProtocol:
      return 3;
    case ErrorKind::kFormat:
    case ErrorKind::kIo:
    case ErrorKind::kSchema:
    case ErrorKind::kIndex:
    case ErrorKind::kLookup:
    case ErrorKind::kSampling:
    case ErrorKind::kMetric:
      return 4;
    case ErrorKind::kShape:
    case ErrorKind::kDegenerate:
    case ErrorKind::kNumeric:
      return 5;
  }
  return 5;
}

}  // namespace fva
