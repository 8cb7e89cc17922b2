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

#ifndef FVA_COMMON_ERROR_H_
#define FVA_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace fva {

enum class ErrorKind {
  kShape,
  kDegenerate,
  kConfig,
  kFormat,
  kIo,
  kSchema,
  kIndex,
  kLookup,
  kSampling,
  kMetric,
  kProtocol,
  kNumeric,
};

const char* ErrorKindName(ErrorKind kind);

// Every failure in the library is an Error carrying a kind; the CLI maps
// kinds onto its stable exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " +
                           what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// 2 config parse, 3 protocol violation, 4 data/schema, 5 internal numeric.
int ExitCodeFor(ErrorKind kind);

}  // namespace fva

#endif  // FVA_COMMON_ERROR_H_
