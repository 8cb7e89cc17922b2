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

#ifndef FVA_CLI_REPORT_H_
#define FVA_CLI_REPORT_H_

#include <string>
#include <vector>

#include "fva/cli/config.h"
#include "fva/traineval/eer.h"
#include "fva/traineval/experiments.h"
#include "fva/traineval/scenarios.h"
#include "fva/traineval/xattn_trainer.h"

namespace fva {
namespace cli {

// The one report field that differs between identical reruns.
inline constexpr const char* kTimestampField = "generated_at";

Json ToJson(const EvalReport& r);
Json ToJson(const std::vector<EvalPoint>& log);
Json ToJson(const CrossValResult& cv);
Json ToJson(const PretrainResult& p);
Json ToJson(const ScenarioTable& t);
Json ToJson(const ArchitectureComparison& c);

// Appends the timestamp and serializes (2-space indent, trailing newline).
std::string FinishReport(Json report);

// Copy of a parsed report without the timestamp field.
Json StripTimestamp(Json report);

}  // namespace cli
}  // namespace fva

#endif  // FVA_CLI_REPORT_H_
