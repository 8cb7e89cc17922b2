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

#ifndef FVA_CLI_CONFIG_H_
#define FVA_CLI_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "fva/synthgen/synth.h"
#include "fva/traineval/scenarios.h"
#include "fva/traineval/trainer.h"
#include "fva/traineval/xattn_trainer.h"

namespace fva {
namespace cli {

using Json = nlohmann::ordered_json;

// Parses a config document; syntax errors become config errors naming the
// byte offset.
Json ParseConfigText(const std::string& text, const std::string& source);

// Typed access to one JSON object that remembers which keys were read so
// the rest can be rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool Has(const std::string& key) const;
  std::optional<uint64_t> U64(const std::string& key);
  std::optional<double> Real(const std::string& key);
  std::optional<bool> Bool(const std::string& key);
  std::optional<std::string> Str(const std::string& key);
  // Raw access; the key counts as consumed.
  const Json* Raw(const std::string& key);
  std::optional<ObjectReader> Object(const std::string& key);
  std::string PathOf(const std::string& key) const;

  // Throws a config error listing any key never read.
  void Finish() const;

 private:
  const Json* Find(const std::string& key);

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct SynthCommandConfig {
  SynthConfig synth;
};

struct TrainCommandConfig {
  std::string store;
  double holdout_fraction = 0.05;
  TrainConfig train;
};

struct CrossValCommandConfig {
  std::string store;
  size_t n_folds = 7;
  TrainConfig train;
};

struct PretrainFinetuneCommandConfig {
  std::string pretrain_store;
  std::string finetune_store;
  size_t n_folds = 7;
  double holdout_fraction = 0.05;
  TrainConfig pretrain;
  TrainConfig finetune;
};

struct ScenariosCommandConfig {
  std::map<std::string, std::string> corpora;  // name -> store dir
  std::vector<ScenarioPlan> plans;
  ScenarioSettings settings;
};

struct EvalCommandConfig {
  std::string checkpoint;
  std::string trials;
  std::string store;
};

struct XAttnCommandConfig {
  std::string store;
  double holdout_fraction = 0.05;
  XAttnTrainConfig xattn;
  // Baseline mapping heads trained on the same split for the comparison.
  TrainConfig train;
};

// Each parser rejects unknown keys and applies `seed_override` over the
// config's "seed". Paths are kept as written.
SynthCommandConfig ParseSynthCommand(const Json& j,
                                     std::optional<uint64_t> seed_override);
TrainCommandConfig ParseTrainCommand(const Json& j,
                                     std::optional<uint64_t> seed_override);
CrossValCommandConfig ParseCrossValCommand(
    const Json& j, std::optional<uint64_t> seed_override);
PretrainFinetuneCommandConfig ParsePretrainFinetuneCommand(
    const Json& j, std::optional<uint64_t> seed_override);
ScenariosCommandConfig ParseScenariosCommand(
    const Json& j, std::optional<uint64_t> seed_override);
EvalCommandConfig ParseEvalCommand(const Json& j);
XAttnCommandConfig ParseXAttnCommand(const Json& j,
                                     std::optional<uint64_t> seed_override);

// Fully resolved echoes embedded in reports.
Json ToJson(const SynthConfig& c);
Json ToJson(const TrainConfig& c);
Json ToJson(const XAttnTrainConfig& c);
Json ToJson(const SynthCommandConfig& c);
Json ToJson(const TrainCommandConfig& c);
Json ToJson(const CrossValCommandConfig& c);
Json ToJson(const PretrainFinetuneCommandConfig& c);
Json ToJson(const ScenariosCommandConfig& c);
Json ToJson(const EvalCommandConfig& c);
Json ToJson(const XAttnCommandConfig& c);

// Key reference shown by --help.
std::string ConfigKeyHelp();

}  // namespace cli
}  // namespace fva

#endif  // FVA_CLI_CONFIG_H_
