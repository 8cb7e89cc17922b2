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

#ifndef FVA_TRAINEVAL_SCENARIOS_H_
#define FVA_TRAINEVAL_SCENARIOS_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fva/embedstore/embedding_store.h"
#include "fva/traineval/experiments.h"
#include "fva/traineval/trainer.h"

namespace fva {

enum class Scenario {
  kEnglishHeard,
  kGermanHeard,
  kEnglishUnheard,
  kGermanUnheard,
};

inline constexpr std::array<Scenario, 4> kAllScenarios = {
    Scenario::kEnglishHeard, Scenario::kGermanHeard, Scenario::kEnglishUnheard,
    Scenario::kGermanUnheard};

// "english_heard", "german_heard", "english_unheard", "german_unheard".
const char* ScenarioName(Scenario s);
Scenario ParseScenario(const std::string& name);

struct TrainingRecipe {
  std::string test_language;
  // Row of the scenario matrix ("en" or "de" training side).
  std::string train_language;
  bool heard = true;
  std::optional<std::string> pretrain_exclude;
  bool finetune = false;
  std::optional<std::string> finetune_exclude;
};

// Default model selection: english-heard uses the all-data
// pre-trained model, german-heard the English-excluded one, and each unheard
// scenario its language-excluded model fine-tuned on the fine-tuning folds.
TrainingRecipe DefaultRecipe(Scenario s);

// Reference test EERs (percent) for documentation in reports;
// never asserted.
double ReferenceEer(Scenario s);
inline constexpr double kReferenceOverallEer = 23.99;

struct ScenarioPlan {
  Scenario scenario = Scenario::kEnglishHeard;
  TrainingRecipe recipe;
  // Keys into the corpus map.
  std::string pretrain_corpus = "pretrain";
  std::string finetune_corpus = "finetune";
};

ScenarioPlan DefaultPlan(Scenario s);

struct ScenarioSettings {
  TrainConfig pretrain;
  TrainConfig finetune;
  size_t n_folds = 7;
  double holdout_fraction = 0.05;
  // Speakers of the evaluation corpus withheld from every training stage.
  size_t n_eval_speakers = 8;
  std::string eval_corpus = "finetune";
  TrialCounts test_trials{1000, 1000};
  // Apply each recipe's language exclusions when building stage inputs.
  // When false the corpora are consumed as given (pre-filtered variants) and
  // only the audit guards the protocol.
  bool auto_filter = true;
  uint64_t seed = 1;
};

struct ConsumedManifest {
  std::string stage;  // "pretrain" or "finetune"
  std::string corpus;
  Manifest manifest;
  std::optional<std::string> excluded_language;
};

// Training manifests a plan would consume, with eval speakers removed and
// (under auto_filter) exclusions applied.
std::vector<ConsumedManifest> ConsumedManifests(
    const ScenarioPlan& plan,
    const std::map<std::string, EmbeddingStore>& corpora,
    const std::vector<std::string>& eval_speakers, bool auto_filter);

// Throws a protocol-violation error if any consumed manifest holds a record
// in its stage's excluded language, or if an unheard plan fails to exclude
// its test language from every stage.
void AuditProtocol(const ScenarioPlan& plan,
                   const std::vector<ConsumedManifest>& consumed);

struct ScenarioOutcome {
  Scenario scenario = Scenario::kEnglishHeard;
  TrainingRecipe recipe;
  double test_eer = 0.0;
  std::vector<double> fold_test_eers;  // fine-tuned recipes only
  double pretrain_dev_eer = 0.0;
  std::optional<double> finetune_cv_eer;
  size_t n_test_trials = 0;
  std::vector<std::pair<std::string, size_t>> consumed_sizes;
  double reference_eer = 0.0;
  // The pre-trained model, or one fine-tuned model per fold.
  std::vector<JointModel> checkpoints;
};

struct ScenarioTable {
  std::vector<ScenarioOutcome> outcomes;
  std::vector<std::string> eval_speakers;
  // matrix[train_language][test_language] = test EER
  std::map<std::string, std::map<std::string, double>> matrix;
  double overall_eer = 0.0;
};

// Audits every plan first (nothing trains if any plan violates the
// protocol), then runs each recipe: filter -> pre-train -> optional
// fine-tune -> evaluate on the held-out speakers' test-language trials.
// Identical pre-training / fine-tuning stages are shared between plans.
ScenarioTable RunScenarios(const std::map<std::string, EmbeddingStore>& corpora,
                           const std::vector<ScenarioPlan>& plans,
                           const ScenarioSettings& settings);

}  // namespace fva

#endif  // FVA_TRAINEVAL_SCENARIOS_H_
