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

#include "fva/traineval/scenarios.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "fva/common/error.h"
#include "fva/traineval/scoring.h"

namespace fva {

const char* ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kEnglishHeard: return "english_heard";
    case Scenario::kGermanHeard: return "german_heard";
    case Scenario::kEnglishUnheard: return "english_unheard";
    case Scenario::kGermanUnheard: return "german_unheard";
  }
  return "unknown";
}

Scenario ParseScenario(const std::string& name) {
  for (Scenario s : kAllScenarios) {
    if (name == ScenarioName(s)) return s;
  }
  throw Error(ErrorKind::kConfig, "unknown scenario '" + name + "'");
}

TrainingRecipe DefaultRecipe(Scenario s) {
  TrainingRecipe r;
  switch (s) {
    case Scenario::kEnglishHeard:
      r.test_language = "en";
      r.train_language = "en";
      break;
    case Scenario::kGermanHeard:
      r.test_language = "de";
      r.train_language = "de";
      r.pretrain_exclude = "en";
      break;
    case Scenario::kEnglishUnheard:
      r.test_language = "en";
      r.train_language = "de";
      r.heard = false;
      r.pretrain_exclude = "en";
      r.finetune = true;
      r.finetune_exclude = "en";
      break;
    case Scenario::kGermanUnheard:
      r.test_language = "de";
      r.train_language = "en";
      r.heard = false;
      r.pretrain_exclude = "de";
      r.finetune = true;
      r.finetune_exclude = "de";
      break;
  }
  return r;
}

double ReferenceEer(Scenario s) {
  switch (s) {
    case Scenario::kEnglishHeard: return 30.6;
    case Scenario::kGermanHeard: return 17.9;
    case Scenario::kEnglishUnheard: return 30.1;
    case Scenario::kGermanUnheard: return 17.4;
  }
  return 0.0;
}

ScenarioPlan DefaultPlan(Scenario s) {
  ScenarioPlan p;
  p.scenario = s;
  p.recipe = DefaultRecipe(s);
  return p;
}

namespace {

const EmbeddingStore& CorpusOrThrow(
    const std::map<std::string, EmbeddingStore>& corpora,
    const std::string& key) {
  auto it = corpora.find(key);
  if (it == corpora.end()) {
    throw Error(ErrorKind::kConfig, "unknown corpus '" + key + "'");
  }
  return it->second;
}

Manifest StageManifest(const EmbeddingStore& store,
                       const std::set<std::string>& eval_speakers,
                       const std::optional<std::string>& exclude,
                       bool auto_filter) {
  Manifest m = store.GetManifest();
  std::erase_if(m.entries, [&](const ManifestEntry& e) {
    return eval_speakers.count(e.speaker_id) > 0;
  });
  if (auto_filter && exclude) m = FilterExcludeLanguage(m, *exclude);
  return m;
}

std::string ExcludeKey(const std::optional<std::string>& e) {
  return e ? *e : std::string("-");
}

}  // namespace

std::vector<ConsumedManifest> ConsumedManifests(
    const ScenarioPlan& plan,
    const std::map<std::string, EmbeddingStore>& corpora,
    const std::vector<std::string>& eval_speakers, bool auto_filter) {
  const std::set<std::string> held(eval_speakers.begin(), eval_speakers.end());
  std::vector<ConsumedManifest> out;
  out.push_back({"pretrain", plan.pretrain_corpus,
                 StageManifest(CorpusOrThrow(corpora, plan.pretrain_corpus),
                               held, plan.recipe.pretrain_exclude,
                               auto_filter),
                 plan.recipe.pretrain_exclude});
  if (plan.recipe.finetune) {
    out.push_back({"finetune", plan.finetune_corpus,
                   StageManifest(CorpusOrThrow(corpora, plan.finetune_corpus),
                                 held, plan.recipe.finetune_exclude,
                                 auto_filter),
                   plan.recipe.finetune_exclude});
  }
  return out;
}

void AuditProtocol(const ScenarioPlan& plan,
                   const std::vector<ConsumedManifest>& consumed) {
  const char* name = ScenarioName(plan.scenario);
  for (const auto& c : consumed) {
    if (!plan.recipe.heard &&
        c.excluded_language != plan.recipe.test_language) {
      throw Error(ErrorKind::kProtocol,
                  std::string(name) + ": " + c.stage +
                      " stage does not exclude unheard test language '" +
                      plan.recipe.test_language + "'");
    }
    if (!c.excluded_language) continue;
    size_t count = 0;
    std::string first;
    for (const auto& e : c.manifest.entries) {
      if (e.language == *c.excluded_language) {
        if (count++ == 0) first = e.record_id;
      }
    }
    if (count > 0) {
      std::ostringstream os;
      os << name << ": " << c.stage << " manifest from corpus '" << c.corpus
         << "' holds " << count << " record(s) in excluded language '"
         << *c.excluded_language << "' (first: " << first << ")";
      throw Error(ErrorKind::kProtocol, os.str());
    }
  }
}

ScenarioTable RunScenarios(const std::map<std::string, EmbeddingStore>& corpora,
                           const std::vector<ScenarioPlan>& plans,
                           const ScenarioSettings& settings) {
  if (plans.empty()) throw Error(ErrorKind::kConfig, "no scenario plans");
  ScenarioTable table;

  const EmbeddingStore& eval_store =
      CorpusOrThrow(corpora, settings.eval_corpus);
  const Dataset eval_all = DatasetFromStore(eval_store);
  {
    Rng rng(DeriveSeed(settings.seed, "eval-speakers"));
    std::vector<std::string> spk = eval_all.Speakers();
    if (settings.n_eval_speakers == 0 ||
        settings.n_eval_speakers >= spk.size()) {
      throw Error(ErrorKind::kConfig,
                  "n_eval_speakers must be in [1, speakers of eval corpus)");
    }
    rng.Shuffle(&spk);
    table.eval_speakers.assign(spk.begin(),
                               spk.begin() + settings.n_eval_speakers);
    std::sort(table.eval_speakers.begin(), table.eval_speakers.end());
  }

  std::vector<std::vector<ConsumedManifest>> consumed;
  for (const auto& plan : plans) {
    consumed.push_back(ConsumedManifests(plan, corpora, table.eval_speakers,
                                         settings.auto_filter));
    AuditProtocol(plan, consumed.back());
  }

  std::map<std::string, PretrainResult> pretrained;
  std::map<std::string, CrossValResult> finetuned;
  std::map<std::string, std::pair<Dataset, std::vector<Trial>>> test_sets;

  for (size_t pi = 0; pi < plans.size(); ++pi) {
    const ScenarioPlan& plan = plans[pi];
    const TrainingRecipe& recipe = plan.recipe;
    ScenarioOutcome out;
    out.scenario = plan.scenario;
    out.recipe = recipe;
    out.reference_eer = ReferenceEer(plan.scenario);
    for (const auto& c : consumed[pi]) {
      out.consumed_sizes.emplace_back(c.stage, c.manifest.entries.size());
    }

    const std::string pre_key =
        plan.pretrain_corpus + "|" + ExcludeKey(recipe.pretrain_exclude) +
        (settings.auto_filter ? "" : "|raw");
    if (!pretrained.count(pre_key)) {
      const ConsumedManifest& c = consumed[pi][0];
      const Dataset data = DatasetFromStore(
          CorpusOrThrow(corpora, c.corpus).Restrict(c.manifest));
      pretrained.emplace(pre_key, Pretrain(data, settings.pretrain,
                                           settings.holdout_fraction));
    }
    const PretrainResult& pre = pretrained.at(pre_key);
    out.pretrain_dev_eer = pre.report.eer;

    const std::string& lang = recipe.test_language;
    if (!test_sets.count(lang)) {
      Dataset held = eval_all.Select(table.eval_speakers);
      auto keep_lang = [&](AssembledSet* s) {
        std::erase_if(s->items,
                      [&](const ConcatInput& it) { return it.language != lang; });
      };
      keep_lang(&held.faces);
      keep_lang(&held.voices);
      const std::vector<std::string> face_spk = SpeakersOf(held.faces);
      const std::set<std::string> with_face(face_spk.begin(), face_spk.end());
      std::vector<std::string> both;
      for (const auto& s : SpeakersOf(held.voices)) {
        if (with_face.count(s)) both.push_back(s);
      }
      if (both.size() < 2) {
        throw Error(ErrorKind::kSampling,
                    "fewer than 2 held-out speakers have '" + lang +
                        "' face and voice records");
      }
      Rng rng(DeriveSeed(settings.seed, "test-trials:" + lang));
      auto trials = GenerateTrialsClamped(held.faces, held.voices, both,
                                          settings.test_trials, rng);
      test_sets.emplace(lang, std::make_pair(std::move(held), std::move(trials)));
    }
    const auto& [test_data, test_trials] = test_sets.at(lang);
    out.n_test_trials = test_trials.size();

    auto test_eer = [&](const JointModel& m) {
      return EvaluateScores(test_trials, ScoreTrials(m, test_data.faces,
                                                     test_data.voices,
                                                     test_trials))
          .eer;
    };

    if (recipe.finetune) {
      const std::string ft_key = pre_key + "||" + plan.finetune_corpus + "|" +
                                 ExcludeKey(recipe.finetune_exclude);
      if (!finetuned.count(ft_key)) {
        const ConsumedManifest& c = consumed[pi][1];
        const Dataset data = DatasetFromStore(
            CorpusOrThrow(corpora, c.corpus).Restrict(c.manifest));
        finetuned.emplace(ft_key,
                          CrossValidate(data, settings.n_folds,
                                        settings.finetune, &pre.train.best));
      }
      const CrossValResult& cv = finetuned.at(ft_key);
      out.finetune_cv_eer = cv.mean_eer;
      for (const auto& fold : cv.folds) {
        out.fold_test_eers.push_back(test_eer(fold.checkpoint));
        out.checkpoints.push_back(fold.checkpoint);
      }
      out.test_eer = MeanStd(out.fold_test_eers).first;
    } else {
      out.test_eer = test_eer(pre.train.best);
      out.checkpoints.push_back(pre.train.best);
    }
    table.matrix[recipe.train_language][recipe.test_language] = out.test_eer;
    table.outcomes.push_back(std::move(out));
  }

  double sum = 0.0;
  for (const auto& o : table.outcomes) sum += o.test_eer;
  table.overall_eer = sum / static_cast<double>(table.outcomes.size());
  return table;
}

}  // namespace fva
