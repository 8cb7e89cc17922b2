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

#include "fva/cli/report.h"

#include <ctime>

namespace fva {
namespace cli {

namespace {

const char* LanguageLabel(const std::string& tag) {
  if (tag == "en") return "english";
  if (tag == "de") return "german";
  return nullptr;
}

std::string Label(const std::string& tag) {
  const char* l = LanguageLabel(tag);
  return l ? l : tag;
}

Json OptionalJson(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

}  // namespace

Json ToJson(const EvalReport& r) {
  Json j{{"eer", r.eer},
         {"threshold_at_eer", r.threshold},
         {"n_target", r.n_target},
         {"n_nontarget", r.n_nontarget},
         {"mean_target_score", r.mean_target_score},
         {"mean_nontarget_score", r.mean_nontarget_score}};
  if (!r.score_file.empty()) j["score_file"] = r.score_file;
  return j;
}

Json ToJson(const std::vector<EvalPoint>& log) {
  Json a = Json::array();
  for (size_t i = 0; i < log.size(); ++i) {
    const EvalPoint& p = log[i];
    a.push_back({{"eval", i},
                 {"step", p.step},
                 {"dev_eer", p.dev_eer},
                 {"mean_face_loss", p.mean_face_loss},
                 {"mean_voice_loss", p.mean_voice_loss},
                 {"improved", p.improved}});
  }
  return a;
}

Json ToJson(const CrossValResult& cv) {
  Json folds = Json::array();
  std::vector<double> eers;
  for (const auto& f : cv.folds) {
    folds.push_back({{"fold", f.fold},
                     {"dev_speakers", f.dev_speakers},
                     {"n_trials", f.n_trials},
                     {"initial_eer", f.initial_eer},
                     {"eer", f.report.eer},
                     {"report", ToJson(f.report)},
                     {"best_step", f.best_step},
                     {"log", ToJson(f.log)}});
    eers.push_back(f.report.eer);
  }
  return Json{{"n_folds", cv.folds.size()},
              {"fold_eers", eers},
              {"mean_eer", cv.mean_eer},
              {"std_eer", cv.std_eer},
              {"mean_initial_eer", cv.mean_initial_eer},
              {"folds", folds}};
}

Json ToJson(const PretrainResult& p) {
  return Json{{"train_speakers", p.split.train.size()},
              {"held_out_speakers", p.split.held_out},
              {"n_dev_trials", p.dev.trials.size()},
              {"dev_eer", p.report.eer},
              {"report", ToJson(p.report)},
              {"best_step", p.train.best_step},
              {"steps_run", p.train.steps_run},
              {"stopped_early", p.train.stopped_early},
              {"log", ToJson(p.train.log)}};
}

Json ToJson(const ScenarioTable& t) {
  Json rows = Json::array();
  for (const auto& o : t.outcomes) {
    Json consumed = Json::object();
    for (const auto& [stage, n] : o.consumed_sizes) consumed[stage] = n;
    Json row{{"scenario", ScenarioName(o.scenario)},
             {"test_language", o.recipe.test_language},
             {"train_language", o.recipe.train_language},
             {"heard", o.recipe.heard},
             {"pretrain_exclude", OptionalJson(o.recipe.pretrain_exclude)},
             {"finetune", o.recipe.finetune},
             {"finetune_exclude", OptionalJson(o.recipe.finetune_exclude)},
             {"consumed_records", consumed},
             {"pretrain_dev_eer", o.pretrain_dev_eer},
             {"n_test_trials", o.n_test_trials},
             {"test_eer", o.test_eer},
             {"reference_eer_percent", o.reference_eer}};
    row["finetune_cv_eer"] =
        o.finetune_cv_eer ? Json(*o.finetune_cv_eer) : Json(nullptr);
    row["fold_test_eers"] = o.fold_test_eers;
    rows.push_back(row);
  }
  Json matrix = Json::object();
  for (const auto& [train, cols] : t.matrix) {
    Json c = Json::object();
    for (const auto& [test, eer] : cols) c[Label(test) + "_test"] = eer;
    matrix[Label(train) + "_train"] = c;
  }
  Json ref = Json::object();
  for (Scenario s : kAllScenarios) ref[ScenarioName(s)] = ReferenceEer(s);
  ref["overall"] = kReferenceOverallEer;
  return Json{{"eval_speakers", t.eval_speakers},
              {"scenarios", rows},
              {"table", matrix},
              {"overall_eer", t.overall_eer},
              {"reference_eer_percent", ref}};
}

Json ToJson(const ArchitectureComparison& c) {
  return Json{
      {"n_trials", c.n_trials},
      {"separate", {{"eer", c.separate.eer}, {"report", ToJson(c.separate)}}},
      {"cross_attention",
       {{"eer", c.cross_attention.eer}, {"report", ToJson(c.cross_attention)}}},
      // Reference figures for the two designs, for documentation only.
      {"reference_eer_percent",
       {{"separate", 23.99}, {"cross_attention", 28.92}}}};
}

std::string FinishReport(Json report) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  report[kTimestampField] = buf;
  return report.dump(2) + "\n";
}

Json StripTimestamp(Json report) {
  report.erase(kTimestampField);
  return report;
}

}  // namespace cli
}  // namespace fva
