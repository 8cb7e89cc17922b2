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

#include "fva/traineval/experiments.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fva/common/error.h"
#include "fva/traineval/scoring.h"

namespace fva {

std::pair<double, double> MeanStd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var)};
}

CrossValResult CrossValidate(const Dataset& data, size_t n_folds,
                             const TrainConfig& cfg, const JointModel* init) {
  ValidateTrainConfig(cfg);
  CrossValResult res;
  Rng fold_rng(DeriveSeed(cfg.seed, "folds"));
  res.plan = SplitFolds(data.Speakers(), n_folds, fold_rng);

  std::vector<double> eers, initial;
  for (size_t f = 0; f < n_folds; ++f) {
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = DeriveSeed(cfg.seed, "fold", f);
    const std::vector<std::string> train_speakers = res.plan.SpeakersOutside(f);
    const Dataset train = data.Select(train_speakers);
    Rng trial_rng(DeriveSeed(fold_cfg.seed, "dev-trials"));
    const DevSet dev = MakeDevSet(data, res.plan.folds[f], fold_cfg, trial_rng);

    TrainResult tr;
    if (init != nullptr) {
      Rng adapt_rng(DeriveSeed(fold_cfg.seed, "classifier"));
      tr = TrainWithEarlyStopping(
          train, dev,
          AdaptToIdentities(*init, IdentityTable(train.Speakers()),
                            cfg.classifier_reinit, adapt_rng),
          fold_cfg);
    } else {
      tr = TrainFromScratch(train, dev, fold_cfg);
    }

    FoldResult fr;
    fr.fold = f;
    fr.dev_speakers = res.plan.folds[f];
    std::sort(fr.dev_speakers.begin(), fr.dev_speakers.end());
    fr.n_trials = dev.trials.size();
    fr.initial_eer = tr.log.front().dev_eer;
    fr.report = EvaluateScores(
        dev.trials,
        ScoreTrials(tr.best, dev.data.faces, dev.data.voices, dev.trials));
    fr.best_step = tr.best_step;
    fr.log = std::move(tr.log);
    fr.checkpoint = std::move(tr.best);
    eers.push_back(fr.report.eer);
    initial.push_back(fr.initial_eer);
    res.folds.push_back(std::move(fr));
  }
  std::tie(res.mean_eer, res.std_eer) = MeanStd(eers);
  res.mean_initial_eer = MeanStd(initial).first;
  return res;
}

SpeakerSplit SplitSpeakers(std::vector<std::string> speakers, double fraction,
                           Rng& rng) {
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()),
                 speakers.end());
  if (speakers.size() < 3) {
    throw Error(ErrorKind::kConfig,
                "need at least 3 speakers for a train/held-out split");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "held-out fraction must lie in (0, 1)");
  }
  size_t n_hold = static_cast<size_t>(
      std::llround(fraction * static_cast<double>(speakers.size())));
  n_hold = std::clamp<size_t>(n_hold, 2, speakers.size() - 1);
  rng.Shuffle(&speakers);
  SpeakerSplit s;
  s.held_out.assign(speakers.begin(), speakers.begin() + n_hold);
  s.train.assign(speakers.begin() + n_hold, speakers.end());
  std::sort(s.held_out.begin(), s.held_out.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

PretrainResult Pretrain(const Dataset& corpus, const TrainConfig& cfg,
                        double holdout_fraction) {
  ValidateTrainConfig(cfg);
  PretrainResult res;
  Rng split_rng(DeriveSeed(cfg.seed, "holdout"));
  res.split = SplitSpeakers(corpus.Speakers(), holdout_fraction, split_rng);
  Rng trial_rng(DeriveSeed(cfg.seed, "dev-trials"));
  res.dev = MakeDevSet(corpus, res.split.held_out, cfg, trial_rng);
  res.train = TrainFromScratch(corpus.Select(res.split.train), res.dev, cfg);
  res.report = EvaluateScores(
      res.dev.trials, ScoreTrials(res.train.best, res.dev.data.faces,
                                  res.dev.data.voices, res.dev.trials));
  return res;
}

PretrainFinetuneResult PretrainThenFinetune(const Dataset& pretrain_data,
                                            const Dataset& finetune_data,
                                            const TrainConfig& pretrain_cfg,
                                            const TrainConfig& finetune_cfg,
                                            size_t n_folds,
                                            double holdout_fraction) {
  if (pretrain_data.faces.dim != finetune_data.faces.dim ||
      pretrain_data.voices.dim != finetune_data.voices.dim) {
    std::ostringstream os;
    os << "pre-train dims (voice " << pretrain_data.voices.dim << ", face "
       << pretrain_data.faces.dim << ") differ from fine-tune dims (voice "
       << finetune_data.voices.dim << ", face " << finetune_data.faces.dim
       << ")";
    throw Error(ErrorKind::kSchema, os.str());
  }
  PretrainFinetuneResult res;
  res.pretrain = Pretrain(pretrain_data, pretrain_cfg, holdout_fraction);
  res.finetune = CrossValidate(finetune_data, n_folds, finetune_cfg,
                               &res.pretrain.train.best);
  res.pretrained_mean_eer = res.finetune.mean_initial_eer;
  res.finetuned_mean_eer = res.finetune.mean_eer;
  return res;
}

}  // namespace fva
