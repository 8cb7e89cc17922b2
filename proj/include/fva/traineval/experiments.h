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

#ifndef FVA_TRAINEVAL_EXPERIMENTS_H_
#define FVA_TRAINEVAL_EXPERIMENTS_H_

#include <optional>
#include <string>
#include <vector>

#include "fva/embedstore/folds.h"
#include "fva/traineval/eer.h"
#include "fva/traineval/trainer.h"

namespace fva {

struct FoldResult {
  size_t fold = 0;
  std::vector<std::string> dev_speakers;
  size_t n_trials = 0;
  // EER of the starting model on this fold's dev trials (eval 0).
  double initial_eer = 0.0;
  EvalReport report;  // best checkpoint on the same trials
  size_t best_step = 0;
  std::vector<EvalPoint> log;
  JointModel checkpoint;
};

struct CrossValResult {
  FoldPlan plan;
  std::vector<FoldResult> folds;
  double mean_eer = 0.0;
  double std_eer = 0.0;  // population standard deviation
  double mean_initial_eer = 0.0;
};

// Mean and population standard deviation.
std::pair<double, double> MeanStd(const std::vector<double>& v);

// Speaker-disjoint k-fold run: each fold trains on the other folds'
// speakers and is evaluated (and early-stopped) on trials drawn from its own
// speakers. With `init`, every fold starts from that model, its classifier
// handled per cfg.classifier_reinit; otherwise from a fresh model. Fold
// seeds derive from cfg.seed and the fold index.
CrossValResult CrossValidate(const Dataset& data, size_t n_folds,
                             const TrainConfig& cfg,
                             const JointModel* init = nullptr);

struct SpeakerSplit {
  std::vector<std::string> train;
  std::vector<std::string> held_out;
};

// Holds out round(fraction * n) speakers (at least 2, at most n - 1),
// chosen by a seeded permutation.
SpeakerSplit SplitSpeakers(std::vector<std::string> speakers, double fraction,
                           Rng& rng);

struct PretrainResult {
  SpeakerSplit split;
  DevSet dev;
  TrainResult train;
  EvalReport report;
};

// Trains on a corpus with a speaker-level held-out split driving early
// stopping.
PretrainResult Pretrain(const Dataset& corpus, const TrainConfig& cfg,
                        double holdout_fraction);

struct PretrainFinetuneResult {
  PretrainResult pretrain;
  CrossValResult finetune;
  // Frozen pre-trained heads vs fine-tuned heads, averaged over folds on
  // identical trials.
  double pretrained_mean_eer = 0.0;
  double finetuned_mean_eer = 0.0;
};

PretrainFinetuneResult PretrainThenFinetune(const Dataset& pretrain_data,
                                            const Dataset& finetune_data,
                                            const TrainConfig& pretrain_cfg,
                                            const TrainConfig& finetune_cfg,
                                            size_t n_folds,
                                            double holdout_fraction = 0.05);

}  // namespace fva

#endif  // FVA_TRAINEVAL_EXPERIMENTS_H_
