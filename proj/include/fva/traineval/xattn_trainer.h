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

#ifndef FVA_TRAINEVAL_XATTN_TRAINER_H_
#define FVA_TRAINEVAL_XATTN_TRAINER_H_

#include <cstdint>
#include <vector>

#include "fva/diffcore/adam.h"
#include "fva/fusion/xattn.h"
#include "fva/traineval/eer.h"
#include "fva/traineval/trainer.h"

namespace fva {

struct XAttnTrainConfig {
  XAttnConfig model;
  AdamConfig adam{.lr = 1e-3};
  size_t batch_size = 16;  // pairs per step, half same / half different
  size_t max_steps = 500;
  size_t eval_every = 25;
  size_t patience = 5;
  uint64_t seed = 1;
};

void ValidateXAttnTrainConfig(const XAttnTrainConfig& cfg);

struct XAttnTrainResult {
  XAttnModel best;
  size_t best_step = 0;
  double best_eer = 0.0;
  std::vector<EvalPoint> log;  // mean_face_loss holds the mean BCE
  size_t steps_run = 0;
  bool stopped_early = false;
};

// Trains the pair classifier on same/different pairs sampled from `train`,
// early-stopped on the dev trials' EER (logits as scores).
XAttnTrainResult TrainXAttn(const Dataset& train, const DevSet& dev,
                            const XAttnTrainConfig& cfg);

struct ArchitectureComparison {
  size_t n_trials = 0;
  EvalReport separate;  // mapping heads + cosine
  EvalReport cross_attention;
};

// Scores the same trials with both architectures.
ArchitectureComparison CompareArchitectures(const JointModel& joint,
                                            const XAttnModel& xattn,
                                            const DevSet& trials);

}  // namespace fva

#endif  // FVA_TRAINEVAL_XATTN_TRAINER_H_
