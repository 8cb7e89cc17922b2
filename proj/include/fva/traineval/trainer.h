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

#ifndef FVA_TRAINEVAL_TRAINER_H_
#define FVA_TRAINEVAL_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fva/aamloss/aam.h"
#include "fva/aamloss/joint.h"
#include "fva/diffcore/adam.h"
#include "fva/embedstore/concat.h"
#include "fva/traineval/trials.h"

namespace fva {

// Optimizer, learning rate and batch size are not given by the method
// description; these defaults are this toolkit's choice.
struct TrainConfig {
  AdamConfig adam{.lr = 2e-3};
  size_t batch_size = 32;
  size_t max_epochs = 200;
  size_t max_steps = 0;  // 0: bounded by max_epochs only
  size_t patience = 5;
  uint64_t seed = 1;
  AamConfig aam;
  double p_drop = 0.9;
  size_t eval_every = 50;
  bool classifier_reinit = true;
  bool use_bias = true;
  size_t out_dim = 192;
  TrialCounts dev_trials{1000, 1000};
  // Shrink dev trial counts to what the held-out speakers offer instead of
  // failing.
  bool clamp_dev_trials = true;
};

void ValidateTrainConfig(const TrainConfig& cfg);

// Face and voice inputs of one corpus (or one split of it).
struct Dataset {
  AssembledSet faces;
  AssembledSet voices;

  std::vector<std::string> Speakers() const;
  Dataset Select(const std::vector<std::string>& speakers) const;
};

// Assembles both sides of a store (per-owner pairing).
Dataset DatasetFromStore(const EmbeddingStore& store);

struct DevSet {
  Dataset data;
  std::vector<Trial> trials;
};

// Builds verification trials over `speakers` of `data` per the config's
// dev-trial counts.
DevSet MakeDevSet(const Dataset& data, const std::vector<std::string>& speakers,
                  const TrainConfig& cfg, Rng& rng);

// Tracks the best evaluation (lowest EER; earlier wins ties). `patience`
// non-improving evaluations in a row are tolerated; the next one stops.
// With patience 1 and a dev EER that rises at evals 1 and 2, training
// stops at eval 2 and keeps eval 0.
class EarlyStopper {
 public:
  explicit EarlyStopper(size_t patience);

  // Returns true if this evaluation is the new best.
  bool Observe(double eer);
  bool ShouldStop() const { return since_best_ > patience_; }
  size_t best_index() const { return best_index_; }
  double best() const { return best_; }
  size_t evaluations() const { return evaluations_; }

 private:
  size_t patience_;
  size_t evaluations_ = 0;
  size_t best_index_ = 0;
  size_t since_best_ = 0;
  double best_ = 0.0;
};

struct EvalPoint {
  size_t step = 0;
  double dev_eer = 0.0;
  double mean_face_loss = 0.0;   // since the previous evaluation
  double mean_voice_loss = 0.0;
  bool improved = false;
};

struct TrainResult {
  JointModel best;
  size_t best_step = 0;
  double best_eer = 0.0;
  std::vector<EvalPoint> log;
  size_t steps_run = 0;
  bool stopped_early = false;
};

JointModel InitJointModel(size_t voice_dim, size_t face_dim,
                          const IdentityTable& identities,
                          const TrainConfig& cfg, Rng& rng);

// Re-targets a (pre-trained) model at a new identity table. With
// classifier_reinit the classifier is drawn fresh; otherwise rows of
// speakers already known are kept and only new speakers get fresh rows.
JointModel AdaptToIdentities(const JointModel& model,
                             const IdentityTable& identities, bool reinit,
                             Rng& rng);

// Trains from `init` (already targeting the training identities). The dev
// set is scored before the first step and every eval_every steps; the
// lowest-EER model is returned. Dev speakers must be disjoint from the
// training speakers (protocol error otherwise); an empty dev trial list is
// a config error.
TrainResult TrainWithEarlyStopping(const Dataset& train, const DevSet& dev,
                                   JointModel init, const TrainConfig& cfg);

// Fresh model for `train`'s speakers, then TrainWithEarlyStopping.
TrainResult TrainFromScratch(const Dataset& train, const DevSet& dev,
                             const TrainConfig& cfg);

// Permutes speaker labels across items (independently per side), breaking
// every identity link. Used for chance-level sanity runs.
Dataset ShuffleSpeakerLabels(const Dataset& data, Rng& rng);

}  // namespace fva

#endif  // FVA_TRAINEVAL_TRAINER_H_
