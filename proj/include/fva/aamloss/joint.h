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

#ifndef FVA_AAMLOSS_JOINT_H_
#define FVA_AAMLOSS_JOINT_H_

#include <map>
#include <string>
#include <vector>

#include "fva/aamloss/aam.h"
#include "fva/diffcore/adam.h"
#include "fva/diffcore/rng.h"
#include "fva/fusion/mapping_head.h"

namespace fva {

// Maps training speaker ids onto classifier rows.
class IdentityTable {
 public:
  IdentityTable() = default;
  // Sorted and deduplicated.
  explicit IdentityTable(std::vector<std::string> speakers);

  size_t size() const { return speakers_.size(); }
  const std::vector<std::string>& speakers() const { return speakers_; }
  // Throws a lookup error for unknown speakers.
  size_t IndexOf(const std::string& speaker) const;

  friend bool operator==(const IdentityTable& a, const IdentityTable& b) {
    return a.speakers_ == b.speakers_;
  }

 private:
  std::vector<std::string> speakers_;
  std::map<std::string, size_t> index_;
};

struct LabeledBatch {
  Mat x;
  std::vector<size_t> targets;
  const IdentityTable* table = nullptr;
};

// Everything a checkpoint holds for the separate-pipelines architecture.
struct JointModel {
  MappingHead face;
  MappingHead voice;
  SharedClassifier classifier;
  IdentityTable identities;
};

struct HeadOptimizer {
  AdamState weight;
  AdamState bias;

  static HeadOptimizer For(const MappingHead& head, const AdamConfig& cfg);
};

struct JointOptimizer {
  HeadOptimizer face;
  HeadOptimizer voice;
  AdamState classifier;

  static JointOptimizer For(const JointModel& model, const AdamConfig& cfg);
};

struct JointGrads {
  double face_loss = 0.0;
  double voice_loss = 0.0;
  HeadGrads face;
  HeadGrads voice;
  Mat classifier;  // sum of both modalities' contributions
};

// Runs each head in train mode (face first, then voice, drawing dropout
// masks from rng in that order) and scores both against the same
// classifier. Throws a config error if the batches use different identity
// tables or the table does not match the classifier.
JointGrads ComputeJointGrads(const LabeledBatch& face,
                             const LabeledBatch& voice,
                             const JointModel& model, const AamConfig& cfg,
                             Rng& rng);

struct JointStepResult {
  double face_loss = 0.0;
  double voice_loss = 0.0;
};

// One Adam step on L_face + L_voice.
JointStepResult JointStep(const LabeledBatch& face, const LabeledBatch& voice,
                          JointModel* model, const AamConfig& cfg,
                          JointOptimizer* opt, Rng& rng);

std::string EncodeJointCheckpoint(const JointModel& model);
JointModel DecodeJointCheckpoint(std::string_view bytes,
                                 const std::string& source);

// Throws a schema error unless the heads accept the given input dims.
void ValidateModelDims(const JointModel& model, size_t voice_dim,
                       size_t face_dim);

}  // namespace fva

#endif  // FVA_AAMLOSS_JOINT_H_
