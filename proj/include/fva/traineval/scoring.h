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

#ifndef FVA_TRAINEVAL_SCORING_H_
#define FVA_TRAINEVAL_SCORING_H_

#include <string>
#include <vector>

#include "fva/aamloss/joint.h"
#include "fva/embedstore/concat.h"
#include "fva/fusion/xattn.h"
#include "fva/traineval/eer.h"
#include "fva/traineval/trials.h"

namespace fva {

// Cosine score of every trial with both heads in eval mode. Each referenced
// item is embedded once. Unknown ids raise a lookup error listing them.
std::vector<double> ScoreTrials(const JointModel& model,
                                const AssembledSet& faces,
                                const AssembledSet& voices,
                                const std::vector<Trial>& trials);

// Eval-mode logit of the cross-attention model for every trial.
std::vector<double> ScoreTrialsXAttn(const XAttnModel& model,
                                     const AssembledSet& faces,
                                     const AssembledSet& voices,
                                     const std::vector<Trial>& trials);

EvalReport EvaluateScores(const std::vector<Trial>& trials,
                          const std::vector<double>& scores);

// TSV face_record_id, voice_record_id, label, score (9 significant digits).
std::string FormatScoreTsv(const std::vector<Trial>& trials,
                           const std::vector<double>& scores);

}  // namespace fva

#endif  // FVA_TRAINEVAL_SCORING_H_
