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

#ifndef FVA_TRAINEVAL_EER_H_
#define FVA_TRAINEVAL_EER_H_

#include <span>
#include <string>

namespace fva {

struct ScoredTrial {
  double score = 0.0;
  bool target = false;
};

struct EvalReport {
  double eer = 0.0;
  double threshold = 0.0;
  size_t n_target = 0;
  size_t n_nontarget = 0;
  double mean_target_score = 0.0;
  double mean_nontarget_score = 0.0;
  std::string score_file;
};

// Equal error rate. Candidate thresholds are the sorted unique scores plus
// +inf; a score >= t is accepted, so
//   FAR(t) = #{non-target >= t} / N,  FRR(t) = #{target < t} / T.
// The first operating point (lowest threshold) where FRR >= FAR is the
// crossing: an exact tie is returned as is, otherwise the EER is the
// intersection of the FAR and FRR segments between it and the previous
// point. Throws a metric error unless both classes are present and all
// scores are finite.
EvalReport ComputeEer(std::span<const ScoredTrial> scores);

}  // namespace fva

#endif  // FVA_TRAINEVAL_EER_H_
