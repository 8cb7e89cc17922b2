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

#ifndef FVA_AAMLOSS_AAM_H_
#define FVA_AAMLOSS_AAM_H_

#include <span>

#include "fva/diffcore/mat.h"
#include "fva/diffcore/rng.h"

namespace fva {

// Additive angular margin softmax (ArcFace form).
struct AamConfig {
  double scale = 30.0;
  double margin = 0.2;  // radians
};

// scale > 0, 0 <= margin < π/2.
void ValidateAamConfig(const AamConfig& cfg);

// One row per training identity, shared by the face and voice heads. Raw
// weights are stored; rows are normalized wherever logits are computed.
struct SharedClassifier {
  Mat weight;  // n_classes x dim

  size_t n_classes() const { return weight.rows(); }
  size_t dim() const { return weight.cols(); }

  // Entries N(0, 1/dim).
  static SharedClassifier Init(size_t n_classes, size_t dim, Rng& rng);
};

// cos θ_j = x̂ · ŵ_j; non-target logits s·cos θ_j; target logit
// s·cos(θ + m) = s·(cos θ cos m − sin θ sin m), falling back to
// s·(cos θ − m sin m) once cos θ <= cos(π − m).
Mat AamLogits(const Mat& x, const SharedClassifier& clf, const AamConfig& cfg,
              std::span<const size_t> targets);

struct AamResult {
  double loss = 0.0;  // mean cross-entropy over the batch
  Mat grad_x;
  Mat grad_weight;
};

AamResult AamLossAndGrad(const Mat& x, const SharedClassifier& clf,
                         const AamConfig& cfg,
                         std::span<const size_t> targets);

}  // namespace fva

#endif  // FVA_AAMLOSS_AAM_H_
