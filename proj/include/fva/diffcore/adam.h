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

#ifndef FVA_DIFFCORE_ADAM_H_
#define FVA_DIFFCORE_ADAM_H_

#include <cstdint>

#include "fva/diffcore/mat.h"

namespace fva {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Validates lr >= 0, betas in (0, 1), eps > 0.
void ValidateAdamConfig(const AdamConfig& cfg);

struct AdamState {
  Mat first_moment;
  Mat second_moment;
  int64_t step = 0;
  AdamConfig config;

  static AdamState For(const Mat& param, const AdamConfig& config);
};

// One bias-corrected Adam update of `param` in place.
void AdamStep(Mat* param, const Mat& grad, AdamState* state);

}  // namespace fva

#endif  // FVA_DIFFCORE_ADAM_H_
