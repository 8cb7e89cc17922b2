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

#ifndef FVA_DIFFCORE_LAYERS_H_
#define FVA_DIFFCORE_LAYERS_H_

#include "fva/diffcore/mat.h"
#include "fva/diffcore/rng.h"

namespace fva {

enum class Mode { kTrain, kEval };

// Rows with norm at or below this are rejected as degenerate.
inline constexpr double kEpsNorm = 1e-12;

// Divides every row by its Euclidean norm. Throws a degenerate-vector error
// naming the first row whose norm is <= kEpsNorm.
Mat L2NormalizeRows(const Mat& x);

// Per row: grad_x = (I - u uᵀ) grad_out / ‖x‖ with u the normalized row.
Mat L2NormalizeRowsBackward(const Mat& x, const Mat& grad_out);

// Inverted dropout mask: each entry is 0 with probability p_drop, otherwise
// 1 / (1 - p_drop). p_drop must lie in [0, 1).
Mat DropoutMask(Rng& rng, size_t rows, size_t cols, double p_drop);

// Elementwise x ⊙ mask. The same call computes the backward pass, since the
// mask is a constant of the forward expression.
Mat ApplyMask(const Mat& x, const Mat& mask);

}  // namespace fva

#endif  // FVA_DIFFCORE_LAYERS_H_
