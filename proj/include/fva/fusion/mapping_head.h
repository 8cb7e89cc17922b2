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

#ifndef FVA_FUSION_MAPPING_HEAD_H_
#define FVA_FUSION_MAPPING_HEAD_H_

#include <span>

#include "fva/common/binary_io.h"
#include "fva/diffcore/layers.h"
#include "fva/diffcore/mat.h"
#include "fva/diffcore/rng.h"

namespace fva {

inline constexpr size_t kSharedDim = 192;

// Dropout followed by one affine map from a concatenated modality embedding
// into the shared space. Backbones upstream stay frozen; only this is
// trained.
struct MappingHead {
  Mat weight;  // out_dim x in_dim
  Mat bias;    // 1 x out_dim
  double p_drop = 0.9;
  bool use_bias = true;

  size_t in_dim() const { return weight.cols(); }
  size_t out_dim() const { return weight.rows(); }

  // Weight entries N(0, 1/in_dim), zero bias.
  static MappingHead Init(size_t in_dim, size_t out_dim, double p_drop,
                          bool use_bias, Rng& rng);
};

struct HeadCache {
  Mat input;
  Mat mask;     // empty in eval mode
  Mat dropped;  // input after the mask (== input in eval mode)
};

struct HeadForwardResult {
  Mat y;
  HeadCache cache;
};

// train: y = (x ⊙ mask) Wᵀ + b with a fresh inverted-dropout mask from rng.
// eval:  y = x Wᵀ + b; rng is untouched.
HeadForwardResult HeadForward(const MappingHead& head, const Mat& x, Mode mode,
                              Rng& rng);

// Eval-mode projection.
Mat HeadEmbed(const MappingHead& head, const Mat& x);

struct HeadGrads {
  Mat weight;
  Mat bias;
  Mat input;
};

HeadGrads HeadBackward(const MappingHead& head, const HeadCache& cache,
                       const Mat& grad_y);

// Cosine similarity; throws a degenerate-vector error on a zero input.
double ScorePair(std::span<const double> face_y,
                 std::span<const double> voice_y);

void EncodeMat(ByteWriter& w, const Mat& m);
Mat DecodeMat(ByteReader& r, const char* what);
void EncodeHead(ByteWriter& w, const MappingHead& head);
MappingHead DecodeHead(ByteReader& r);

}  // namespace fva

#endif  // FVA_FUSION_MAPPING_HEAD_H_
