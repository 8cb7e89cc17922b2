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

#ifndef FVA_FUSION_XATTN_H_
#define FVA_FUSION_XATTN_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fva/diffcore/layers.h"
#include "fva/diffcore/mat.h"
#include "fva/diffcore/rng.h"

namespace fva {

// Which modality supplies the layer-1 queries. Layer 2 always uses the
// other modality's tokens as queries over the layer-1 output.
enum class AttnDirection { kFaceQueriesVoice, kVoiceQueriesFace };

const char* AttnDirectionName(AttnDirection d);
AttnDirection ParseAttnDirection(const std::string& name);

struct XAttnConfig {
  size_t d_model = 128;
  size_t n_heads = 1;
  bool residual = true;
  // Biases on the q/k/v/output projections. Without them the logit minus
  // the output bias is an odd function of the inputs.
  bool attn_bias = true;
  // Learned per-position embeddings added to each modality's tokens.
  bool positional = true;
  AttnDirection direction = AttnDirection::kFaceQueriesVoice;
  double p_drop = 0.9;
};

void ValidateXAttnConfig(const XAttnConfig& cfg);

struct AttnLayer {
  Mat wq, wk, wv, wo;  // d_model x d_model each
  // 1 x d_model each. No key bias: it shifts every score of a query row
  // equally and cancels in the softmax.
  Mat bq, bv, bo;
};

// Two stacked cross-attention layers over tokenized embeddings, mean-pooled
// into a single same/different logit.
struct XAttnModel {
  XAttnConfig config;
  size_t voice_dim = 0;
  size_t face_dim = 0;
  std::array<AttnLayer, 2> layers;
  Mat out_w;  // d_model x 1
  Mat out_b;  // 1 x 1
  Mat voice_pos;  // voice_tokens x d_model
  Mat face_pos;   // face_tokens x d_model

  size_t voice_tokens() const;
  size_t face_tokens() const;

  static XAttnModel Init(size_t voice_dim, size_t face_dim,
                         const XAttnConfig& cfg, Rng& rng);
};

// Right-pads with zeros to a multiple of d_model and reshapes row-major
// into (tokens x d_model).
Mat Tokenize(std::span<const double> vec, size_t d_model);

struct AttnCache {
  Mat xq, xkv;
  Mat q, k, v;
  std::vector<Mat> probs;  // per head, Tq x Tk; rows sum to one
  Mat context;             // heads concatenated, Tq x d_model
};

struct AttnForwardResult {
  Mat out;
  AttnCache cache;
};

// out = concat_h(softmax(Q_h K_hᵀ / √d_h) V_h) Wo + bo  (+ xq when residual)
// with Q = xq Wq + bq, K = xkv Wk, V = xkv Wv + bv.
AttnForwardResult AttnLayerForward(const AttnLayer& layer, const Mat& xq,
                                   const Mat& xkv, size_t n_heads,
                                   bool residual);

struct AttnLayerGrads {
  AttnLayer params;
  Mat xq;
  Mat xkv;
};

AttnLayerGrads AttnLayerBackward(const AttnLayer& layer,
                                 const AttnCache& cache, const Mat& grad_out,
                                 size_t n_heads, bool residual);

struct XAttnCache {
  Mat voice_mask, face_mask;  // empty in eval mode
  Mat query_tokens, kv_tokens;
  AttnCache layer1, layer2;
  Mat layer2_out;
  Mat pooled;  // 1 x d_model
};

struct XAttnForwardResult {
  double logit = 0.0;
  XAttnCache cache;
};

// One pair at a time. Train mode applies inverted dropout to both raw
// embeddings before tokenization; positional embeddings are added after.
XAttnForwardResult XAttnForward(const XAttnModel& model,
                                std::span<const double> voice_x,
                                std::span<const double> face_x, Mode mode,
                                Rng& rng);

struct XAttnGrads {
  std::array<AttnLayer, 2> layers;
  Mat out_w;
  Mat out_b;
  Mat voice_pos;
  Mat face_pos;

  static XAttnGrads ZerosLike(const XAttnModel& model);
};

// Adds d(logit)/d(params) * grad_logit into `grads`.
void XAttnBackward(const XAttnModel& model, const XAttnCache& cache,
                   double grad_logit, XAttnGrads* grads);

struct BceResult {
  double loss = 0.0;
  double grad_logit = 0.0;
};

// Binary cross-entropy from a logit, stable for large |logit|.
BceResult XAttnLoss(double logit, int label);

// Visits every parameter matrix (model and grads line up index-wise).
std::vector<Mat*> XAttnParams(XAttnModel* model);
std::vector<Mat*> XAttnGradParams(XAttnGrads* grads);

std::string EncodeXAttnCheckpoint(const XAttnModel& model);
XAttnModel DecodeXAttnCheckpoint(std::string_view bytes,
                                 const std::string& source);

}  // namespace fva

#endif  // FVA_FUSION_XATTN_H_
