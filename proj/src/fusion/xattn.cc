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

#include "fva/fusion/xattn.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fva/common/binary_io.h"
#include "fva/common/error.h"
#include "fva/fusion/checkpoint_format.h"
#include "fva/fusion/mapping_head.h"

namespace fva {

const char* AttnDirectionName(AttnDirection d) {
  return d == AttnDirection::kFaceQueriesVoice ? "face_queries_voice"
                                               : "voice_queries_face";
}

AttnDirection ParseAttnDirection(const std::string& name) {
  if (name == "face_queries_voice") return AttnDirection::kFaceQueriesVoice;
  if (name == "voice_queries_face") return AttnDirection::kVoiceQueriesFace;
  throw Error(ErrorKind::kConfig, "unknown attention direction '" + name + "'");
}

void ValidateXAttnConfig(const XAttnConfig& cfg) {
  if (cfg.d_model == 0 || cfg.n_heads == 0 || cfg.d_model % cfg.n_heads != 0) {
    throw Error(ErrorKind::kConfig,
                "d_model must be positive and divisible by n_heads");
  }
  if (!(cfg.p_drop >= 0.0 && cfg.p_drop < 1.0)) {
    throw Error(ErrorKind::kConfig, "xattn p_drop outside [0, 1)");
  }
}

namespace {

size_t TokenCount(size_t dim, size_t d_model) {
  return (dim + d_model - 1) / d_model;
}

Mat Gaussian(Rng& rng, size_t rows, size_t cols, double scale) {
  Mat m(rows, cols);
  for (double& v : m.data()) v = scale * rng.Normal();
  return m;
}

// Columns [c0, c0 + n) of m.
Mat Cols(const Mat& m, size_t c0, size_t n) {
  Mat out(m.rows(), n);
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < n; ++c) out(r, c) = m(r, c0 + c);
  return out;
}

void SetCols(Mat* dst, const Mat& src, size_t c0) {
  for (size_t r = 0; r < src.rows(); ++r)
    for (size_t c = 0; c < src.cols(); ++c) (*dst)(r, c0 + c) = src(r, c);
}

void SoftmaxRowsInPlace(Mat* s) {
  for (size_t r = 0; r < s->rows(); ++r) {
    auto row = s->Row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : row) v /= z;
  }
}

void AddRow(Mat* m, const Mat& row) {
  for (size_t r = 0; r < m->rows(); ++r)
    for (size_t c = 0; c < m->cols(); ++c) (*m)(r, c) += row(0, c);
}

Mat ColSums(const Mat& m) {
  Mat out(1, m.cols());
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c) out(0, c) += m(r, c);
  return out;
}

Mat MaskedVector(std::span<const double> x, const Mat& mask) {
  Mat out = Mat::FromData(1, x.size(), {x.begin(), x.end()});
  return mask.empty() ? out : ApplyMask(out, mask);
}

}  // namespace

size_t XAttnModel::voice_tokens() const {
  return TokenCount(voice_dim, config.d_model);
}

size_t XAttnModel::face_tokens() const {
  return TokenCount(face_dim, config.d_model);
}

XAttnModel XAttnModel::Init(size_t voice_dim, size_t face_dim,
                            const XAttnConfig& cfg, Rng& rng) {
  ValidateXAttnConfig(cfg);
  if (voice_dim == 0 || face_dim == 0) {
    throw Error(ErrorKind::kConfig, "xattn input dims must be positive");
  }
  XAttnModel m;
  m.config = cfg;
  m.voice_dim = voice_dim;
  m.face_dim = face_dim;
  const size_t d = cfg.d_model;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& layer : m.layers) {
    layer.wq = Gaussian(rng, d, d, scale);
    layer.wk = Gaussian(rng, d, d, scale);
    layer.wv = Gaussian(rng, d, d, scale);
    layer.wo = Gaussian(rng, d, d, scale);
    layer.bq = Mat(1, d);
    layer.bv = Mat(1, d);
    layer.bo = Mat(1, d);
  }
  m.out_w = Gaussian(rng, d, 1, scale);
  m.out_b = Mat(1, 1);
  m.voice_pos = Mat(m.voice_tokens(), d);
  m.face_pos = Mat(m.face_tokens(), d);
  if (cfg.positional) {
    m.voice_pos = Gaussian(rng, m.voice_tokens(), d, 1.0);
    m.face_pos = Gaussian(rng, m.face_tokens(), d, 1.0);
  }
  return m;
}

Mat Tokenize(std::span<const double> vec, size_t d_model) {
  const size_t t = TokenCount(vec.size(), d_model);
  Mat tokens(t, d_model);
  std::copy(vec.begin(), vec.end(), tokens.data().begin());
  return tokens;
}

AttnForwardResult AttnLayerForward(const AttnLayer& layer, const Mat& xq,
                                   const Mat& xkv, size_t n_heads,
                                   bool residual) {
  const size_t d = layer.wq.rows();
  if (xq.cols() != d || xkv.cols() != d || d % n_heads != 0) {
    throw Error(ErrorKind::kShape, "attention: queries " + xq.ShapeString() +
                                       ", keys " + xkv.ShapeString() +
                                       ", d_model " + std::to_string(d));
  }
  const size_t dh = d / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  AttnForwardResult res;
  AttnCache& c = res.cache;
  c.xq = xq;
  c.xkv = xkv;
  c.q = MatMul(xq, layer.wq);
  c.k = MatMul(xkv, layer.wk);
  c.v = MatMul(xkv, layer.wv);
  AddRow(&c.q, layer.bq);
  AddRow(&c.v, layer.bv);
  c.context = Mat(xq.rows(), d);
  for (size_t h = 0; h < n_heads; ++h) {
    const Mat qh = Cols(c.q, h * dh, dh);
    const Mat kh = Cols(c.k, h * dh, dh);
    const Mat vh = Cols(c.v, h * dh, dh);
    Mat p = MatMulTransB(qh, kh);
    p *= scale;
    SoftmaxRowsInPlace(&p);
    SetCols(&c.context, MatMul(p, vh), h * dh);
    c.probs.push_back(std::move(p));
  }
  res.out = MatMul(c.context, layer.wo);
  AddRow(&res.out, layer.bo);
  if (residual) res.out += xq;
  return res;
}

AttnLayerGrads AttnLayerBackward(const AttnLayer& layer,
                                 const AttnCache& cache, const Mat& grad_out,
                                 size_t n_heads, bool residual) {
  CheckSameShape(grad_out, cache.context, "attention backward");
  const size_t d = layer.wq.rows();
  const size_t dh = d / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  AttnLayerGrads g;
  g.params.wo = MatMulTransA(cache.context, grad_out);
  g.params.bo = ColSums(grad_out);
  const Mat d_context = MatMulTransB(grad_out, layer.wo);

  Mat dq(cache.q.rows(), d), dk(cache.k.rows(), d), dv(cache.v.rows(), d);
  for (size_t h = 0; h < n_heads; ++h) {
    const Mat& p = cache.probs[h];
    const Mat qh = Cols(cache.q, h * dh, dh);
    const Mat kh = Cols(cache.k, h * dh, dh);
    const Mat vh = Cols(cache.v, h * dh, dh);
    const Mat dctx = Cols(d_context, h * dh, dh);
    const Mat dp = MatMulTransB(dctx, vh);
    SetCols(&dv, MatMulTransA(p, dctx), h * dh);
    // softmax Jacobian: dS = P ⊙ (dP − rowsum(dP ⊙ P))
    Mat ds(p.rows(), p.cols());
    for (size_t r = 0; r < p.rows(); ++r) {
      const double inner = Dot(dp.Row(r), p.Row(r));
      for (size_t c = 0; c < p.cols(); ++c) {
        ds(r, c) = p(r, c) * (dp(r, c) - inner) * scale;
      }
    }
    SetCols(&dq, MatMul(ds, kh), h * dh);
    SetCols(&dk, MatMulTransA(ds, qh), h * dh);
  }
  g.params.wq = MatMulTransA(cache.xq, dq);
  g.params.wk = MatMulTransA(cache.xkv, dk);
  g.params.wv = MatMulTransA(cache.xkv, dv);
  g.params.bq = ColSums(dq);
  g.params.bv = ColSums(dv);
  g.xq = MatMulTransB(dq, layer.wq);
  if (residual) g.xq += grad_out;
  g.xkv = MatMulTransB(dk, layer.wk) + MatMulTransB(dv, layer.wv);
  return g;
}

XAttnForwardResult XAttnForward(const XAttnModel& model,
                                std::span<const double> voice_x,
                                std::span<const double> face_x, Mode mode,
                                Rng& rng) {
  if (voice_x.size() != model.voice_dim || face_x.size() != model.face_dim) {
    std::ostringstream os;
    os << "xattn expects voice " << model.voice_dim << " / face "
       << model.face_dim << ", got " << voice_x.size() << " / "
       << face_x.size();
    throw Error(ErrorKind::kShape, os.str());
  }
  const XAttnConfig& cfg = model.config;
  XAttnForwardResult res;
  XAttnCache& c = res.cache;
  if (mode == Mode::kTrain) {
    c.voice_mask = DropoutMask(rng, 1, voice_x.size(), cfg.p_drop);
    c.face_mask = DropoutMask(rng, 1, face_x.size(), cfg.p_drop);
  }
  Mat voice_tok = Tokenize(MaskedVector(voice_x, c.voice_mask).data(),
                           cfg.d_model);
  Mat face_tok = Tokenize(MaskedVector(face_x, c.face_mask).data(),
                          cfg.d_model);
  voice_tok += model.voice_pos;
  face_tok += model.face_pos;
  if (cfg.direction == AttnDirection::kFaceQueriesVoice) {
    c.query_tokens = std::move(face_tok);
    c.kv_tokens = std::move(voice_tok);
  } else {
    c.query_tokens = std::move(voice_tok);
    c.kv_tokens = std::move(face_tok);
  }
  AttnForwardResult l1 = AttnLayerForward(model.layers[0], c.query_tokens,
                                          c.kv_tokens, cfg.n_heads,
                                          cfg.residual);
  AttnForwardResult l2 = AttnLayerForward(model.layers[1], c.kv_tokens, l1.out,
                                          cfg.n_heads, cfg.residual);
  c.layer1 = std::move(l1.cache);
  c.layer2 = std::move(l2.cache);
  c.layer2_out = std::move(l2.out);
  c.pooled = Mat(1, cfg.d_model);
  const double inv_t = 1.0 / static_cast<double>(c.layer2_out.rows());
  for (size_t r = 0; r < c.layer2_out.rows(); ++r)
    for (size_t j = 0; j < cfg.d_model; ++j)
      c.pooled(0, j) += c.layer2_out(r, j) * inv_t;
  res.logit = Dot(c.pooled.Row(0), model.out_w.data()) + model.out_b(0, 0);
  return res;
}

XAttnGrads XAttnGrads::ZerosLike(const XAttnModel& model) {
  XAttnGrads g;
  const size_t d = model.config.d_model;
  for (auto& layer : g.layers) {
    layer.wq = Mat(d, d);
    layer.wk = Mat(d, d);
    layer.wv = Mat(d, d);
    layer.wo = Mat(d, d);
    layer.bq = Mat(1, d);
    layer.bv = Mat(1, d);
    layer.bo = Mat(1, d);
  }
  g.out_w = Mat(d, 1);
  g.out_b = Mat(1, 1);
  g.voice_pos = Mat(model.voice_tokens(), d);
  g.face_pos = Mat(model.face_tokens(), d);
  return g;
}

void XAttnBackward(const XAttnModel& model, const XAttnCache& cache,
                   double grad_logit, XAttnGrads* grads) {
  const XAttnConfig& cfg = model.config;
  const size_t d = cfg.d_model;
  for (size_t j = 0; j < d; ++j) {
    grads->out_w(j, 0) += cache.pooled(0, j) * grad_logit;
  }
  grads->out_b(0, 0) += grad_logit;

  const size_t t = cache.layer2_out.rows();
  Mat d_l2(t, d);
  for (size_t r = 0; r < t; ++r)
    for (size_t j = 0; j < d; ++j)
      d_l2(r, j) = grad_logit * model.out_w(j, 0) / static_cast<double>(t);

  AttnLayerGrads g2 = AttnLayerBackward(model.layers[1], cache.layer2, d_l2,
                                        cfg.n_heads, cfg.residual);
  AttnLayerGrads g1 = AttnLayerBackward(model.layers[0], cache.layer1, g2.xkv,
                                        cfg.n_heads, cfg.residual);
  if (cfg.positional) {
    Mat d_kv = g2.xq;
    d_kv += g1.xkv;
    const bool face_queries = cfg.direction == AttnDirection::kFaceQueriesVoice;
    (face_queries ? grads->face_pos : grads->voice_pos) += g1.xq;
    (face_queries ? grads->voice_pos : grads->face_pos) += d_kv;
  }
  const std::array<const AttnLayer*, 2> src = {&g1.params, &g2.params};
  for (size_t l = 0; l < 2; ++l) {
    grads->layers[l].wq += src[l]->wq;
    grads->layers[l].wk += src[l]->wk;
    grads->layers[l].wv += src[l]->wv;
    grads->layers[l].wo += src[l]->wo;
    if (cfg.attn_bias) {
      grads->layers[l].bq += src[l]->bq;
      grads->layers[l].bv += src[l]->bv;
      grads->layers[l].bo += src[l]->bo;
    }
  }
}

BceResult XAttnLoss(double logit, int label) {
  if (label != 0 && label != 1) {
    throw Error(ErrorKind::kConfig, "BCE label must be 0 or 1");
  }
  const double y = static_cast<double>(label);
  BceResult r;
  r.loss = std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
  const double sig = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                                  : std::exp(logit) / (1.0 + std::exp(logit));
  r.grad_logit = sig - y;
  return r;
}

std::vector<Mat*> XAttnParams(XAttnModel* model) {
  std::vector<Mat*> p;
  for (auto& layer : model->layers) {
    p.insert(p.end(), {&layer.wq, &layer.wk, &layer.wv, &layer.wo, &layer.bq,
                       &layer.bv, &layer.bo});
  }
  p.push_back(&model->out_w);
  p.push_back(&model->out_b);
  p.push_back(&model->voice_pos);
  p.push_back(&model->face_pos);
  return p;
}

std::vector<Mat*> XAttnGradParams(XAttnGrads* grads) {
  std::vector<Mat*> p;
  for (auto& layer : grads->layers) {
    p.insert(p.end(), {&layer.wq, &layer.wk, &layer.wv, &layer.wo, &layer.bq,
                       &layer.bv, &layer.bo});
  }
  p.push_back(&grads->out_w);
  p.push_back(&grads->out_b);
  p.push_back(&grads->voice_pos);
  p.push_back(&grads->face_pos);
  return p;
}

std::string EncodeXAttnCheckpoint(const XAttnModel& model) {
  ByteWriter w;
  WriteCheckpointHeader(w, CheckpointKind::kCrossAttention);
  const XAttnConfig& cfg = model.config;
  w.U32(static_cast<uint32_t>(cfg.d_model));
  w.U32(static_cast<uint32_t>(cfg.n_heads));
  w.U8(cfg.residual ? 1 : 0);
  w.U8(cfg.attn_bias ? 1 : 0);
  w.U8(cfg.positional ? 1 : 0);
  w.U8(static_cast<uint8_t>(cfg.direction));
  w.F64(cfg.p_drop);
  w.U32(static_cast<uint32_t>(model.voice_dim));
  w.U32(static_cast<uint32_t>(model.face_dim));
  XAttnModel copy = model;
  for (Mat* m : XAttnParams(&copy)) EncodeMat(w, *m);
  return w.Release();
}

XAttnModel DecodeXAttnCheckpoint(std::string_view bytes,
                                 const std::string& source) {
  ByteReader r(bytes, source);
  ReadCheckpointHeader(r, CheckpointKind::kCrossAttention);
  XAttnModel m;
  m.config.d_model = r.U32("d_model");
  m.config.n_heads = r.U32("n_heads");
  m.config.residual = r.U8("residual") != 0;
  m.config.attn_bias = r.U8("attn_bias") != 0;
  m.config.positional = r.U8("positional") != 0;
  const uint8_t dir = r.U8("direction");
  if (dir > 1) throw Error(ErrorKind::kFormat, source + ": bad direction");
  m.config.direction = static_cast<AttnDirection>(dir);
  m.config.p_drop = r.F64("p_drop");
  ValidateXAttnConfig(m.config);
  m.voice_dim = r.U32("voice_dim");
  m.face_dim = r.U32("face_dim");
  const XAttnGrads expected = XAttnGrads::ZerosLike(m);
  XAttnGrads shapes = expected;
  const auto want = XAttnGradParams(&shapes);
  const auto params = XAttnParams(&m);
  for (size_t i = 0; i < params.size(); ++i) {
    *params[i] = DecodeMat(r, "xattn parameter");
    if (!params[i]->SameShape(*want[i])) {
      throw Error(ErrorKind::kSchema, source + ": parameter " +
                                          std::to_string(i) + " has shape " +
                                          params[i]->ShapeString());
    }
  }
  if (!r.AtEnd()) throw Error(ErrorKind::kFormat, source + ": trailing bytes");
  return m;
}

}  // namespace fva
