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

#include "fva/fusion/mapping_head.h"

#include <cmath>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

MappingHead MappingHead::Init(size_t in_dim, size_t out_dim, double p_drop,
                              bool use_bias, Rng& rng) {
  if (in_dim == 0 || out_dim == 0) {
    throw Error(ErrorKind::kConfig, "mapping head dims must be positive");
  }
  if (!(p_drop >= 0.0 && p_drop < 1.0)) {
    throw Error(ErrorKind::kConfig, "mapping head p_drop outside [0, 1)");
  }
  MappingHead h;
  h.weight = Mat(out_dim, in_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& v : h.weight.data()) v = scale * rng.Normal();
  h.bias = Mat(1, out_dim);
  h.p_drop = p_drop;
  h.use_bias = use_bias;
  return h;
}

namespace {

Mat Affine(const MappingHead& head, const Mat& x) {
  Mat y = MatMulTransB(x, head.weight);
  if (head.use_bias) {
    for (size_t r = 0; r < y.rows(); ++r) {
      auto row = y.Row(r);
      for (size_t c = 0; c < y.cols(); ++c) row[c] += head.bias(0, c);
    }
  }
  return y;
}

void CheckInput(const MappingHead& head, const Mat& x) {
  if (x.cols() != head.in_dim()) {
    throw Error(ErrorKind::kShape, "mapping head expects in_dim " +
                                       std::to_string(head.in_dim()) +
                                       ", got input " + x.ShapeString());
  }
}

}  // namespace

HeadForwardResult HeadForward(const MappingHead& head, const Mat& x, Mode mode,
                              Rng& rng) {
  CheckInput(head, x);
  HeadForwardResult out;
  out.cache.input = x;
  if (mode == Mode::kTrain) {
    out.cache.mask = DropoutMask(rng, x.rows(), x.cols(), head.p_drop);
    out.cache.dropped = ApplyMask(x, out.cache.mask);
  } else {
    out.cache.dropped = x;
  }
  out.y = Affine(head, out.cache.dropped);
  return out;
}

Mat HeadEmbed(const MappingHead& head, const Mat& x) {
  CheckInput(head, x);
  return Affine(head, x);
}

HeadGrads HeadBackward(const MappingHead& head, const HeadCache& cache,
                       const Mat& grad_y) {
  if (grad_y.rows() != cache.dropped.rows() ||
      grad_y.cols() != head.out_dim()) {
    throw Error(ErrorKind::kShape, "head backward: grad_y " +
                                       grad_y.ShapeString() + " vs batch " +
                                       std::to_string(cache.dropped.rows()) +
                                       " x out_dim " +
                                       std::to_string(head.out_dim()));
  }
  HeadGrads g;
  g.weight = MatMulTransA(grad_y, cache.dropped);
  g.bias = Mat(1, head.out_dim());
  if (head.use_bias) {
    for (size_t r = 0; r < grad_y.rows(); ++r)
      for (size_t c = 0; c < grad_y.cols(); ++c) g.bias(0, c) += grad_y(r, c);
  }
  g.input = MatMul(grad_y, head.weight);
  if (!cache.mask.empty()) g.input = ApplyMask(g.input, cache.mask);
  return g;
}

double ScorePair(std::span<const double> face_y,
                 std::span<const double> voice_y) {
  if (face_y.size() != voice_y.size()) {
    throw Error(ErrorKind::kShape, "score_pair: lengths " +
                                       std::to_string(face_y.size()) + " and " +
                                       std::to_string(voice_y.size()));
  }
  const double nf = Norm2(face_y);
  const double nv = Norm2(voice_y);
  if (!(nf > kEpsNorm) || !(nv > kEpsNorm)) {
    throw Error(ErrorKind::kDegenerate,
                std::string("score_pair: zero ") +
                    (!(nf > kEpsNorm) ? "face" : "voice") + " embedding");
  }
  const double c = Dot(face_y, voice_y) / (nf * nv);
  return std::clamp(c, -1.0, 1.0);
}

void EncodeMat(ByteWriter& w, const Mat& m) {
  w.U32(static_cast<uint32_t>(m.rows()));
  w.U32(static_cast<uint32_t>(m.cols()));
  for (double v : m.data()) w.F64(v);
}

Mat DecodeMat(ByteReader& r, const char* what) {
  const uint32_t rows = r.U32(what);
  const uint32_t cols = r.U32(what);
  const uint64_t n = static_cast<uint64_t>(rows) * cols;
  Mat m(rows, cols);
  for (uint64_t i = 0; i < n; ++i) m.data()[i] = r.F64(what);
  if (!m.AllFinite()) {
    throw Error(ErrorKind::kFormat, std::string(what) + " has non-finite values");
  }
  return m;
}

void EncodeHead(ByteWriter& w, const MappingHead& head) {
  w.U8(head.use_bias ? 1 : 0);
  w.F64(head.p_drop);
  EncodeMat(w, head.weight);
  EncodeMat(w, head.bias);
}

MappingHead DecodeHead(ByteReader& r) {
  MappingHead h;
  h.use_bias = r.U8("head bias flag") != 0;
  h.p_drop = r.F64("head p_drop");
  h.weight = DecodeMat(r, "head weight");
  h.bias = DecodeMat(r, "head bias");
  if (h.bias.rows() != 1 || h.bias.cols() != h.weight.rows()) {
    throw Error(ErrorKind::kSchema, "head bias shape " + h.bias.ShapeString() +
                                        " disagrees with weight " +
                                        h.weight.ShapeString());
  }
  return h;
}

}  // namespace fva
