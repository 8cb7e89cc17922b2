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

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "fva/common/error.h"
#include "fva/fusion/checkpoint_format.h"
#include "fva/fusion/mapping_head.h"
#include "fva/fusion/xattn.h"
#include "test_support.h"

namespace fva {
namespace {

using testing::CentralDiff;
using testing::RandomMat;
using testing::RelErr;

MappingHead RandomHead(Rng& rng, size_t in, size_t out, double p) {
  MappingHead h = MappingHead::Init(in, out, p, true, rng);
  h.bias = RandomMat(rng, 1, out);
  return h;
}

TEST(HeadTest, IdentityWeightEvalIsIdentity) {
  Rng rng(1);
  MappingHead h = MappingHead::Init(5, 5, 0.9, true, rng);
  h.weight = Mat::Identity(5);
  h.bias = Mat(1, 5);
  const Mat x = RandomMat(rng, 3, 5);
  EXPECT_EQ(HeadForward(h, x, Mode::kEval, rng).y, x);
}

TEST(HeadTest, ZeroDropoutTrainEqualsEval) {
  Rng rng(2);
  const MappingHead h = RandomHead(rng, 7, 4, 0.0);
  const Mat x = RandomMat(rng, 6, 7);
  EXPECT_EQ(HeadForward(h, x, Mode::kTrain, rng).y,
            HeadForward(h, x, Mode::kEval, rng).y);
}

TEST(HeadTest, EvalIgnoresDropoutProbability) {
  Rng rng(3);
  MappingHead h = RandomHead(rng, 6, 3, 0.9);
  const Mat x = RandomMat(rng, 2, 6);
  const Mat y = HeadForward(h, x, Mode::kEval, rng).y;
  h.p_drop = 0.0;
  EXPECT_EQ(HeadForward(h, x, Mode::kEval, rng).y, y);
  EXPECT_EQ(HeadEmbed(h, x), y);
}

TEST(HeadTest, InputWidthMismatchIsShapeError) {
  Rng rng(4);
  const MappingHead h = RandomHead(rng, 6, 3, 0.5);
  try {
    HeadForward(h, Mat(2, 5), Mode::kEval, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(HeadTest, MeanSquareGradientsMatchFiniteDifferences) {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(100 + seed);
    const size_t in = 3 + seed * 4, out = 2 + seed, batch = 1 + seed * 2;
    const MappingHead h0 = RandomHead(rng, in, out, 0.5);
    const Mat x = RandomMat(rng, batch, in);
    Rng mask_rng(seed);
    const HeadForwardResult fwd = HeadForward(h0, x, Mode::kTrain, mask_rng);
    const Mat& mask = fwd.cache.mask;
    const double n = static_cast<double>(fwd.y.size());
    Mat gy = fwd.y;
    gy *= 2.0 / n;
    const HeadGrads g = HeadBackward(h0, fwd.cache, gy);

    // Independent forward with the cached mask.
    auto loss = [&](const Mat& w, const Mat& b, const Mat& in_x) {
      double s = 0;
      for (size_t r = 0; r < in_x.rows(); ++r) {
        for (size_t o = 0; o < w.rows(); ++o) {
          double y = b(0, o);
          for (size_t c = 0; c < w.cols(); ++c) y += w(o, c) * in_x(r, c) * mask(r, c);
          s += y * y;
        }
      }
      return s / n;
    };
    EXPECT_LT(RelErr(g.weight, CentralDiff([&](const Mat& w) { return loss(w, h0.bias, x); }, h0.weight)), 1e-5);
    EXPECT_LT(RelErr(g.bias, CentralDiff([&](const Mat& b) { return loss(h0.weight, b, x); }, h0.bias)), 1e-5);
    EXPECT_LT(RelErr(g.input, CentralDiff([&](const Mat& z) { return loss(h0.weight, h0.bias, z); }, x)), 1e-5);
  }
}

TEST(HeadTest, ZeroUpstreamGivesZeroGrads) {
  Rng rng(5);
  const MappingHead h = RandomHead(rng, 4, 3, 0.5);
  const HeadForwardResult f = HeadForward(h, RandomMat(rng, 2, 4), Mode::kTrain, rng);
  const HeadGrads g = HeadBackward(h, f.cache, Mat(2, 3));
  EXPECT_EQ(g.weight, Mat(3, 4));
  EXPECT_EQ(g.bias, Mat(1, 3));
  EXPECT_EQ(g.input, Mat(2, 4));
}

TEST(HeadTest, ScalarChainRule) {
  Rng rng(6);
  MappingHead h = MappingHead::Init(1, 1, 0.5, true, rng);
  h.weight = Mat{{0.7}};
  HeadCache cache;
  cache.input = Mat{{3.0}};
  cache.mask = Mat{{2.0}};
  cache.dropped = Mat{{6.0}};
  const HeadGrads g = HeadBackward(h, cache, Mat{{0.5}});
  EXPECT_DOUBLE_EQ(g.weight(0, 0), 2.0 * 3.0 * 0.5);
  EXPECT_DOUBLE_EQ(g.bias(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.input(0, 0), 2.0 * 0.7 * 0.5);
}

TEST(HeadTest, UseBiasFalseKeepsBiasZero) {
  Rng rng(7);
  const MappingHead h = MappingHead::Init(4, 3, 0.0, false, rng);
  const Mat x = RandomMat(rng, 2, 4);
  const Mat y = HeadEmbed(h, x);
  EXPECT_LT(RelErr(y, MatMul(x, h.weight.Transposed())), 1e-15);
}

TEST(ScorePairTest, SelfOrthogonalAntipodal) {
  const std::vector<double> v = {0.3, -1.2, 2.0};
  std::vector<double> neg = v;
  for (double& x : neg) x = -x;
  EXPECT_NEAR(ScorePair(v, v), 1.0, 1e-15);
  EXPECT_EQ(ScorePair(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}), 0.0);
  EXPECT_NEAR(ScorePair(v, neg), -1.0, 1e-15);
}

TEST(ScorePairTest, ZeroVectorIsDegenerate) {
  try {
    ScorePair(std::vector<double>{0, 0}, std::vector<double>{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(CheckpointTest, HeadRoundTrip) {
  Rng rng(8);
  const MappingHead h = RandomHead(rng, 5, 3, 0.7);
  ByteWriter w;
  EncodeHead(w, h);
  ByteReader r(w.buffer(), "mem");
  const MappingHead back = DecodeHead(r);
  EXPECT_EQ(back.weight, h.weight);
  EXPECT_EQ(back.bias, h.bias);
  EXPECT_EQ(back.p_drop, h.p_drop);
  EXPECT_EQ(back.use_bias, h.use_bias);
  EXPECT_TRUE(r.AtEnd());
}

XAttnConfig ToyConfig() {
  XAttnConfig c;
  c.d_model = 4;
  c.n_heads = 1;
  c.p_drop = 0.0;
  return c;
}

TEST(XAttnTest, TokenizePadsRightWithZeros) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  const Mat t = Tokenize(v, 2);
  EXPECT_EQ(t, (Mat{{1, 2}, {3, 4}, {5, 0}}));
}

TEST(XAttnTest, BackboneShapedTokenCounts) {
  Rng rng(1);
  XAttnConfig c;
  c.positional = false;
  const XAttnModel m = XAttnModel::Init(7680, 4864, c, rng);
  EXPECT_EQ(m.voice_tokens(), 60u);
  EXPECT_EQ(m.face_tokens(), 38u);
}

TEST(XAttnTest, ZeroInputGivesOutputBias) {
  Rng rng(2);
  XAttnConfig c = ToyConfig();
  c.positional = false;
  XAttnModel m = XAttnModel::Init(12, 10, c, rng);
  m.out_b(0, 0) = 0.37;
  const std::vector<double> v(12, 0.0), f(10, 0.0);
  EXPECT_EQ(XAttnForward(m, v, f, Mode::kEval, rng).logit, 0.37);
}

TEST(XAttnTest, AttentionRowsSumToOne) {
  Rng rng(3);
  AttnLayer layer;
  for (Mat* p : {&layer.wq, &layer.wk, &layer.wv, &layer.wo}) *p = RandomMat(rng, 8, 8);
  for (Mat* p : {&layer.bq, &layer.bv, &layer.bo}) *p = RandomMat(rng, 1, 8);
  const AttnForwardResult r =
      AttnLayerForward(layer, RandomMat(rng, 5, 8), RandomMat(rng, 7, 8), 2, true);
  ASSERT_EQ(r.cache.probs.size(), 2u);
  for (const Mat& p : r.cache.probs) {
    for (size_t i = 0; i < p.rows(); ++i) {
      double s = 0;
      for (double x : p.Row(i)) s += x;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(XAttnTest, KeyValuePermutationLeavesOutputUnchanged) {
  Rng rng(4);
  AttnLayer layer;
  for (Mat* p : {&layer.wq, &layer.wk, &layer.wv, &layer.wo}) *p = RandomMat(rng, 4, 4, 0.5);
  for (Mat* p : {&layer.bq, &layer.bv, &layer.bo}) *p = RandomMat(rng, 1, 4);
  const Mat xq = RandomMat(rng, 3, 4), xkv = RandomMat(rng, 6, 4);
  const std::vector<size_t> perm = {4, 2, 5, 0, 3, 1};
  Mat permuted(6, 4);
  for (size_t i = 0; i < 6; ++i)
    for (size_t j = 0; j < 4; ++j) permuted(i, j) = xkv(perm[i], j);
  const Mat a = AttnLayerForward(layer, xq, xkv, 1, false).out;
  const Mat b = AttnLayerForward(layer, xq, permuted, 1, false).out;
  EXPECT_LT(RelErr(a, b), 1e-14);
}

TEST(XAttnTest, FullStackGradientsMatchFiniteDifferences) {
  for (bool residual : {true, false}) {
    for (AttnDirection dir : {AttnDirection::kFaceQueriesVoice,
                              AttnDirection::kVoiceQueriesFace}) {
      Rng rng(5);
      XAttnConfig c = ToyConfig();
      c.residual = residual;
      c.direction = dir;
      c.n_heads = 2;
      XAttnModel m = XAttnModel::Init(12, 10, c, rng);
      for (auto& l : m.layers)
        for (Mat* b : {&l.bq, &l.bv, &l.bo}) *b = RandomMat(rng, 1, 4, 0.3);
      m.out_b(0, 0) = 0.1;
      const Mat v = RandomMat(rng, 1, 12), f = RandomMat(rng, 1, 10);
      const int label = 1;
      auto loss = [&](const XAttnModel& mm) {
        Rng r(0);
        return XAttnLoss(XAttnForward(mm, v.data(), f.data(), Mode::kEval, r).logit, label).loss;
      };
      Rng r(0);
      const XAttnForwardResult fwd = XAttnForward(m, v.data(), f.data(), Mode::kEval, r);
      XAttnGrads g = XAttnGrads::ZerosLike(m);
      XAttnBackward(m, fwd.cache, XAttnLoss(fwd.logit, label).grad_logit, &g);
      const std::vector<Mat*> params = XAttnParams(&m);
      const std::vector<Mat*> grads = XAttnGradParams(&g);
      ASSERT_EQ(params.size(), grads.size());
      for (size_t i = 0; i < params.size(); ++i) {
        const Mat numeric = CentralDiff(
            [&](const Mat& p) {
              XAttnModel mm = m;
              *XAttnParams(&mm)[i] = p;
              return loss(mm);
            },
            *params[i]);
        EXPECT_LT(RelErr(*grads[i], numeric), 1e-4)
            << "param " << i << " residual " << residual;
      }
    }
  }
}

TEST(XAttnTest, WrongInputWidthIsShapeError) {
  Rng rng(6);
  const XAttnModel m = XAttnModel::Init(12, 10, ToyConfig(), rng);
  const std::vector<double> v(11), f(10);
  EXPECT_THROW(XAttnForward(m, v, f, Mode::kEval, rng), Error);
}

TEST(XAttnTest, CheckpointRoundTrip) {
  Rng rng(7);
  XAttnConfig c = ToyConfig();
  c.n_heads = 2;
  c.direction = AttnDirection::kVoiceQueriesFace;
  XAttnModel m = XAttnModel::Init(12, 10, c, rng);
  const std::string bytes = EncodeXAttnCheckpoint(m);
  EXPECT_EQ(PeekCheckpointKind(bytes, "mem"), CheckpointKind::kCrossAttention);
  XAttnModel back = DecodeXAttnCheckpoint(bytes, "mem");
  EXPECT_EQ(EncodeXAttnCheckpoint(back), bytes);
  EXPECT_EQ(back.config.direction, AttnDirection::kVoiceQueriesFace);
  const std::vector<Mat*> a = XAttnParams(&m), b = XAttnParams(&back);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
}

TEST(XAttnTest, BadCheckpointMagicIsFormatError) {
  Rng rng(8);
  std::string bytes = EncodeXAttnCheckpoint(XAttnModel::Init(12, 10, ToyConfig(), rng));
  bytes[1] = 'Z';
  try {
    DecodeXAttnCheckpoint(bytes, "mem");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(BceTest, ClosedForms) {
  EXPECT_NEAR(XAttnLoss(0.0, 1).loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(XAttnLoss(0.0, 0).loss, std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(XAttnLoss(0.0, 1).grad_logit, -0.5);
  EXPECT_DOUBLE_EQ(XAttnLoss(0.0, 0).grad_logit, 0.5);
}

TEST(BceTest, LargeLogitsStayFinite) {
  const BceResult a = XAttnLoss(40.0, 1);
  EXPECT_GE(a.loss, 0.0);
  EXPECT_LT(a.loss, 1e-15);
  const BceResult b = XAttnLoss(-800.0, 1);
  EXPECT_NEAR(b.loss, 800.0, 1e-9);
  EXPECT_DOUBLE_EQ(b.grad_logit, -1.0);
  EXPECT_TRUE(std::isfinite(XAttnLoss(800.0, 0).loss));
}

TEST(BceTest, GradientMatchesFiniteDifference) {
  for (double z : {-3.0, -0.2, 0.0, 1.5, 7.0}) {
    for (int y : {0, 1}) {
      const double h = 1e-6;
      const double fd = (XAttnLoss(z + h, y).loss - XAttnLoss(z - h, y).loss) / (2 * h);
      EXPECT_NEAR(XAttnLoss(z, y).grad_logit, fd, 1e-8);
    }
  }
}

TEST(BceTest, NonBinaryLabelRejected) {
  EXPECT_THROW(XAttnLoss(0.0, 2), Error);
}

}  // namespace
}  // namespace fva
