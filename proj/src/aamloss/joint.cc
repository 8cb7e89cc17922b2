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

#include "fva/aamloss/joint.h"

#include <algorithm>
#include <sstream>

#include "fva/common/binary_io.h"
#include "fva/common/error.h"
#include "fva/fusion/checkpoint_format.h"

namespace fva {

namespace {

// AAM loss over the rows of y whose norm exceeds kEpsNorm. Heavy input
// dropout can zero a whole input row, and with a zero bias the embedding is
// then the zero vector, which has no direction; such rows contribute neither
// loss nor gradient and the mean runs over the remaining rows.
AamResult AamLossSkippingZeroRows(const Mat& y, const SharedClassifier& clf,
                                  const AamConfig& cfg,
                                  const std::vector<size_t>& targets) {
  std::vector<size_t> keep;
  for (size_t r = 0; r < y.rows(); ++r) {
    if (Norm2(y.Row(r)) > kEpsNorm) keep.push_back(r);
  }
  if (keep.size() == y.rows()) return AamLossAndGrad(y, clf, cfg, targets);
  AamResult out;
  out.grad_x = Mat(y.rows(), y.cols());
  out.grad_weight = Mat(clf.weight.rows(), clf.weight.cols());
  if (keep.empty()) return out;
  Mat sub(keep.size(), y.cols());
  std::vector<size_t> sub_targets;
  for (size_t i = 0; i < keep.size(); ++i) {
    auto src = y.Row(keep[i]);
    std::copy(src.begin(), src.end(), sub.Row(i).begin());
    sub_targets.push_back(targets.at(keep[i]));
  }
  AamResult r = AamLossAndGrad(sub, clf, cfg, sub_targets);
  for (size_t i = 0; i < keep.size(); ++i) {
    auto src = r.grad_x.Row(i);
    std::copy(src.begin(), src.end(), out.grad_x.Row(keep[i]).begin());
  }
  out.loss = r.loss;
  out.grad_weight = std::move(r.grad_weight);
  return out;
}

}  // namespace

IdentityTable::IdentityTable(std::vector<std::string> speakers) {
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()),
                 speakers.end());
  speakers_ = std::move(speakers);
  for (size_t i = 0; i < speakers_.size(); ++i) index_[speakers_[i]] = i;
}

size_t IdentityTable::IndexOf(const std::string& speaker) const {
  auto it = index_.find(speaker);
  if (it == index_.end()) {
    throw Error(ErrorKind::kLookup,
                "speaker '" + speaker + "' not in identity table");
  }
  return it->second;
}

HeadOptimizer HeadOptimizer::For(const MappingHead& head,
                                 const AdamConfig& cfg) {
  return {AdamState::For(head.weight, cfg), AdamState::For(head.bias, cfg)};
}

JointOptimizer JointOptimizer::For(const JointModel& model,
                                   const AdamConfig& cfg) {
  return {HeadOptimizer::For(model.face, cfg),
          HeadOptimizer::For(model.voice, cfg),
          AdamState::For(model.classifier.weight, cfg)};
}

JointGrads ComputeJointGrads(const LabeledBatch& face,
                             const LabeledBatch& voice,
                             const JointModel& model, const AamConfig& cfg,
                             Rng& rng) {
  if (face.table == nullptr || voice.table == nullptr ||
      !(*face.table == *voice.table)) {
    throw Error(ErrorKind::kConfig,
                "face and voice batches use different identity tables");
  }
  if (face.table->size() != model.classifier.n_classes() ||
      !(*face.table == model.identities)) {
    std::ostringstream os;
    os << "identity table (" << face.table->size()
       << " speakers) does not match the classifier ("
       << model.classifier.n_classes() << " rows)";
    throw Error(ErrorKind::kConfig, os.str());
  }
  JointGrads g;
  HeadForwardResult f = HeadForward(model.face, face.x, Mode::kTrain, rng);
  HeadForwardResult v = HeadForward(model.voice, voice.x, Mode::kTrain, rng);
  AamResult fl =
      AamLossSkippingZeroRows(f.y, model.classifier, cfg, face.targets);
  AamResult vl =
      AamLossSkippingZeroRows(v.y, model.classifier, cfg, voice.targets);
  g.face_loss = fl.loss;
  g.voice_loss = vl.loss;
  g.face = HeadBackward(model.face, f.cache, fl.grad_x);
  g.voice = HeadBackward(model.voice, v.cache, vl.grad_x);
  g.classifier = fl.grad_weight + vl.grad_weight;
  return g;
}

JointStepResult JointStep(const LabeledBatch& face, const LabeledBatch& voice,
                          JointModel* model, const AamConfig& cfg,
                          JointOptimizer* opt, Rng& rng) {
  JointGrads g = ComputeJointGrads(face, voice, *model, cfg, rng);
  AdamStep(&model->face.weight, g.face.weight, &opt->face.weight);
  AdamStep(&model->voice.weight, g.voice.weight, &opt->voice.weight);
  if (model->face.use_bias) {
    AdamStep(&model->face.bias, g.face.bias, &opt->face.bias);
  }
  if (model->voice.use_bias) {
    AdamStep(&model->voice.bias, g.voice.bias, &opt->voice.bias);
  }
  AdamStep(&model->classifier.weight, g.classifier, &opt->classifier);
  if (!model->face.weight.AllFinite() || !model->voice.weight.AllFinite() ||
      !model->classifier.weight.AllFinite()) {
    throw Error(ErrorKind::kNumeric, "non-finite parameters after joint step");
  }
  return {g.face_loss, g.voice_loss};
}

std::string EncodeJointCheckpoint(const JointModel& model) {
  ByteWriter w;
  WriteCheckpointHeader(w, CheckpointKind::kMappingHeads);
  EncodeHead(w, model.face);
  EncodeHead(w, model.voice);
  EncodeMat(w, model.classifier.weight);
  w.U32(static_cast<uint32_t>(model.identities.size()));
  for (const auto& s : model.identities.speakers()) {
    w.U16(static_cast<uint16_t>(s.size()));
    w.Bytes(s);
  }
  return w.Release();
}

JointModel DecodeJointCheckpoint(std::string_view bytes,
                                 const std::string& source) {
  ByteReader r(bytes, source);
  ReadCheckpointHeader(r, CheckpointKind::kMappingHeads);
  JointModel m;
  m.face = DecodeHead(r);
  m.voice = DecodeHead(r);
  m.classifier.weight = DecodeMat(r, "classifier");
  const uint32_t n = r.U32("identity count");
  std::vector<std::string> ids;
  for (uint32_t i = 0; i < n; ++i) {
    const uint16_t len = r.U16("identity length");
    ids.emplace_back(r.Bytes(len, "identity"));
  }
  m.identities = IdentityTable(std::move(ids));
  if (!r.AtEnd()) throw Error(ErrorKind::kFormat, source + ": trailing bytes");
  if (m.identities.size() != m.classifier.n_classes() ||
      m.face.out_dim() != m.classifier.dim() ||
      m.voice.out_dim() != m.classifier.dim()) {
    throw Error(ErrorKind::kSchema,
                source + ": heads, classifier and identity table disagree");
  }
  return m;
}

void ValidateModelDims(const JointModel& model, size_t voice_dim,
                       size_t face_dim) {
  if (model.voice.in_dim() != voice_dim || model.face.in_dim() != face_dim) {
    std::ostringstream os;
    os << "checkpoint expects voice/face dims " << model.voice.in_dim() << "/"
       << model.face.in_dim() << ", data has " << voice_dim << "/" << face_dim;
    throw Error(ErrorKind::kSchema, os.str());
  }
}

}  // namespace fva
