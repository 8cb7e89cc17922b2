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

#include "fva/traineval/trainer.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "fva/common/error.h"
#include "fva/traineval/scoring.h"

namespace fva {

void ValidateTrainConfig(const TrainConfig& cfg) {
  ValidateAdamConfig(cfg.adam);
  ValidateAamConfig(cfg.aam);
  std::ostringstream os;
  if (cfg.batch_size == 0) {
    os << "batch_size must be >= 1";
  } else if (cfg.patience == 0) {
    os << "patience must be >= 1";
  } else if (cfg.eval_every == 0) {
    os << "eval_every must be >= 1";
  } else if (cfg.max_epochs == 0) {
    os << "max_epochs must be >= 1";
  } else if (!(cfg.p_drop >= 0.0 && cfg.p_drop < 1.0)) {
    os << "p_drop must lie in [0, 1)";
  } else if (cfg.out_dim == 0) {
    os << "out_dim must be >= 1";
  } else {
    return;
  }
  throw Error(ErrorKind::kConfig, os.str());
}

std::vector<std::string> Dataset::Speakers() const {
  std::set<std::string> s;
  for (const auto& it : faces.items) s.insert(it.speaker_id);
  for (const auto& it : voices.items) s.insert(it.speaker_id);
  return {s.begin(), s.end()};
}

Dataset Dataset::Select(const std::vector<std::string>& speakers) const {
  return {SelectSpeakers(faces, speakers), SelectSpeakers(voices, speakers)};
}

Dataset DatasetFromStore(const EmbeddingStore& store) {
  return {AssembleConcatInputs(store, Side::kFace),
          AssembleConcatInputs(store, Side::kVoice)};
}

DevSet MakeDevSet(const Dataset& data, const std::vector<std::string>& speakers,
                  const TrainConfig& cfg, Rng& rng) {
  DevSet dev;
  dev.data = data.Select(speakers);
  dev.trials =
      cfg.clamp_dev_trials
          ? GenerateTrialsClamped(dev.data.faces, dev.data.voices, speakers,
                                  cfg.dev_trials, rng)
          : GenerateTrials(dev.data.faces, dev.data.voices, speakers,
                           cfg.dev_trials.n_target, cfg.dev_trials.n_nontarget,
                           rng);
  return dev;
}

EarlyStopper::EarlyStopper(size_t patience) : patience_(patience) {
  if (patience == 0) throw Error(ErrorKind::kConfig, "patience must be >= 1");
}

bool EarlyStopper::Observe(double eer) {
  const size_t idx = evaluations_++;
  if (idx == 0 || eer < best_) {
    best_ = eer;
    best_index_ = idx;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

JointModel InitJointModel(size_t voice_dim, size_t face_dim,
                          const IdentityTable& identities,
                          const TrainConfig& cfg, Rng& rng) {
  JointModel m;
  m.face = MappingHead::Init(face_dim, cfg.out_dim, cfg.p_drop, cfg.use_bias,
                             rng);
  m.voice = MappingHead::Init(voice_dim, cfg.out_dim, cfg.p_drop, cfg.use_bias,
                              rng);
  m.classifier = SharedClassifier::Init(identities.size(), cfg.out_dim, rng);
  m.identities = identities;
  return m;
}

JointModel AdaptToIdentities(const JointModel& model,
                             const IdentityTable& identities, bool reinit,
                             Rng& rng) {
  JointModel out = model;
  out.identities = identities;
  SharedClassifier fresh =
      SharedClassifier::Init(identities.size(), model.classifier.dim(), rng);
  if (!reinit) {
    for (size_t i = 0; i < identities.size(); ++i) {
      const auto& spk = identities.speakers()[i];
      const auto& known = model.identities.speakers();
      if (std::binary_search(known.begin(), known.end(), spk)) {
        auto src = model.classifier.weight.Row(model.identities.IndexOf(spk));
        std::copy(src.begin(), src.end(), fresh.weight.Row(i).begin());
      }
    }
  }
  out.classifier = std::move(fresh);
  return out;
}

namespace {

// Cycles through a shuffled index order, reshuffling at every wrap.
class BatchCursor {
 public:
  BatchCursor(size_t n, Rng* rng) : order_(n), rng_(rng) {
    for (size_t i = 0; i < n; ++i) order_[i] = i;
    rng_->Shuffle(&order_);
  }

  std::vector<size_t> Next(size_t batch) {
    std::vector<size_t> out;
    out.reserve(batch);
    while (out.size() < batch) {
      if (pos_ == order_.size()) {
        rng_->Shuffle(&order_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<size_t> order_;
  Rng* rng_;
  size_t pos_ = 0;
};

std::vector<size_t> TargetsOf(const AssembledSet& set,
                              const IdentityTable& table) {
  std::vector<size_t> t;
  t.reserve(set.items.size());
  for (const auto& it : set.items) t.push_back(table.IndexOf(it.speaker_id));
  return t;
}

void CheckDisjoint(const std::vector<std::string>& train_speakers,
                   const DevSet& dev) {
  std::set<std::string> train(train_speakers.begin(), train_speakers.end());
  for (const auto& s : dev.data.Speakers()) {
    if (train.count(s)) {
      throw Error(ErrorKind::kProtocol,
                  "dev speaker '" + s + "' also appears in training data");
    }
  }
}

}  // namespace

TrainResult TrainWithEarlyStopping(const Dataset& train, const DevSet& dev,
                                   JointModel init, const TrainConfig& cfg) {
  ValidateTrainConfig(cfg);
  if (dev.trials.empty()) {
    throw Error(ErrorKind::kConfig, "dev trial list is empty");
  }
  const size_t n_same = static_cast<size_t>(std::count_if(
      dev.trials.begin(), dev.trials.end(), [](const Trial& t) { return t.same; }));
  if (n_same == 0 || n_same == dev.trials.size()) {
    std::ostringstream os;
    os << "dev trials need same- and different-speaker pairs (got " << n_same
       << " / " << dev.trials.size() - n_same << "); too few dev speakers "
       << "have both face and voice items";
    throw Error(ErrorKind::kSampling, os.str());
  }
  if (train.faces.items.empty() || train.voices.items.empty()) {
    throw Error(ErrorKind::kSchema, "training data needs face and voice items");
  }
  const IdentityTable table(train.Speakers());
  if (!(init.identities == table)) {
    throw Error(ErrorKind::kConfig,
                "initial model identity table does not match training "
                "speakers");
  }
  CheckDisjoint(table.speakers(), dev);
  ValidateModelDims(init, train.voices.dim, train.faces.dim);

  JointModel model = std::move(init);
  model.face.p_drop = cfg.p_drop;
  model.voice.p_drop = cfg.p_drop;

  Rng batch_rng(DeriveSeed(cfg.seed, "batch"));
  Rng dropout_rng(DeriveSeed(cfg.seed, "dropout"));
  const std::vector<size_t> face_targets = TargetsOf(train.faces, table);
  const std::vector<size_t> voice_targets = TargetsOf(train.voices, table);
  BatchCursor face_cursor(train.faces.items.size(), &batch_rng);
  BatchCursor voice_cursor(train.voices.items.size(), &batch_rng);
  JointOptimizer opt = JointOptimizer::For(model, cfg.adam);

  const size_t largest =
      std::max(train.faces.items.size(), train.voices.items.size());
  const size_t steps_per_epoch = (largest + cfg.batch_size - 1) / cfg.batch_size;
  size_t total_steps = steps_per_epoch * cfg.max_epochs;
  if (cfg.max_steps > 0) total_steps = std::min(total_steps, cfg.max_steps);

  TrainResult res;
  EarlyStopper stopper(cfg.patience);
  double face_loss_acc = 0.0, voice_loss_acc = 0.0;
  size_t loss_count = 0;

  auto evaluate = [&](size_t step) {
    const EvalReport rep = EvaluateScores(
        dev.trials, ScoreTrials(model, dev.data.faces, dev.data.voices,
                                dev.trials));
    EvalPoint p;
    p.step = step;
    p.dev_eer = rep.eer;
    if (loss_count > 0) {
      p.mean_face_loss = face_loss_acc / loss_count;
      p.mean_voice_loss = voice_loss_acc / loss_count;
    }
    face_loss_acc = voice_loss_acc = 0.0;
    loss_count = 0;
    p.improved = stopper.Observe(rep.eer);
    if (p.improved) {
      res.best = model;
      res.best_step = step;
      res.best_eer = rep.eer;
    }
    res.log.push_back(p);
  };

  evaluate(0);
  for (size_t step = 1; step <= total_steps; ++step) {
    const std::vector<size_t> fi = face_cursor.Next(cfg.batch_size);
    const std::vector<size_t> vi = voice_cursor.Next(cfg.batch_size);
    LabeledBatch fb{StackInputs(train.faces, fi), {}, &table};
    LabeledBatch vb{StackInputs(train.voices, vi), {}, &table};
    for (size_t i : fi) fb.targets.push_back(face_targets[i]);
    for (size_t i : vi) vb.targets.push_back(voice_targets[i]);
    const JointStepResult r =
        JointStep(fb, vb, &model, cfg.aam, &opt, dropout_rng);
    face_loss_acc += r.face_loss;
    voice_loss_acc += r.voice_loss;
    ++loss_count;
    res.steps_run = step;
    if (step % cfg.eval_every == 0 || step == total_steps) {
      evaluate(step);
      if (stopper.ShouldStop()) {
        res.stopped_early = step < total_steps;
        break;
      }
    }
  }
  return res;
}

TrainResult TrainFromScratch(const Dataset& train, const DevSet& dev,
                             const TrainConfig& cfg) {
  Rng init_rng(DeriveSeed(cfg.seed, "init"));
  JointModel init = InitJointModel(train.voices.dim, train.faces.dim,
                                   IdentityTable(train.Speakers()), cfg,
                                   init_rng);
  return TrainWithEarlyStopping(train, dev, std::move(init), cfg);
}

Dataset ShuffleSpeakerLabels(const Dataset& data, Rng& rng) {
  Dataset out = data;
  for (AssembledSet* set : {&out.faces, &out.voices}) {
    std::vector<std::string> labels;
    for (const auto& it : set->items) labels.push_back(it.speaker_id);
    rng.Shuffle(&labels);
    for (size_t i = 0; i < labels.size(); ++i) {
      set->items[i].speaker_id = labels[i];
    }
  }
  return out;
}

}  // namespace fva
