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

#include "fva/traineval/xattn_trainer.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "fva/common/error.h"
#include "fva/traineval/scoring.h"

namespace fva {

void ValidateXAttnTrainConfig(const XAttnTrainConfig& cfg) {
  ValidateXAttnConfig(cfg.model);
  ValidateAdamConfig(cfg.adam);
  std::ostringstream os;
  if (cfg.batch_size < 2) {
    os << "batch_size must be >= 2";
  } else if (cfg.max_steps == 0) {
    os << "max_steps must be >= 1";
  } else if (cfg.eval_every == 0) {
    os << "eval_every must be >= 1";
  } else if (cfg.patience == 0) {
    os << "patience must be >= 1";
  } else {
    return;
  }
  throw Error(ErrorKind::kConfig, os.str());
}

namespace {

// Per-speaker item indices for pair sampling.
struct PairSampler {
  std::vector<std::string> speakers;
  std::vector<std::vector<size_t>> faces, voices;

  PairSampler(const Dataset& data) {
    std::map<std::string, std::vector<size_t>> f, v;
    for (size_t i = 0; i < data.faces.items.size(); ++i) {
      f[data.faces.items[i].speaker_id].push_back(i);
    }
    for (size_t i = 0; i < data.voices.items.size(); ++i) {
      v[data.voices.items[i].speaker_id].push_back(i);
    }
    for (auto& [spk, idx] : f) {
      auto it = v.find(spk);
      if (it == v.end()) continue;
      speakers.push_back(spk);
      faces.push_back(std::move(idx));
      voices.push_back(it->second);
    }
    if (speakers.size() < 2) {
      throw Error(ErrorKind::kSampling,
                  "pair training needs >= 2 speakers with face and voice "
                  "items, have " + std::to_string(speakers.size()));
    }
  }

  // (face item, voice item)
  std::pair<size_t, size_t> Draw(bool same, Rng& rng) const {
    const size_t a = rng.UniformInt(speakers.size());
    size_t b = a;
    if (!same) {
      b = rng.UniformInt(speakers.size() - 1);
      if (b >= a) ++b;
    }
    return {faces[a][rng.UniformInt(faces[a].size())],
            voices[b][rng.UniformInt(voices[b].size())]};
  }
};

}  // namespace

XAttnTrainResult TrainXAttn(const Dataset& train, const DevSet& dev,
                            const XAttnTrainConfig& cfg) {
  ValidateXAttnTrainConfig(cfg);
  if (dev.trials.empty()) {
    throw Error(ErrorKind::kConfig, "dev trial list is empty");
  }
  {
    const std::vector<std::string> spk = train.Speakers();
    const std::set<std::string> tr(spk.begin(), spk.end());
    for (const auto& s : dev.data.Speakers()) {
      if (tr.count(s)) {
        throw Error(ErrorKind::kProtocol,
                    "dev speaker '" + s + "' also appears in training data");
      }
    }
  }
  const PairSampler sampler(train);

  Rng init_rng(DeriveSeed(cfg.seed, "init"));
  Rng pair_rng(DeriveSeed(cfg.seed, "pairs"));
  Rng dropout_rng(DeriveSeed(cfg.seed, "dropout"));
  XAttnModel model = XAttnModel::Init(train.voices.dim, train.faces.dim,
                                      cfg.model, init_rng);
  std::vector<AdamState> opt;
  for (Mat* p : XAttnParams(&model)) opt.push_back(AdamState::For(*p, cfg.adam));

  XAttnTrainResult res;
  EarlyStopper stopper(cfg.patience);
  double loss_acc = 0.0;
  size_t loss_count = 0;

  auto evaluate = [&](size_t step) {
    const EvalReport rep = EvaluateScores(
        dev.trials, ScoreTrialsXAttn(model, dev.data.faces, dev.data.voices,
                                     dev.trials));
    EvalPoint p;
    p.step = step;
    p.dev_eer = rep.eer;
    if (loss_count > 0) p.mean_face_loss = loss_acc / loss_count;
    loss_acc = 0.0;
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
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
  for (size_t step = 1; step <= cfg.max_steps; ++step) {
    XAttnGrads grads = XAttnGrads::ZerosLike(model);
    double batch_loss = 0.0;
    for (size_t b = 0; b < cfg.batch_size; ++b) {
      const bool same = (b % 2) == 0;
      const auto [fi, vi] = sampler.Draw(same, pair_rng);
      const XAttnForwardResult fwd =
          XAttnForward(model, train.voices.items[vi].vec,
                       train.faces.items[fi].vec, Mode::kTrain, dropout_rng);
      const BceResult bce = XAttnLoss(fwd.logit, same ? 1 : 0);
      batch_loss += bce.loss;
      XAttnBackward(model, fwd.cache, bce.grad_logit * inv_batch, &grads);
    }
    if (!std::isfinite(batch_loss)) {
      throw Error(ErrorKind::kNumeric,
                  "non-finite loss at step " + std::to_string(step));
    }
    std::vector<Mat*> params = XAttnParams(&model);
    std::vector<Mat*> gparams = XAttnGradParams(&grads);
    for (size_t i = 0; i < params.size(); ++i) {
      AdamStep(params[i], *gparams[i], &opt[i]);
    }
    loss_acc += batch_loss * inv_batch;
    ++loss_count;
    res.steps_run = step;
    if (step % cfg.eval_every == 0 || step == cfg.max_steps) {
      evaluate(step);
      if (stopper.ShouldStop()) {
        res.stopped_early = step < cfg.max_steps;
        break;
      }
    }
  }
  return res;
}

ArchitectureComparison CompareArchitectures(const JointModel& joint,
                                            const XAttnModel& xattn,
                                            const DevSet& trials) {
  ArchitectureComparison c;
  c.n_trials = trials.trials.size();
  c.separate = EvaluateScores(
      trials.trials, ScoreTrials(joint, trials.data.faces, trials.data.voices,
                                 trials.trials));
  c.cross_attention = EvaluateScores(
      trials.trials, ScoreTrialsXAttn(xattn, trials.data.faces,
                                      trials.data.voices, trials.trials));
  return c;
}

}  // namespace fva
