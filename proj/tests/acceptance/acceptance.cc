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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance            run everything
//   acceptance A4 A7      run the named criteria only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fva/aamloss/aam.h"
#include "fva/cli/config.h"
#include "fva/common/error.h"
#include "fva/diffcore/layers.h"
#include "fva/embedstore/embedding_store.h"
#include "fva/fusion/mapping_head.h"
#include "fva/fusion/xattn.h"
#include "fva/synthgen/synth.h"
#include "fva/traineval/eer.h"
#include "fva/traineval/experiments.h"
#include "fva/traineval/scenarios.h"
#include "fva/traineval/scoring.h"
#include "fva/traineval/trainer.h"
#include "fva/traineval/xattn_trainer.h"
#include "test_support.h"

namespace fva {
namespace {

namespace fs = std::filesystem;
using cli::Json;
using testing::BruteForceEer;
using testing::CentralDiff;
using testing::RandomMat;
using testing::RelErr;
using testing::RunFva;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// ---------------------------------------------------------------- A1

Outcome A1GradientChecks() {
  double worst_head = 0, worst_l2 = 0, worst_aam = 0, worst_xattn = 0;
  struct Shape {
    size_t rows, in, out;
  };
  const std::vector<Shape> shapes = {{1, 3, 2}, {4, 7, 5}, {6, 16, 9}};
  for (uint64_t seed = 0; seed < 10; ++seed) {
    for (const Shape& sh : shapes) {
      Rng rng(1000 + seed);
      // Mapping head, train mode: the mask is reproduced by reseeding.
      MappingHead h = MappingHead::Init(sh.in, sh.out, 0.3, true, rng);
      h.bias = RandomMat(rng, 1, sh.out, 0.5);
      const Mat x = RandomMat(rng, sh.rows, sh.in);
      const Mat gy = RandomMat(rng, sh.rows, sh.out);
      auto head_loss = [&](const Mat& w, const Mat& b, const Mat& in) {
        MappingHead hh = h;
        hh.weight = w;
        hh.bias = b;
        Rng r(seed);
        const Mat y = HeadForward(hh, in, Mode::kTrain, r).y;
        double s = 0;
        for (size_t i = 0; i < y.size(); ++i) s += y.data()[i] * gy.data()[i];
        return s;
      };
      Rng r0(seed);
      const HeadForwardResult fwd = HeadForward(h, x, Mode::kTrain, r0);
      const HeadGrads g = HeadBackward(h, fwd.cache, gy);
      worst_head = std::max(
          {worst_head,
           RelErr(g.weight, CentralDiff([&](const Mat& w) { return head_loss(w, h.bias, x); }, h.weight)),
           RelErr(g.bias, CentralDiff([&](const Mat& b) { return head_loss(h.weight, b, x); }, h.bias)),
           RelErr(g.input, CentralDiff([&](const Mat& z) { return head_loss(h.weight, h.bias, z); }, x))});

      // Row normalization.
      const Mat gl = RandomMat(rng, sh.rows, sh.in);
      auto l2_loss = [&](const Mat& z) {
        const Mat y = L2NormalizeRows(z);
        double s = 0;
        for (size_t i = 0; i < y.size(); ++i) s += y.data()[i] * gl.data()[i];
        return s;
      };
      worst_l2 = std::max(worst_l2, RelErr(L2NormalizeRowsBackward(x, gl),
                                           CentralDiff(l2_loss, x)));

      // AAM loss, default s and m.
      const size_t n_cls = 2 + seed % 4;
      const Mat e = RandomMat(rng, sh.rows, sh.out);
      const SharedClassifier clf{RandomMat(rng, n_cls, sh.out)};
      std::vector<size_t> t(sh.rows);
      for (auto& v : t) v = rng.UniformInt(n_cls);
      const AamConfig cfg;
      const AamResult ar = AamLossAndGrad(e, clf, cfg, t);
      worst_aam = std::max(
          {worst_aam,
           RelErr(ar.grad_x, CentralDiff([&](const Mat& z) { return AamLossAndGrad(z, clf, cfg, t).loss; }, e)),
           RelErr(ar.grad_weight,
                  CentralDiff([&](const Mat& w) { return AamLossAndGrad(e, SharedClassifier{w}, cfg, t).loss; },
                              clf.weight))});
    }

    // Full cross-attention stack + BCE, train mode, three shapes.
    struct XShape {
      size_t d_model, heads, voice, face;
    };
    for (const XShape& xs : {XShape{4, 1, 8, 6}, XShape{4, 2, 12, 10},
                             XShape{6, 3, 14, 9}}) {
      Rng rng(2000 + seed);
      XAttnConfig c;
      c.d_model = xs.d_model;
      c.n_heads = xs.heads;
      c.p_drop = 0.2;
      c.residual = seed % 2 == 0;
      c.direction = seed % 3 == 0 ? AttnDirection::kVoiceQueriesFace
                                  : AttnDirection::kFaceQueriesVoice;
      XAttnModel m = XAttnModel::Init(xs.voice, xs.face, c, rng);
      for (auto& l : m.layers) {
        for (Mat* b : {&l.bq, &l.bv, &l.bo}) *b = RandomMat(rng, 1, xs.d_model, 0.3);
      }
      const Mat v = RandomMat(rng, 1, xs.voice), f = RandomMat(rng, 1, xs.face);
      const int label = static_cast<int>(seed % 2);
      auto loss = [&](const XAttnModel& mm) {
        Rng r(seed);
        return XAttnLoss(XAttnForward(mm, v.data(), f.data(), Mode::kTrain, r).logit, label).loss;
      };
      Rng r(seed);
      const XAttnForwardResult fwd = XAttnForward(m, v.data(), f.data(), Mode::kTrain, r);
      XAttnGrads g = XAttnGrads::ZerosLike(m);
      XAttnBackward(m, fwd.cache, XAttnLoss(fwd.logit, label).grad_logit, &g);
      const std::vector<Mat*> params = XAttnParams(&m);
      const std::vector<Mat*> grads = XAttnGradParams(&g);
      // Compare over the concatenation of every parameter gradient.
      std::vector<double> an, nu;
      for (size_t i = 0; i < params.size(); ++i) {
        const Mat numeric = CentralDiff(
            [&](const Mat& p) {
              XAttnModel mm = m;
              *XAttnParams(&mm)[i] = p;
              return loss(mm);
            },
            *params[i]);
        an.insert(an.end(), grads[i]->data().begin(), grads[i]->data().end());
        nu.insert(nu.end(), numeric.data().begin(), numeric.data().end());
      }
      worst_xattn = std::max(
          worst_xattn, RelErr(Mat::FromData(1, an.size(), an),
                              Mat::FromData(1, nu.size(), nu)));
    }
  }
  Outcome o;
  o.pass = worst_head <= 1e-5 && worst_l2 <= 1e-5 && worst_aam <= 1e-5 &&
           worst_xattn <= 1e-4;
  std::ostringstream os;
  os << "max rel err head " << worst_head << ", l2norm " << worst_l2
     << ", aam " << worst_aam << ", xattn " << worst_xattn;
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------- A2

// Softmax cross-entropy over s * cos(x_i, w_j), written out directly.
double ReferenceCe(const Mat& x, const Mat& w, double s,
                   const std::vector<size_t>& t) {
  double total = 0;
  for (size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> z(w.rows());
    double nx = 0;
    for (size_t k = 0; k < x.cols(); ++k) nx += x(i, k) * x(i, k);
    for (size_t j = 0; j < w.rows(); ++j) {
      double dot = 0, nw = 0;
      for (size_t k = 0; k < x.cols(); ++k) {
        dot += x(i, k) * w(j, k);
        nw += w(j, k) * w(j, k);
      }
      z[j] = s * dot / std::sqrt(nx * nw);
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double lse = 0;
    for (double v : z) lse += std::exp(v - mx);
    total += mx + std::log(lse) - z[t[i]];
  }
  return total / static_cast<double>(x.rows());
}

Outcome A2ReferenceCe() {
  Rng rng(7);
  double worst = 0;
  for (int it = 0; it < 100; ++it) {
    const size_t b = 1 + rng.UniformInt(8), c = 1 + rng.UniformInt(10),
                 d = 1 + rng.UniformInt(64);
    const Mat x = RandomMat(rng, b, d);
    const Mat w = RandomMat(rng, c, d);
    std::vector<size_t> t(b);
    for (auto& v : t) v = rng.UniformInt(c);
    const double got =
        AamLossAndGrad(x, SharedClassifier{w}, {.scale = 1, .margin = 0}, t).loss;
    worst = std::max(worst, std::abs(got - ReferenceCe(x, w, 1.0, t)));
  }
  return {worst <= 1e-12, "max abs diff " + Fmt("%.3g", worst) + " over 100 instances"};
}

// ---------------------------------------------------------------- A3

Outcome A3EerOracle() {
  Rng rng(11);
  double worst = 0;
  for (int it = 0; it < 1000; ++it) {
    const size_t n = 2 + rng.UniformInt(199);
    const uint64_t grid = 1 + rng.UniformInt(it % 2 ? 10 : 1000);
    std::vector<ScoredTrial> s(n);
    for (auto& t : s) {
      t.target = rng.Uniform() < 0.5;
      t.score = static_cast<double>(rng.UniformInt(grid)) / grid;
    }
    s[0].target = true;
    s[1].target = false;
    rng.Shuffle(&s);
    std::vector<std::pair<double, bool>> p;
    for (const auto& t : s) p.emplace_back(t.score, t.target);
    worst = std::max(worst, std::abs(ComputeEer(s).eer - BruteForceEer(p)));
  }
  const std::vector<ScoredTrial> perfect = {{0.9, true}, {0.8, true}, {0.2, false}};
  const std::vector<ScoredTrial> fixed = {
      {0.9, true}, {0.3, true}, {0.7, false}, {0.1, false}};
  const double e0 = ComputeEer(perfect).eer, e1 = ComputeEer(fixed).eer;
  Outcome o;
  o.pass = worst <= 1e-9 && e0 == 0.0 && std::abs(e1 - 0.5) <= 1e-12;
  std::ostringstream os;
  os << "max diff vs brute force " << worst << " over 1000 sets; perfect "
     << e0 << ", fixed case " << e1;
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------- A4 / A5

SynthConfig A4Synth() {
  SynthConfig c;
  c.n_speakers = 30;
  c.latent_dim = 16;
  c.dims = kSmallModeDims;
  c.noise_sigma = 0.01;
  c.records_per_speaker = 10;
  c.seed = 4;
  return c;
}

TrainConfig A4Train() {
  TrainConfig c;
  c.p_drop = 0.5;
  c.max_steps = 500;
  c.seed = 4;
  return c;
}

Outcome A4Learnability() {
  const Dataset data = DatasetFromStore(Generate(A4Synth()).store);
  const PretrainResult r = Pretrain(data, A4Train(), 0.2);
  std::ostringstream os;
  os << "held-out EER " << r.report.eer << " (" << r.dev.trials.size()
     << " trials, " << r.split.held_out.size() << " held-out speakers, best step "
     << r.train.best_step << ", " << r.train.steps_run << " steps)";
  return {r.report.eer <= 0.05 && r.train.steps_run <= 500, os.str()};
}

Outcome A5ShuffledLabels() {
  const Dataset data = DatasetFromStore(Generate(A4Synth()).store);
  Rng rng(DeriveSeed(4, "shuffle"));
  const Dataset shuffled = ShuffleSpeakerLabels(data, rng);
  const PretrainResult r = Pretrain(shuffled, A4Train(), 0.2);
  // Also score true-identity trials over the whole corpus with the model
  // trained on shuffled labels; no identity link should survive.
  Rng trng(DeriveSeed(4, "true-trials"));
  const auto trials = GenerateTrialsClamped(data.faces, data.voices,
                                            data.Speakers(), {1000, 1000}, trng);
  const double true_eer =
      EvaluateScores(trials, ScoreTrials(r.train.best, data.faces, data.voices, trials)).eer;
  std::ostringstream os;
  os << "dev EER " << r.report.eer << "; true-label EER " << true_eer;
  const bool in = r.report.eer >= 0.40 && r.report.eer <= 0.60 &&
                  true_eer >= 0.40 && true_eer <= 0.60;
  return {in, os.str()};
}

// ---------------------------------------------------------------- A6

void WriteJson(const std::string& path, const Json& j) {
  std::ofstream(path, std::ios::binary) << j.dump(2);
}

Outcome A6ProtocolAudit() {
  SynthConfig a;
  a.n_speakers = 16;
  a.records_per_speaker = 4;
  a.languages = {{"en", 1}, {"de", 1}, {"fr", 1}};
  a.speaker_prefix = "pre";
  a.seed = 61;
  SynthConfig b = a;
  b.n_speakers = 14;
  b.seed = 62;
  b.speaker_prefix = "ft";
  const std::map<std::string, EmbeddingStore> corpora = {
      {"pretrain", Generate(a).store}, {"finetune", Generate(b).store}};

  std::ostringstream os;
  bool ok = true;
  for (Scenario s : {Scenario::kEnglishUnheard, Scenario::kGermanUnheard}) {
    const ScenarioPlan plan = DefaultPlan(s);
    const auto consumed =
        ConsumedManifests(plan, corpora, {"ft000", "ft001"}, true);
    size_t leaked = 0;
    for (const auto& c : consumed) {
      leaked += EntriesWithLanguage(c.manifest, plan.recipe.test_language).size();
    }
    bool audit_ok = true;
    try {
      AuditProtocol(plan, consumed);
    } catch (const Error&) {
      audit_ok = false;
    }
    ok = ok && leaked == 0 && audit_ok && consumed.size() == 2;
    os << ScenarioName(s) << ": " << consumed.size() << " stages, " << leaked
       << " excluded-language records; ";
  }

  // Pre-filtered corpora on disk, one English record slipped back into the
  // pre-training corpus, consumed as given.
  TempDir dir("accept_a6");
  const EmbeddingStore& pre = corpora.at("pretrain");
  Manifest clean = FilterExcludeLanguage(pre.GetManifest(), "en");
  Manifest injected = clean;
  for (const auto& e : pre.GetManifest().entries) {
    if (e.language == "en") {
      injected.entries.push_back(e);
      break;
    }
  }
  WriteStore(pre.Restrict(injected), dir / "pretrain");
  WriteStore(corpora.at("finetune").Restrict(
                 FilterExcludeLanguage(corpora.at("finetune").GetManifest(), "en")),
             dir / "finetune");
  WriteStore(corpora.at("finetune"), dir / "eval");
  WriteJson(dir / "sc.json",
            Json{{"corpora", {{"pretrain", "pretrain"}, {"finetune", "finetune"}, {"eval", "eval"}}},
                 {"plans", {"english_unheard"}},
                 {"eval_corpus", "eval"},
                 {"n_eval_speakers", 4},
                 {"auto_filter", false}});
  const int code = RunFva("scenarios --config " + (dir / "sc.json") + " --out " +
                          (dir / "out"));
  os << "injected record -> exit " << code;
  return {ok && code == 3 && injected.entries.size() == clean.entries.size() + 1,
          os.str()};
}

// ---------------------------------------------------------------- A7

Outcome A7DomainGap() {
  int improved = 0;
  std::ostringstream os;
  os << "frozen -> fine-tuned:";
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig a;
    a.n_speakers = 30;
    a.noise_sigma = 0.05;
    a.records_per_speaker = 10;
    a.seed = 700 + seed;
    a.speaker_prefix = "a";
    // Same latents and noise draws; every projection perturbed.
    SynthConfig b = a;
    b.speaker_prefix = "b";
    b.projection_shift = 0.7;
    b.shift_seed = 900 + seed;
    const Dataset da = DatasetFromStore(Generate(a).store);
    const Dataset db = DatasetFromStore(Generate(b).store);
    TrainConfig pre;
    pre.p_drop = 0.5;
    pre.max_steps = 400;
    pre.seed = seed;
    TrainConfig ft = pre;
    ft.max_steps = 200;
    ft.eval_every = 25;
    const PretrainFinetuneResult r = PretrainThenFinetune(da, db, pre, ft, 7, 0.05);
    if (r.finetuned_mean_eer < r.pretrained_mean_eer) ++improved;
    os << " " << Fmt("%.3f", r.pretrained_mean_eer) << "->"
       << Fmt("%.3f", r.finetuned_mean_eer);
  }
  os << "; improved on " << improved << "/10 seeds";
  return {improved >= 8, os.str()};
}

// ---------------------------------------------------------------- A8

Outcome A8CrossAttention() {
  const Dataset data = DatasetFromStore(Generate(A4Synth()).store);
  Rng split_rng(DeriveSeed(8, "holdout"));
  const SpeakerSplit split = SplitSpeakers(data.Speakers(), 0.2, split_rng);
  TrainConfig jc = A4Train();
  Rng trial_rng(DeriveSeed(8, "dev-trials"));
  const DevSet dev = MakeDevSet(data, split.held_out, jc, trial_rng);
  const Dataset train = data.Select(split.train);

  XAttnTrainConfig xc;
  xc.model.d_model = 16;
  xc.model.n_heads = 2;
  xc.model.p_drop = 0.5;
  xc.adam.lr = 1e-3;
  xc.batch_size = 64;
  xc.max_steps = 2000;
  xc.eval_every = 100;
  xc.patience = 10;
  xc.seed = 8;
  const XAttnTrainResult xr = TrainXAttn(train, dev, xc);
  const TrainResult jr = TrainFromScratch(train, dev, jc);
  const ArchitectureComparison cmp = CompareArchitectures(jr.best, xr.best, dev);
  std::ostringstream os;
  os << "cross-attention EER " << cmp.cross_attention.eer << ", separate heads "
     << cmp.separate.eer << " on the same " << cmp.n_trials << " trials";
  const bool same_trials =
      cmp.n_trials == dev.trials.size() &&
      cmp.separate.n_target + cmp.separate.n_nontarget == cmp.n_trials &&
      cmp.cross_attention.n_target + cmp.cross_attention.n_nontarget == cmp.n_trials;
  return {cmp.cross_attention.eer <= 0.40 && same_trials, os.str()};
}

// ---------------------------------------------------------------- A9

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Compares two output directories file by file; report.json is compared
// with its timestamp removed.
bool SameOutputs(const fs::path& a, const fs::path& b, std::string* why) {
  std::set<std::string> names;
  for (const fs::path& d : {a, b}) {
    for (const auto& e : fs::directory_iterator(d)) {
      names.insert(e.path().filename().string());
    }
  }
  for (const auto& n : names) {
    if (!fs::exists(a / n) || !fs::exists(b / n)) {
      *why = n + " missing in one run";
      return false;
    }
    std::string x = Slurp(a / n), y = Slurp(b / n);
    if (n == "report.json") {
      Json jx = Json::parse(x), jy = Json::parse(y);
      if (!jx.contains("generated_at")) {
        *why = "report.json lacks generated_at";
        return false;
      }
      jx.erase("generated_at");
      jy.erase("generated_at");
      x = jx.dump();
      y = jy.dump();
    }
    if (x != y) {
      *why = n + " differs";
      return false;
    }
  }
  return !names.empty();
}

Outcome A9Determinism() {
  TempDir dir("accept_a9");
  const Json train{{"p_drop", 0.5}, {"max_steps", 120}, {"eval_every", 40},
                   {"batch_size", 16},
                   {"dev_trials", {{"n_target", 200}, {"n_nontarget", 200}}}};
  const Json langs{{"en", 1.0}, {"de", 1.0}};
  WriteJson(dir / "synth_a.json",
            Json{{"seed", 91},
                 {"synth", {{"n_speakers", 24}, {"records_per_speaker", 6},
                            {"languages", langs}, {"speaker_prefix", "pa"}}}});
  WriteJson(dir / "synth_b.json",
            Json{{"seed", 92},
                 {"synth", {{"n_speakers", 24}, {"records_per_speaker", 6},
                            {"languages", langs}, {"speaker_prefix", "pb"},
                            {"projection_seed", 91}, {"projection_shift", 0.3}}}});
  WriteJson(dir / "train.json",
            Json{{"store", "A"}, {"holdout_fraction", 0.2}, {"train", train}});
  WriteJson(dir / "crossval.json",
            Json{{"store", "A"}, {"n_folds", 4}, {"train", train}});
  WriteJson(dir / "pf.json",
            Json{{"pretrain_store", "A"}, {"finetune_store", "B"}, {"n_folds", 3},
                 {"holdout_fraction", 0.2}, {"pretrain", train}, {"finetune", train}});
  WriteJson(dir / "scenarios.json",
            Json{{"corpora", {{"pretrain", "A"}, {"finetune", "B"}}},
                 {"n_folds", 3}, {"holdout_fraction", 0.2}, {"n_eval_speakers", 5},
                 {"test_trials", {{"n_target", 100}, {"n_nontarget", 100}}},
                 {"pretrain", train}, {"finetune", train}});
  WriteJson(dir / "eval.json", Json{{"checkpoint", "train_1/checkpoint.fvh"},
                                    {"trials", "train_1/trials.tsv"},
                                    {"store", "B"}});
  WriteJson(dir / "xattn.json",
            Json{{"store", "A"}, {"holdout_fraction", 0.2},
                 {"xattn", {{"d_model", 8}, {"n_heads", 2}, {"p_drop", 0.5},
                            {"max_steps", 100}, {"eval_every", 50}}},
                 {"train", train}});

  // Corpora first, then every command twice.
  if (RunFva("synth --config " + (dir / "synth_a.json") + " --out " + (dir / "A")) != 0 ||
      RunFva("synth --config " + (dir / "synth_b.json") + " --out " + (dir / "B")) != 0) {
    return {false, "synth failed"};
  }
  if (RunFva("synth --config " + (dir / "synth_a.json") + " --out " + (dir / "A2")) != 0) {
    return {false, "synth rerun failed"};
  }
  std::string why;
  if (!SameOutputs(dir / "A", dir / "A2", &why)) return {false, "synth: " + why};

  // eval reuses train_1's trial list on the other corpus, whose ids do not
  // appear there; score it against A instead.
  WriteJson(dir / "eval.json", Json{{"checkpoint", "train_1/checkpoint.fvh"},
                                    {"trials", "train_1/trials.tsv"},
                                    {"store", "A"}});
  std::ostringstream os;
  os << "synth";
  for (const char* cmd : {"train", "crossval", "pretrain-finetune", "scenarios",
                          "eval", "xattn"}) {
    std::string cfg = cmd;
    if (cfg == "pretrain-finetune") cfg = "pf";
    for (int run = 1; run <= 2; ++run) {
      const std::string out = dir / (cfg + "_" + std::to_string(run));
      const int code = RunFva(std::string(cmd) + " --config " +
                              (dir / (cfg + ".json")) + " --out " + out +
                              " --seed 5");
      if (code != 0) {
        return {false, std::string(cmd) + " exited " + std::to_string(code)};
      }
    }
    if (!SameOutputs(dir / (cfg + "_1"), dir / (cfg + "_2"), &why)) {
      return {false, std::string(cmd) + ": " + why};
    }
    os << ", " << cmd;
  }
  os << ": reruns byte-identical (timestamp excluded)";
  return {true, os.str()};
}

// ---------------------------------------------------------------- A10

Outcome A10BackboneShapedRoundTrip() {
  Rng rng(10);
  std::vector<EmbeddingRecord> recs;
  recs.reserve(10000);
  const size_t owners = 2500;  // each voice/face owner has both its modalities
  for (size_t i = 0; i < owners; ++i) {
    const bool voice = i % 2 == 0;
    const std::string spk = "s" + std::to_string(i / 10);
    const std::string owner = spk + (voice ? "_v" : "_f") + std::to_string(i);
    for (ModalityKind m : kAllModalities) {
      const bool is_voice = m == ModalityKind::kVoiceSpeaker ||
                            m == ModalityKind::kVoiceAgeGender;
      if (is_voice != voice) continue;
      for (int dup = 0; dup < 2; ++dup) {
        std::vector<float> v(kBackboneDims[ModalityIndex(m)]);
        for (float& x : v) {
          // Arbitrary finite bit patterns.
          uint32_t bits = static_cast<uint32_t>(rng.NextU64());
          if (((bits >> 23) & 0xff) == 0xff) bits &= ~(1u << 23);
          std::memcpy(&x, &bits, sizeof(x));
        }
        recs.push_back({MakeRecordId(owner + (dup ? "b" : ""), m), spk,
                        i % 3 ? "en" : "de", m, std::move(v)});
      }
    }
  }
  const EmbeddingStore store = EmbeddingStore::FromRecords(recs, "backbone");
  TempDir dir("accept_a10");
  const auto t0 = std::chrono::steady_clock::now();
  WriteStore(store, dir / "backbone");
  const EmbeddingStore back = ReadStore(dir / "backbone");
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  bool exact = back.size() == store.size();
  for (const auto& r : store.records()) {
    if (!exact) break;
    const EmbeddingRecord* b = back.Find(r.record_id);
    exact = b && b->speaker_id == r.speaker_id && b->language == r.language &&
            b->modality == r.modality && b->vector.size() == r.vector.size() &&
            std::memcmp(b->vector.data(), r.vector.data(),
                        r.vector.size() * sizeof(float)) == 0;
  }
  bool shaped = true;
  try {
    ValidateDims(back, DimMode::kBackboneShaped);
  } catch (const Error&) {
    shaped = false;
  }
  std::ostringstream os;
  os << store.size() << " records, write+read " << Fmt("%.2f", secs) << " s, "
     << (exact ? "bit-exact" : "MISMATCH");
  return {exact && shaped && store.size() == 10000 && secs < 10.0, os.str()};
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace fva

int main(int argc, char** argv) {
  using namespace fva;
  const std::vector<Criterion> all = {
      {"A1", "gradient correctness", A1GradientChecks},
      {"A2", "plain softmax reference", A2ReferenceCe},
      {"A3", "EER oracle equivalence", A3EerOracle},
      {"A4", "end-to-end learnability", A4Learnability},
      {"A5", "chance level on shuffled labels", A5ShuffledLabels},
      {"A6", "unheard protocol audit", A6ProtocolAudit},
      {"A7", "fine-tuning closes a domain gap", A7DomainGap},
      {"A8", "cross-attention baseline", A8CrossAttention},
      {"A9", "CLI determinism", A9Determinism},
      {"A10", "backbone-shaped format round trip", A10BackboneShapedRoundTrip},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    failed += !o.pass;
    std::printf("%-4s %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
