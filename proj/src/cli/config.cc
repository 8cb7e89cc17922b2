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

#include "fva/cli/config.h"

#include <sstream>

#include "fva/common/error.h"

namespace fva {
namespace cli {

namespace {

[[noreturn]] void Bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kConfig, path + ": " + what);
}

}  // namespace

Json ParseConfigText(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::ostringstream os;
    os << source << ": malformed JSON at byte " << e.byte << ": " << e.what();
    throw Error(ErrorKind::kConfig, os.str());
  }
}

ObjectReader::ObjectReader(const Json& j, std::string path)
    : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) Bad(path_.empty() ? "<root>" : path_, "expected object");
}

std::string ObjectReader::PathOf(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ObjectReader::Has(const std::string& key) const {
  return j_.contains(key);
}

const Json* ObjectReader::Find(const std::string& key) {
  auto it = j_.find(key);
  if (it == j_.end()) return nullptr;
  seen_.insert(key);
  return &*it;
}

const Json* ObjectReader::Raw(const std::string& key) { return Find(key); }

std::optional<uint64_t> ObjectReader::U64(const std::string& key) {
  const Json* v = Find(key);
  if (!v) return std::nullopt;
  if (v->is_number_unsigned()) return v->get<uint64_t>();
  if (v->is_number_integer() && v->get<int64_t>() >= 0) {
    return static_cast<uint64_t>(v->get<int64_t>());
  }
  Bad(PathOf(key), "expected non-negative integer");
}

std::optional<double> ObjectReader::Real(const std::string& key) {
  const Json* v = Find(key);
  if (!v) return std::nullopt;
  if (!v->is_number()) Bad(PathOf(key), "expected number");
  return v->get<double>();
}

std::optional<bool> ObjectReader::Bool(const std::string& key) {
  const Json* v = Find(key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) Bad(PathOf(key), "expected true/false");
  return v->get<bool>();
}

std::optional<std::string> ObjectReader::Str(const std::string& key) {
  const Json* v = Find(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) Bad(PathOf(key), "expected string");
  return v->get<std::string>();
}

std::optional<ObjectReader> ObjectReader::Object(const std::string& key) {
  const Json* v = Find(key);
  if (!v) return std::nullopt;
  return ObjectReader(*v, PathOf(key));
}

void ObjectReader::Finish() const {
  std::vector<std::string> unknown;
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.count(it.key())) unknown.push_back(it.key());
  }
  if (unknown.empty()) return;
  std::string msg = "unknown key(s):";
  for (const auto& k : unknown) msg += " '" + PathOf(k) + "'";
  throw Error(ErrorKind::kConfig, msg);
}

namespace {

template <typename T, typename U>
void Set(std::optional<U> v, T* dst) {
  if (v) *dst = static_cast<T>(*v);
}

std::string RequireStr(ObjectReader& r, const std::string& key) {
  auto v = r.Str(key);
  if (!v || v->empty()) Bad(r.PathOf(key), "required path missing");
  return *v;
}

TrialCounts ReadCounts(ObjectReader r, TrialCounts c) {
  Set(r.U64("n_target"), &c.n_target);
  Set(r.U64("n_nontarget"), &c.n_nontarget);
  r.Finish();
  return c;
}

Json CountsJson(const TrialCounts& c) {
  return Json{{"n_target", c.n_target}, {"n_nontarget", c.n_nontarget}};
}

TrainConfig ReadTrain(std::optional<ObjectReader> r, uint64_t seed) {
  TrainConfig c;
  c.seed = seed;
  if (!r) return c;
  Set(r->Real("lr"), &c.adam.lr);
  Set(r->Real("beta1"), &c.adam.beta1);
  Set(r->Real("beta2"), &c.adam.beta2);
  Set(r->Real("eps"), &c.adam.eps);
  Set(r->U64("batch_size"), &c.batch_size);
  Set(r->U64("max_epochs"), &c.max_epochs);
  Set(r->U64("max_steps"), &c.max_steps);
  Set(r->U64("patience"), &c.patience);
  Set(r->Real("scale"), &c.aam.scale);
  Set(r->Real("margin"), &c.aam.margin);
  Set(r->Real("p_drop"), &c.p_drop);
  Set(r->U64("eval_every"), &c.eval_every);
  Set(r->Bool("classifier_reinit"), &c.classifier_reinit);
  Set(r->Bool("use_bias"), &c.use_bias);
  Set(r->U64("out_dim"), &c.out_dim);
  if (auto d = r->Object("dev_trials")) c.dev_trials = ReadCounts(*d, c.dev_trials);
  Set(r->Bool("clamp_dev_trials"), &c.clamp_dev_trials);
  r->Finish();
  ValidateTrainConfig(c);
  return c;
}

XAttnTrainConfig ReadXAttn(std::optional<ObjectReader> r, uint64_t seed) {
  XAttnTrainConfig c;
  c.seed = seed;
  if (!r) return c;
  Set(r->U64("d_model"), &c.model.d_model);
  Set(r->U64("n_heads"), &c.model.n_heads);
  Set(r->Bool("residual"), &c.model.residual);
  Set(r->Bool("attn_bias"), &c.model.attn_bias);
  Set(r->Bool("positional"), &c.model.positional);
  if (auto d = r->Str("direction")) c.model.direction = ParseAttnDirection(*d);
  Set(r->Real("p_drop"), &c.model.p_drop);
  Set(r->Real("lr"), &c.adam.lr);
  Set(r->Real("beta1"), &c.adam.beta1);
  Set(r->Real("beta2"), &c.adam.beta2);
  Set(r->Real("eps"), &c.adam.eps);
  Set(r->U64("batch_size"), &c.batch_size);
  Set(r->U64("max_steps"), &c.max_steps);
  Set(r->U64("eval_every"), &c.eval_every);
  Set(r->U64("patience"), &c.patience);
  r->Finish();
  ValidateXAttnTrainConfig(c);
  return c;
}

SynthConfig ReadSynth(std::optional<ObjectReader> r, uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  if (!r) return c;
  Set(r->U64("n_speakers"), &c.n_speakers);
  Set(r->U64("latent_dim"), &c.latent_dim);
  if (const Json* d = r->Raw("dims")) {
    if (d->is_string() && d->get<std::string>() == "small") {
      c.dims = kSmallModeDims;
    } else if (d->is_string() && d->get<std::string>() == "backbone") {
      c.dims = kBackboneDims;
    } else if (d->is_array() && d->size() == 4) {
      for (size_t i = 0; i < 4; ++i) {
        const Json& v = (*d)[i];
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() > 0)) {
          Bad(r->PathOf("dims"), "entries must be positive integers");
        }
        c.dims[i] = v.get<size_t>();
      }
    } else {
      Bad(r->PathOf("dims"),
          "expected \"small\", \"backbone\" or an array of 4 dims");
    }
  }
  Set(r->Real("noise_sigma"), &c.noise_sigma);
  Set(r->U64("records_per_speaker"), &c.records_per_speaker);
  if (auto l = r->Object("languages")) {
    (void)l;
    const Json& obj = *r->Raw("languages");
    c.languages.clear();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!it.value().is_number()) {
        Bad(r->PathOf("languages") + "." + it.key(), "expected weight");
      }
      c.languages.push_back({it.key(), it.value().get<double>()});
    }
  }
  if (auto a = r->Str("language_assignment")) {
    if (*a == "per_record") {
      c.language_assignment = LanguageAssignment::kPerRecord;
    } else if (*a == "per_speaker") {
      c.language_assignment = LanguageAssignment::kPerSpeaker;
    } else {
      Bad(r->PathOf("language_assignment"),
          "expected \"per_record\" or \"per_speaker\"");
    }
  }
  Set(r->Str("speaker_prefix"), &c.speaker_prefix);
  Set(r->Str("dataset_name"), &c.dataset_name);
  if (auto p = r->U64("projection_seed")) c.projection_seed = *p;
  Set(r->Real("projection_shift"), &c.projection_shift);
  Set(r->U64("shift_seed"), &c.shift_seed);
  r->Finish();
  ValidateSynthConfig(c);
  return c;
}

uint64_t MasterSeed(ObjectReader& r, std::optional<uint64_t> override_seed) {
  const std::optional<uint64_t> s = r.U64("seed");
  if (override_seed) return *override_seed;
  return s.value_or(1);
}

double ReadFraction(ObjectReader& r, double dflt) {
  const double f = r.Real("holdout_fraction").value_or(dflt);
  if (!(f > 0.0 && f < 1.0)) {
    Bad("holdout_fraction", "must lie in (0, 1)");
  }
  return f;
}

size_t ReadFolds(ObjectReader& r) {
  const uint64_t n = r.U64("n_folds").value_or(7);
  if (n < 2) Bad("n_folds", "must be >= 2");
  return n;
}

std::optional<std::string> OptionalLanguage(ObjectReader& r,
                                            const std::string& key,
                                            std::optional<std::string> dflt) {
  const Json* v = r.Raw(key);
  if (!v) return dflt;
  if (v->is_null()) return std::nullopt;
  if (!v->is_string()) Bad(r.PathOf(key), "expected language tag or null");
  return v->get<std::string>();
}

ScenarioPlan ReadPlan(const Json& j, const std::string& path) {
  if (j.is_string()) return DefaultPlan(ParseScenario(j.get<std::string>()));
  ObjectReader r(j, path);
  auto name = r.Str("scenario");
  if (!name) Bad(r.PathOf("scenario"), "required");
  ScenarioPlan p = DefaultPlan(ParseScenario(*name));
  Set(r.Str("pretrain_corpus"), &p.pretrain_corpus);
  Set(r.Str("finetune_corpus"), &p.finetune_corpus);
  p.recipe.pretrain_exclude =
      OptionalLanguage(r, "pretrain_exclude", p.recipe.pretrain_exclude);
  Set(r.Bool("finetune"), &p.recipe.finetune);
  p.recipe.finetune_exclude =
      OptionalLanguage(r, "finetune_exclude", p.recipe.finetune_exclude);
  r.Finish();
  return p;
}

Json OptionalJson(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

}  // namespace

SynthCommandConfig ParseSynthCommand(const Json& j,
                                     std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  SynthCommandConfig c;
  const uint64_t seed = MasterSeed(r, seed_override);
  c.synth = ReadSynth(r.Object("synth"), seed);
  r.Finish();
  return c;
}

TrainCommandConfig ParseTrainCommand(const Json& j,
                                     std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  TrainCommandConfig c;
  const uint64_t seed = MasterSeed(r, seed_override);
  c.store = RequireStr(r, "store");
  c.holdout_fraction = ReadFraction(r, c.holdout_fraction);
  c.train = ReadTrain(r.Object("train"), seed);
  r.Finish();
  return c;
}

CrossValCommandConfig ParseCrossValCommand(
    const Json& j, std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  CrossValCommandConfig c;
  const uint64_t seed = MasterSeed(r, seed_override);
  c.store = RequireStr(r, "store");
  c.n_folds = ReadFolds(r);
  c.train = ReadTrain(r.Object("train"), seed);
  r.Finish();
  return c;
}

PretrainFinetuneCommandConfig ParsePretrainFinetuneCommand(
    const Json& j, std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  PretrainFinetuneCommandConfig c;
  const uint64_t seed = MasterSeed(r, seed_override);
  c.pretrain_store = RequireStr(r, "pretrain_store");
  c.finetune_store = RequireStr(r, "finetune_store");
  c.n_folds = ReadFolds(r);
  c.holdout_fraction = ReadFraction(r, c.holdout_fraction);
  c.pretrain = ReadTrain(r.Object("pretrain"), seed);
  c.finetune = ReadTrain(r.Object("finetune"), seed);
  r.Finish();
  return c;
}

ScenariosCommandConfig ParseScenariosCommand(
    const Json& j, std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  ScenariosCommandConfig c;
  ScenarioSettings& s = c.settings;
  s.seed = MasterSeed(r, seed_override);
  const Json* corpora = r.Raw("corpora");
  if (!corpora || !corpora->is_object() || corpora->empty()) {
    Bad("corpora", "required object mapping corpus name to store directory");
  }
  for (auto it = corpora->begin(); it != corpora->end(); ++it) {
    if (!it.value().is_string()) Bad("corpora." + it.key(), "expected path");
    c.corpora[it.key()] = it.value().get<std::string>();
  }
  if (const Json* plans = r.Raw("plans")) {
    if (!plans->is_array() || plans->empty()) {
      Bad("plans", "expected non-empty array");
    }
    for (size_t i = 0; i < plans->size(); ++i) {
      c.plans.push_back(
          ReadPlan((*plans)[i], "plans[" + std::to_string(i) + "]"));
    }
  } else {
    for (Scenario sc : kAllScenarios) c.plans.push_back(DefaultPlan(sc));
  }
  s.n_folds = ReadFolds(r);
  s.holdout_fraction = ReadFraction(r, s.holdout_fraction);
  Set(r.U64("n_eval_speakers"), &s.n_eval_speakers);
  Set(r.Str("eval_corpus"), &s.eval_corpus);
  if (auto t = r.Object("test_trials")) s.test_trials = ReadCounts(*t, s.test_trials);
  Set(r.Bool("auto_filter"), &s.auto_filter);
  s.pretrain = ReadTrain(r.Object("pretrain"), s.seed);
  s.finetune = ReadTrain(r.Object("finetune"), s.seed);
  r.Finish();
  if (!c.corpora.count(s.eval_corpus)) {
    Bad("eval_corpus", "'" + s.eval_corpus + "' is not in corpora");
  }
  for (const auto& p : c.plans) {
    for (const auto* name : {&p.pretrain_corpus, &p.finetune_corpus}) {
      if (name == &p.finetune_corpus && !p.recipe.finetune) continue;
      if (!c.corpora.count(*name)) {
        Bad("plans", std::string(ScenarioName(p.scenario)) +
                         " references unknown corpus '" + *name + "'");
      }
    }
  }
  return c;
}

EvalCommandConfig ParseEvalCommand(const Json& j) {
  ObjectReader r(j, "");
  EvalCommandConfig c;
  c.checkpoint = RequireStr(r, "checkpoint");
  c.trials = RequireStr(r, "trials");
  c.store = RequireStr(r, "store");
  r.Finish();
  return c;
}

XAttnCommandConfig ParseXAttnCommand(const Json& j,
                                     std::optional<uint64_t> seed_override) {
  ObjectReader r(j, "");
  XAttnCommandConfig c;
  const uint64_t seed = MasterSeed(r, seed_override);
  c.store = RequireStr(r, "store");
  c.holdout_fraction = ReadFraction(r, c.holdout_fraction);
  c.xattn = ReadXAttn(r.Object("xattn"), seed);
  c.train = ReadTrain(r.Object("train"), seed);
  r.Finish();
  return c;
}

Json ToJson(const SynthConfig& c) {
  Json langs = Json::object();
  for (const auto& l : c.languages) langs[l.language] = l.weight;
  Json j{{"n_speakers", c.n_speakers},
         {"latent_dim", c.latent_dim},
         {"dims", Json(std::vector<size_t>(c.dims.begin(), c.dims.end()))},
         {"noise_sigma", c.noise_sigma},
         {"records_per_speaker", c.records_per_speaker},
         {"languages", langs},
         {"language_assignment",
          c.language_assignment == LanguageAssignment::kPerRecord
              ? "per_record"
              : "per_speaker"},
         {"speaker_prefix", c.speaker_prefix},
         {"dataset_name", c.dataset_name}};
  j["projection_seed"] =
      c.projection_seed ? Json(*c.projection_seed) : Json(nullptr);
  j["projection_shift"] = c.projection_shift;
  j["shift_seed"] = c.shift_seed;
  return j;
}

Json ToJson(const TrainConfig& c) {
  return Json{{"lr", c.adam.lr},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"eps", c.adam.eps},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"max_steps", c.max_steps},
              {"patience", c.patience},
              {"scale", c.aam.scale},
              {"margin", c.aam.margin},
              {"p_drop", c.p_drop},
              {"eval_every", c.eval_every},
              {"classifier_reinit", c.classifier_reinit},
              {"use_bias", c.use_bias},
              {"out_dim", c.out_dim},
              {"dev_trials", CountsJson(c.dev_trials)},
              {"clamp_dev_trials", c.clamp_dev_trials}};
}

Json ToJson(const XAttnTrainConfig& c) {
  return Json{{"d_model", c.model.d_model},
              {"n_heads", c.model.n_heads},
              {"residual", c.model.residual},
              {"attn_bias", c.model.attn_bias},
              {"positional", c.model.positional},
              {"direction", AttnDirectionName(c.model.direction)},
              {"p_drop", c.model.p_drop},
              {"lr", c.adam.lr},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"eps", c.adam.eps},
              {"batch_size", c.batch_size},
              {"max_steps", c.max_steps},
              {"eval_every", c.eval_every},
              {"patience", c.patience}};
}

Json ToJson(const SynthCommandConfig& c) {
  return Json{{"seed", c.synth.seed}, {"synth", ToJson(c.synth)}};
}

Json ToJson(const TrainCommandConfig& c) {
  return Json{{"seed", c.train.seed},
              {"store", c.store},
              {"holdout_fraction", c.holdout_fraction},
              {"train", ToJson(c.train)}};
}

Json ToJson(const CrossValCommandConfig& c) {
  return Json{{"seed", c.train.seed},
              {"store", c.store},
              {"n_folds", c.n_folds},
              {"train", ToJson(c.train)}};
}

Json ToJson(const PretrainFinetuneCommandConfig& c) {
  return Json{{"seed", c.pretrain.seed},
              {"pretrain_store", c.pretrain_store},
              {"finetune_store", c.finetune_store},
              {"n_folds", c.n_folds},
              {"holdout_fraction", c.holdout_fraction},
              {"pretrain", ToJson(c.pretrain)},
              {"finetune", ToJson(c.finetune)}};
}

Json ToJson(const ScenariosCommandConfig& c) {
  const ScenarioSettings& s = c.settings;
  Json corpora = Json::object();
  for (const auto& [k, v] : c.corpora) corpora[k] = v;
  Json plans = Json::array();
  for (const auto& p : c.plans) {
    plans.push_back({{"scenario", ScenarioName(p.scenario)},
                     {"pretrain_corpus", p.pretrain_corpus},
                     {"finetune_corpus", p.finetune_corpus},
                     {"pretrain_exclude", OptionalJson(p.recipe.pretrain_exclude)},
                     {"finetune", p.recipe.finetune},
                     {"finetune_exclude", OptionalJson(p.recipe.finetune_exclude)}});
  }
  return Json{{"seed", s.seed},
              {"corpora", corpora},
              {"plans", plans},
              {"n_folds", s.n_folds},
              {"holdout_fraction", s.holdout_fraction},
              {"n_eval_speakers", s.n_eval_speakers},
              {"eval_corpus", s.eval_corpus},
              {"test_trials", CountsJson(s.test_trials)},
              {"auto_filter", s.auto_filter},
              {"pretrain", ToJson(s.pretrain)},
              {"finetune", ToJson(s.finetune)}};
}

Json ToJson(const EvalCommandConfig& c) {
  return Json{{"checkpoint", c.checkpoint},
              {"trials", c.trials},
              {"store", c.store}};
}

Json ToJson(const XAttnCommandConfig& c) {
  return Json{{"seed", c.xattn.seed},
              {"store", c.store},
              {"holdout_fraction", c.holdout_fraction},
              {"xattn", ToJson(c.xattn)},
              {"train", ToJson(c.train)}};
}

std::string ConfigKeyHelp() {
  return R"(Config file (JSON). Unknown keys are rejected. Relative paths are
resolved against the config file's directory. --seed overrides "seed".

Common:
  seed                      master seed (default 1)

synth:
  synth.n_speakers          speakers (30)
  synth.latent_dim          latent identity size k (16)
  synth.dims                "small" (64,16,48,8), "backbone" (6144,1536,4096,768)
                            or [voice_speaker, voice_agegender,
                                face_identity, face_agegender]
  synth.noise_sigma         per-record Gaussian noise (0.01)
  synth.records_per_speaker utterances and images per speaker (10)
  synth.languages           {"en": 1, "de": 1}: tag -> sampling weight
  synth.language_assignment "per_record" | "per_speaker"
  synth.speaker_prefix      speaker id prefix ("spk")
  synth.dataset_name        ("synthetic")
  synth.projection_seed     seed of the modality projections (default: seed)
  synth.projection_shift    std-dev of a projection perturbation (0)
  synth.shift_seed          seed of that perturbation (0)

train:              store, holdout_fraction (0.05), train.*
crossval:           store, n_folds (7), train.*
pretrain-finetune:  pretrain_store, finetune_store, n_folds (7),
                    holdout_fraction (0.05), pretrain.*, finetune.*
scenarios:          corpora {name: store dir}, plans, n_folds (7),
                    holdout_fraction (0.05), n_eval_speakers (8),
                    eval_corpus ("finetune"), test_trials.{n_target,
                    n_nontarget} (1000, 1000), auto_filter (true),
                    pretrain.*, finetune.*
  plans[]                   scenario name, or {scenario, pretrain_corpus
                            ("pretrain"), finetune_corpus ("finetune"),
                            pretrain_exclude, finetune (bool),
                            finetune_exclude}; default: all four of
                            english_heard, german_heard, english_unheard,
                            german_unheard
eval:               checkpoint, trials, store
xattn:              store, holdout_fraction (0.05), xattn.*, train.*

Training sections (train / pretrain / finetune):
  lr (2e-3), beta1 (0.9), beta2 (0.999), eps (1e-8)   Adam
  batch_size (32), max_epochs (200), max_steps (0 = unbounded)
  patience (5)              non-improving evaluations tolerated before stopping
  eval_every (50)           steps between dev evaluations
  scale (30), margin (0.2)  additive angular margin classifier
  p_drop (0.9)              dropout before each mapping layer
  classifier_reinit (true)  fresh classifier when fine-tuning
  use_bias (true), out_dim (192)
  dev_trials.{n_target, n_nontarget} (1000, 1000)
  clamp_dev_trials (true)   shrink dev trial counts to what exists

xattn section:
  d_model (128), n_heads (1), residual (true), attn_bias (true)
  positional (true)         learned per-token position embeddings
  direction ("face_queries_voice" | "voice_queries_face")
  p_drop (0.9), lr (1e-3), beta1, beta2, eps
  batch_size (16 pairs), max_steps (500), eval_every (25), patience (5)
  The dev trials (train.dev_trials) are shared with the baseline heads.
)";
}

}  // namespace cli
}  // namespace fva
