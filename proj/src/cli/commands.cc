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

#include "fva/cli/commands.h"

#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "fva/cli/config.h"
#include "fva/cli/report.h"
#include "fva/common/binary_io.h"
#include "fva/common/error.h"
#include "fva/fusion/checkpoint_format.h"
#include "fva/synthgen/synth.h"
#include "fva/traineval/scoring.h"

namespace fva {
namespace cli {

namespace fs = std::filesystem;

namespace {

struct LoadedConfig {
  Json json;
  fs::path base_dir;

  std::string Resolve(const std::string& p) const {
    const fs::path path(p);
    return (path.is_absolute() ? path : base_dir / path).string();
  }
};

LoadedConfig LoadConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFileBytes(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  LoadedConfig c;
  c.json = ParseConfigText(text, path);
  c.base_dir = fs::absolute(fs::path(path)).parent_path();
  return c;
}

fs::path PrepareOut(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot create output directory " + out + ": " + ec.message());
  }
  return fs::path(out);
}

void Write(const fs::path& dir, const std::string& name,
           std::string_view bytes) {
  WriteFileAtomic((dir / name).string(), bytes);
}

Json BaseReport(const std::string& command, Json config) {
  return Json{{"command", command}, {"config", std::move(config)}};
}

Json DatasetJson(const EmbeddingStore& store, const Dataset& data) {
  return Json{{"name", store.dataset_name()},
              {"speakers", data.Speakers().size()},
              {"face_items", data.faces.items.size()},
              {"voice_items", data.voices.items.size()},
              {"face_dim", data.faces.dim},
              {"voice_dim", data.voices.dim},
              {"skipped_owners",
               data.faces.skipped.size() + data.voices.skipped.size()}};
}

EvalReport ScoreAndWrite(const fs::path& out, const std::vector<Trial>& trials,
                         const std::vector<double>& scores) {
  Write(out, "trials.tsv", FormatTrialsTsv(trials));
  Write(out, "scores.tsv", FormatScoreTsv(trials, scores));
  EvalReport r = EvaluateScores(trials, scores);
  r.score_file = "scores.tsv";
  return r;
}

}  // namespace

void CmdSynth(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const SynthCommandConfig c = ParseSynthCommand(lc.json, a.seed);
  const fs::path out = PrepareOut(a.out);
  const SynthDataset ds = Generate(c.synth);
  WriteSynthDataset(ds, out.string());
  const Manifest m = ds.store.GetManifest();

  Json dims = Json::object();
  for (ModalityKind k : kAllModalities) dims[ModalityName(k)] = ds.store.dim(k);
  Json report = BaseReport("synth", ToJson(c));
  report["speakers"] = ds.truth.speakers.size();
  report["records"] = m.entries.size();
  report["dims"] = dims;
  Write(out, "report.json", FinishReport(report));

  log << "synth: " << ds.truth.speakers.size() << " speakers, "
      << m.entries.size() << " records, dims";
  for (ModalityKind k : kAllModalities) {
    log << " " << ModalityName(k) << "=" << ds.store.dim(k);
  }
  log << " -> " << out.string() << "\n";
}

void CmdTrain(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const TrainCommandConfig c = ParseTrainCommand(lc.json, a.seed);
  const EmbeddingStore store = ReadStore(lc.Resolve(c.store));
  const Dataset data = DatasetFromStore(store);
  const fs::path out = PrepareOut(a.out);

  const PretrainResult pr = Pretrain(data, c.train, c.holdout_fraction);
  Write(out, "checkpoint.fvh", EncodeJointCheckpoint(pr.train.best));
  const EvalReport rep = ScoreAndWrite(
      out, pr.dev.trials,
      ScoreTrials(pr.train.best, pr.dev.data.faces, pr.dev.data.voices,
                  pr.dev.trials));

  Json report = BaseReport("train", ToJson(c));
  report["architecture"] = "separate";
  report["dataset"] = DatasetJson(store, data);
  report["result"] = ToJson(pr);
  report["result"]["report"] = ToJson(rep);
  report["checkpoint"] = "checkpoint.fvh";
  Write(out, "report.json", FinishReport(report));
  log << "train: held-out EER " << rep.eer << " over " << pr.dev.trials.size()
      << " trials (best step " << pr.train.best_step << ")\n";
}

void CmdCrossVal(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const CrossValCommandConfig c = ParseCrossValCommand(lc.json, a.seed);
  const EmbeddingStore store = ReadStore(lc.Resolve(c.store));
  const Dataset data = DatasetFromStore(store);
  const fs::path out = PrepareOut(a.out);

  const CrossValResult cv = CrossValidate(data, c.n_folds, c.train);
  Json report = BaseReport("crossval", ToJson(c));
  report["architecture"] = "separate";
  report["dataset"] = DatasetJson(store, data);
  report["result"] = ToJson(cv);
  for (const auto& f : cv.folds) {
    const std::string name = "fold_" + std::to_string(f.fold) + ".fvh";
    Write(out, name, EncodeJointCheckpoint(f.checkpoint));
    report["result"]["folds"][f.fold]["checkpoint"] = name;
  }
  Write(out, "report.json", FinishReport(report));
  log << "crossval: " << c.n_folds << " folds, mean EER " << cv.mean_eer
      << " (std " << cv.std_eer << ")\n";
}

void CmdPretrainFinetune(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const PretrainFinetuneCommandConfig c =
      ParsePretrainFinetuneCommand(lc.json, a.seed);
  const EmbeddingStore pre_store = ReadStore(lc.Resolve(c.pretrain_store));
  const EmbeddingStore ft_store = ReadStore(lc.Resolve(c.finetune_store));
  const Dataset pre_data = DatasetFromStore(pre_store);
  const Dataset ft_data = DatasetFromStore(ft_store);
  const fs::path out = PrepareOut(a.out);

  const PretrainFinetuneResult r =
      PretrainThenFinetune(pre_data, ft_data, c.pretrain, c.finetune,
                           c.n_folds, c.holdout_fraction);
  Write(out, "pretrained.fvh", EncodeJointCheckpoint(r.pretrain.train.best));
  Json report = BaseReport("pretrain-finetune", ToJson(c));
  report["architecture"] = "separate";
  report["pretrain_dataset"] = DatasetJson(pre_store, pre_data);
  report["finetune_dataset"] = DatasetJson(ft_store, ft_data);
  report["pretrain"] = ToJson(r.pretrain);
  report["pretrain"]["checkpoint"] = "pretrained.fvh";
  report["finetune"] = ToJson(r.finetune);
  for (const auto& f : r.finetune.folds) {
    const std::string name = "finetune_fold_" + std::to_string(f.fold) + ".fvh";
    Write(out, name, EncodeJointCheckpoint(f.checkpoint));
    report["finetune"]["folds"][f.fold]["checkpoint"] = name;
  }
  report["pretrained_mean_eer"] = r.pretrained_mean_eer;
  report["finetuned_mean_eer"] = r.finetuned_mean_eer;
  Write(out, "report.json", FinishReport(report));
  log << "pretrain-finetune: pre-train dev EER " << r.pretrain.report.eer
      << ", fold mean EER frozen " << r.pretrained_mean_eer << " -> fine-tuned "
      << r.finetuned_mean_eer << "\n";
}

void CmdScenarios(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const ScenariosCommandConfig c = ParseScenariosCommand(lc.json, a.seed);
  std::map<std::string, EmbeddingStore> corpora;
  for (const auto& [name, path] : c.corpora) {
    corpora.emplace(name, ReadStore(lc.Resolve(path)));
  }
  // Audit and training happen before anything is written.
  const ScenarioTable t = RunScenarios(corpora, c.plans, c.settings);
  const fs::path out = PrepareOut(a.out);

  Json report = BaseReport("scenarios", ToJson(c));
  report["architecture"] = "separate";
  report["result"] = ToJson(t);
  for (size_t i = 0; i < t.outcomes.size(); ++i) {
    const ScenarioOutcome& o = t.outcomes[i];
    Json names = Json::array();
    for (size_t k = 0; k < o.checkpoints.size(); ++k) {
      std::string name = std::string("scenario_") + ScenarioName(o.scenario);
      if (o.recipe.finetune) name += "_fold_" + std::to_string(k);
      name += ".fvh";
      Write(out, name, EncodeJointCheckpoint(o.checkpoints[k]));
      names.push_back(name);
    }
    report["result"]["scenarios"][i]["checkpoints"] = names;
  }
  Write(out, "report.json", FinishReport(report));
  for (const auto& o : t.outcomes) {
    log << "scenarios: " << ScenarioName(o.scenario) << " EER " << o.test_eer
        << "\n";
  }
  log << "scenarios: overall EER " << t.overall_eer << "\n";
}

void CmdEval(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const EvalCommandConfig c = ParseEvalCommand(lc.json);
  const std::string ckpt_path = lc.Resolve(c.checkpoint);
  const std::string ckpt = ReadFileBytes(ckpt_path);
  const CheckpointKind kind = PeekCheckpointKind(ckpt, ckpt_path);
  const std::string trials_path = lc.Resolve(c.trials);
  const std::vector<Trial> trials =
      ParseTrialsTsv(ReadFileBytes(trials_path), trials_path);
  if (trials.empty()) {
    throw Error(ErrorKind::kMetric, trials_path + ": trial list is empty");
  }
  const EmbeddingStore store = ReadStore(lc.Resolve(c.store));
  const Dataset data = DatasetFromStore(store);
  const fs::path out = PrepareOut(a.out);

  std::vector<double> scores;
  const char* arch = "separate";
  if (kind == CheckpointKind::kMappingHeads) {
    const JointModel m = DecodeJointCheckpoint(ckpt, ckpt_path);
    ValidateModelDims(m, data.voices.dim, data.faces.dim);
    scores = ScoreTrials(m, data.faces, data.voices, trials);
  } else {
    arch = "cross-attention";
    const XAttnModel m = DecodeXAttnCheckpoint(ckpt, ckpt_path);
    if (m.voice_dim != data.voices.dim || m.face_dim != data.faces.dim) {
      throw Error(ErrorKind::kSchema,
                  ckpt_path + ": checkpoint dims do not match the store");
    }
    scores = ScoreTrialsXAttn(m, data.faces, data.voices, trials);
  }
  Write(out, "scores.tsv", FormatScoreTsv(trials, scores));
  EvalReport rep = EvaluateScores(trials, scores);
  rep.score_file = "scores.tsv";

  Json report = BaseReport("eval", ToJson(c));
  report["architecture"] = arch;
  report["n_trials"] = trials.size();
  report["result"] = ToJson(rep);
  Write(out, "report.json", FinishReport(report));
  log << "eval: EER " << rep.eer << " over " << trials.size() << " trials\n";
}

void CmdXAttn(const CommandArgs& a, std::ostream& log) {
  const LoadedConfig lc = LoadConfig(a.config);
  const XAttnCommandConfig c = ParseXAttnCommand(lc.json, a.seed);
  const EmbeddingStore store = ReadStore(lc.Resolve(c.store));
  const Dataset data = DatasetFromStore(store);
  const fs::path out = PrepareOut(a.out);

  Rng split_rng(DeriveSeed(c.xattn.seed, "holdout"));
  const SpeakerSplit split =
      SplitSpeakers(data.Speakers(), c.holdout_fraction, split_rng);
  Rng trial_rng(DeriveSeed(c.xattn.seed, "dev-trials"));
  const DevSet dev = MakeDevSet(data, split.held_out, c.train, trial_rng);
  const Dataset train = data.Select(split.train);

  const XAttnTrainResult xr = TrainXAttn(train, dev, c.xattn);
  const TrainResult jr = TrainFromScratch(train, dev, c.train);
  const ArchitectureComparison cmp = CompareArchitectures(jr.best, xr.best, dev);

  Write(out, "checkpoint.fvh", EncodeXAttnCheckpoint(xr.best));
  Write(out, "baseline.fvh", EncodeJointCheckpoint(jr.best));
  const EvalReport rep = ScoreAndWrite(
      out, dev.trials,
      ScoreTrialsXAttn(xr.best, dev.data.faces, dev.data.voices, dev.trials));

  Json report = BaseReport("xattn", ToJson(c));
  report["architecture"] = "cross-attention";
  report["dataset"] = DatasetJson(store, data);
  report["held_out_speakers"] = split.held_out;
  report["result"] = {{"report", ToJson(rep)},
                      {"best_step", xr.best_step},
                      {"steps_run", xr.steps_run},
                      {"stopped_early", xr.stopped_early},
                      {"log", ToJson(xr.log)}};
  report["checkpoint"] = "checkpoint.fvh";
  report["comparison"] = ToJson(cmp);
  report["comparison"]["baseline_checkpoint"] = "baseline.fvh";
  Write(out, "report.json", FinishReport(report));
  log << "xattn: EER " << cmp.cross_attention.eer << " (separate heads "
      << cmp.separate.eer << ") over " << cmp.n_trials << " trials\n";
}

int Main(int argc, char** argv) {
  CLI::App app{"Face-voice association toolkit"};
  app.require_subcommand(1);
  app.footer(ConfigKeyHelp());

  CommandArgs args;
  using Fn = void (*)(const CommandArgs&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Fn>> commands = {
      {"synth", "Generate a synthetic multi-modal corpus", CmdSynth},
      {"train", "Train mapping heads with a held-out speaker split", CmdTrain},
      {"crossval", "Speaker-disjoint k-fold cross-validation", CmdCrossVal},
      {"pretrain-finetune", "Pre-train, then fine-tune per fold",
       CmdPretrainFinetune},
      {"scenarios", "Heard/unheard language scenarios", CmdScenarios},
      {"eval", "Score a trial list with a checkpoint", CmdEval},
      {"xattn", "Train the cross-attention pair classifier", CmdXAttn},
  };
  std::map<CLI::App*, Fn> dispatch;
  uint64_t seed = 0;
  for (const auto& [name, desc, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config, "JSON config file")->required();
    sub->add_option("--out", args.out, "Output directory")->required();
    sub->add_option("--seed", seed, "Master seed (overrides config)");
    sub->footer(ConfigKeyHelp());
    dispatch[sub] = fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [sub, fn] : dispatch) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) args.seed = seed;
    try {
      fn(args, std::cout);
      return 0;
    } catch (const Error& e) {
      std::cerr << "fva " << sub->get_name() << ": " << e.what() << "\n";
      return ExitCodeFor(e.kind());
    } catch (const fs::filesystem_error& e) {
      std::cerr << "fva " << sub->get_name() << ": io error: " << e.what()
                << "\n";
      return ExitCodeFor(ErrorKind::kIo);
    } catch (const std::exception& e) {
      std::cerr << "fva " << sub->get_name() << ": internal error: " << e.what()
                << "\n";
      return 5;
    }
  }
  return 2;
}

}  // namespace cli
}  // namespace fva
