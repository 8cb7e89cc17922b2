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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fva/cli/config.h"
#include "fva/traineval/trials.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace fva {
namespace {

namespace fs = std::filesystem;
using fva::testing::RunFva;
using fva::testing::RunFvaCapture;
using fva::testing::TempDir;
using cli::Json;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void Spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

Json ReadJson(const std::string& path) { return Json::parse(Slurp(path)); }

size_t CountLines(const std::string& text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::string Cmd(const std::string& sub, const std::string& cfg,
                const std::string& out) {
  return sub + " --config " + cfg + " --out " + out;
}

Json SmallSynth(size_t speakers, double noise) {
  return Json{{"seed", 7},
              {"synth",
               {{"n_speakers", speakers},
                {"latent_dim", 16},
                {"dims", "small"},
                {"noise_sigma", noise},
                {"records_per_speaker", 6}}}};
}

Json FastTrain() {
  return Json{{"p_drop", 0.5}, {"max_steps", 60}, {"eval_every", 20},
              {"batch_size", 16}, {"out_dim", 32},
              {"dev_trials", {{"n_target", 60}, {"n_nontarget", 60}}}};
}

// Writes a config and runs synth into dir/store.
void MakeStore(const TempDir& dir, const Json& cfg) {
  Spit(dir / "synth.json", cfg.dump(2));
  ASSERT_EQ(RunFva(Cmd("synth", dir / "synth.json", dir / "store")), 0);
}

TEST(CliTest, HelpExitsZero) {
  EXPECT_EQ(RunFva("--help"), 0);
  EXPECT_EQ(RunFva("train --help"), 0);
}

TEST(CliTest, UnknownSubcommandIsUsageError) {
  EXPECT_NE(RunFva("frobnicate"), 0);
}

TEST(CliTest, SynthWritesStoreAndGroundTruth) {
  TempDir dir("cli_synth");
  MakeStore(dir, SmallSynth(6, 0.0));
  for (const char* f :
       {"voice_speaker.fve", "voice_agegender.fve", "face_identity.fve",
        "face_agegender.fve", "manifest.tsv", "ground_truth.fve",
        "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / ("store/" + std::string(f)))) << f;
  }
  const Json rep = ReadJson(dir / "store/report.json");
  EXPECT_EQ(rep["command"], "synth");
  EXPECT_EQ(rep["speakers"], 6);
  EXPECT_EQ(rep["records"], 6u * 6u * 2u * 2u);
  // header plus one row per record
  EXPECT_EQ(CountLines(Slurp(dir / "store/manifest.tsv")), 1u + 144u);
}

TEST(CliTest, SynthRerunIsByteIdentical) {
  TempDir dir("cli_synth_rerun");
  Spit(dir / "s.json", SmallSynth(5, 0.1).dump());
  ASSERT_EQ(RunFva(Cmd("synth", dir / "s.json", dir / "a")), 0);
  ASSERT_EQ(RunFva(Cmd("synth", dir / "s.json", dir / "b")), 0);
  for (const char* f : {"voice_speaker.fve", "face_identity.fve",
                        "manifest.tsv", "ground_truth.fve"}) {
    EXPECT_EQ(Slurp(dir / ("a/" + std::string(f))),
              Slurp(dir / ("b/" + std::string(f))))
        << f;
  }
}

TEST(CliTest, SeedFlagOverridesConfigSeed) {
  TempDir dir("cli_seed");
  Spit(dir / "s.json", SmallSynth(4, 0.1).dump());
  ASSERT_EQ(RunFva(Cmd("synth", dir / "s.json", dir / "a")), 0);
  ASSERT_EQ(RunFva(Cmd("synth", dir / "s.json", dir / "b") + " --seed 8"), 0);
  EXPECT_NE(Slurp(dir / "a/voice_speaker.fve"),
            Slurp(dir / "b/voice_speaker.fve"));
}

TEST(CliTest, MalformedJsonIsConfigError) {
  TempDir dir("cli_bad_json");
  Spit(dir / "bad.json", "{\"seed\": 3,,}");
  const auto [code, text] =
      RunFvaCapture(Cmd("synth", dir / "bad.json", dir / "out"));
  EXPECT_EQ(code, 2);
  EXPECT_NE(text.find("malformed JSON at byte"), std::string::npos) << text;
}

TEST(CliTest, UnknownKeyIsConfigError) {
  TempDir dir("cli_unknown");
  Json cfg = SmallSynth(4, 0.0);
  cfg["synth"]["n_speaker"] = 3;
  Spit(dir / "c.json", cfg.dump());
  const auto [code, text] =
      RunFvaCapture(Cmd("synth", dir / "c.json", dir / "out"));
  EXPECT_EQ(code, 2);
  EXPECT_NE(text.find("synth.n_speaker"), std::string::npos) << text;
}

TEST(CliTest, MissingConfigFileIsConfigError) {
  TempDir dir("cli_missing");
  EXPECT_EQ(RunFva(Cmd("train", dir / "nope.json", dir / "out")), 2);
}

TEST(CliTest, MissingStoreIsIoError) {
  TempDir dir("cli_nostore");
  Spit(dir / "t.json", Json{{"store", "absent"}}.dump());
  EXPECT_EQ(RunFva(Cmd("train", dir / "t.json", dir / "out")), 4);
}

TEST(CliTest, InvalidHyperparameterIsConfigError) {
  TempDir dir("cli_badparam");
  MakeStore(dir, SmallSynth(6, 0.0));
  Json t = FastTrain();
  t["p_drop"] = 1.0;
  Spit(dir / "t.json", Json{{"store", "store"}, {"train", t}}.dump());
  EXPECT_EQ(RunFva(Cmd("train", dir / "t.json", dir / "out")), 2);
}

TEST(CliTest, TrainThenEvalScoresEveryTrial) {
  TempDir dir("cli_train");
  MakeStore(dir, SmallSynth(12, 0.0));
  Spit(dir / "t.json", Json{{"store", "store"},
                            {"holdout_fraction", 0.25},
                            {"train", FastTrain()}}
                           .dump());
  ASSERT_EQ(RunFva(Cmd("train", dir / "t.json", dir / "run")), 0);
  for (const char* f :
       {"checkpoint.fvh", "trials.tsv", "scores.tsv", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / ("run/" + std::string(f)))) << f;
  }
  const Json rep = ReadJson(dir / "run/report.json");
  EXPECT_EQ(rep["architecture"], "separate");
  EXPECT_TRUE(rep.contains("generated_at"));

  Spit(dir / "e.json", Json{{"checkpoint", "run/checkpoint.fvh"},
                            {"trials", "run/trials.tsv"},
                            {"store", "store"}}
                           .dump());
  ASSERT_EQ(RunFva(Cmd("eval", dir / "e.json", dir / "ev")), 0);
  const size_t n_trials = CountLines(Slurp(dir / "run/trials.tsv")) - 1;
  EXPECT_GT(n_trials, 0u);
  EXPECT_EQ(CountLines(Slurp(dir / "ev/scores.tsv")) - 1, n_trials);
  const Json ev = ReadJson(dir / "ev/report.json");
  EXPECT_EQ(ev["n_trials"], n_trials);
  // Same checkpoint, same trials: identical scores.
  EXPECT_EQ(Slurp(dir / "ev/scores.tsv"), Slurp(dir / "run/scores.tsv"));
}

TEST(CliTest, EvalEmptyTrialListIsMetricError) {
  TempDir dir("cli_empty_trials");
  MakeStore(dir, SmallSynth(8, 0.0));
  Spit(dir / "t.json",
       Json{{"store", "store"}, {"train", FastTrain()}}.dump());
  ASSERT_EQ(RunFva(Cmd("train", dir / "t.json", dir / "run")), 0);
  Spit(dir / "empty.tsv", "face_record_id\tvoice_record_id\tlabel\n");
  Spit(dir / "e.json", Json{{"checkpoint", "run/checkpoint.fvh"},
                            {"trials", "empty.tsv"},
                            {"store", "store"}}
                           .dump());
  EXPECT_EQ(RunFva(Cmd("eval", dir / "e.json", dir / "ev")), 4);
}

TEST(CliTest, EvalUnknownRecordIsLookupError) {
  TempDir dir("cli_lookup");
  MakeStore(dir, SmallSynth(8, 0.0));
  Spit(dir / "t.json",
       Json{{"store", "store"}, {"train", FastTrain()}}.dump());
  ASSERT_EQ(RunFva(Cmd("train", dir / "t.json", dir / "run")), 0);
  Spit(dir / "bad.tsv",
       "face_record_id\tvoice_record_id\tlabel\n"
       "nobody_f000\tnobody_v000\tsame\n");
  Spit(dir / "e.json", Json{{"checkpoint", "run/checkpoint.fvh"},
                            {"trials", "bad.tsv"},
                            {"store", "store"}}
                           .dump());
  const auto [code, text] = RunFvaCapture(Cmd("eval", dir / "e.json", dir / "ev"));
  EXPECT_EQ(code, 4);
  EXPECT_NE(text.find("nobody_f000"), std::string::npos) << text;
}

TEST(CliTest, CrossValReportsEveryFold) {
  TempDir dir("cli_cv");
  MakeStore(dir, SmallSynth(21, 0.05));
  Spit(dir / "c.json", Json{{"store", "store"},
                            {"n_folds", 7},
                            {"train", FastTrain()}}
                           .dump());
  ASSERT_EQ(RunFva(Cmd("crossval", dir / "c.json", dir / "cv")), 0);
  const Json rep = ReadJson(dir / "cv/report.json");
  ASSERT_EQ(rep["result"]["folds"].size(), 7u);
  ASSERT_EQ(rep["result"]["fold_eers"].size(), 7u);
  double sum = 0.0;
  for (const auto& e : rep["result"]["fold_eers"]) sum += e.get<double>();
  EXPECT_NEAR(rep["result"]["mean_eer"].get<double>(), sum / 7.0, 1e-12);
  for (int f = 0; f < 7; ++f) {
    EXPECT_TRUE(fs::exists(dir / ("cv/fold_" + std::to_string(f) + ".fvh")));
  }
}

TEST(CliTest, ScenariosRejectInjectedLanguage) {
  TempDir dir("cli_scen");
  Json pre = SmallSynth(16, 0.05);
  pre["synth"]["languages"] = {{"en", 1.0}, {"de", 1.0}};
  pre["synth"]["language_assignment"] = "per_speaker";
  pre["synth"]["speaker_prefix"] = "pre";
  MakeStore(dir, pre);
  fs::rename(dir / "store", dir / "pretrain");
  Json ft = pre;
  ft["seed"] = 9;
  ft["synth"]["speaker_prefix"] = "ft";
  MakeStore(dir, ft);
  fs::rename(dir / "store", dir / "finetune");

  Json cfg{{"corpora", {{"pretrain", "pretrain"}, {"finetune", "finetune"}}},
           {"plans", {"english_unheard"}},
           {"n_folds", 2},
           {"n_eval_speakers", 4},
           {"auto_filter", false},
           {"pretrain", FastTrain()},
           {"finetune", FastTrain()}};
  Spit(dir / "sc.json", cfg.dump());
  const auto [code, text] =
      RunFvaCapture(Cmd("scenarios", dir / "sc.json", dir / "out"));
  EXPECT_EQ(code, 3);
  EXPECT_NE(text.find("excluded language 'en'"), std::string::npos) << text;
}

TEST(CliTest, XAttnReportNamesBothArchitectures) {
  TempDir dir("cli_xattn");
  MakeStore(dir, SmallSynth(10, 0.0));
  Json cfg{{"store", "store"},
           {"holdout_fraction", 0.3},
           {"xattn",
            {{"d_model", 8}, {"n_heads", 2}, {"max_steps", 40},
             {"eval_every", 20}, {"batch_size", 16}}},
           {"train", FastTrain()}};
  Spit(dir / "x.json", cfg.dump());
  ASSERT_EQ(RunFva(Cmd("xattn", dir / "x.json", dir / "xa")), 0);
  const Json rep = ReadJson(dir / "xa/report.json");
  EXPECT_EQ(rep["architecture"], "cross-attention");
  EXPECT_TRUE(rep.contains("comparison"));
  EXPECT_TRUE(fs::exists(dir / "xa/checkpoint.fvh"));
  EXPECT_TRUE(fs::exists(dir / "xa/baseline.fvh"));

  // The eval command accepts the cross-attention checkpoint too.
  Spit(dir / "e.json", Json{{"checkpoint", "xa/checkpoint.fvh"},
                            {"trials", "xa/trials.tsv"},
                            {"store", "store"}}
                           .dump());
  ASSERT_EQ(RunFva(Cmd("eval", dir / "e.json", dir / "ev")), 0);
  EXPECT_EQ(ReadJson(dir / "ev/report.json")["architecture"],
            "cross-attention");
  EXPECT_EQ(Slurp(dir / "ev/scores.tsv"), Slurp(dir / "xa/scores.tsv"));
}

}  // namespace
}  // namespace fva
