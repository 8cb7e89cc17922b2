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

#include "fva/synthgen/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fva/common/binary_io.h"
#include "fva/common/error.h"
#include "fva/diffcore/rng.h"
#include "fva/embedstore/concat.h"

namespace fva {

namespace fs = std::filesystem;

namespace {

bool IsIdentityModality(ModalityKind m) {
  return m == ModalityKind::kVoiceSpeaker || m == ModalityKind::kFaceIdentity;
}

Mat GaussianMat(Rng& rng, size_t rows, size_t cols, double scale) {
  Mat m(rows, cols);
  for (double& v : m.data()) v = scale * rng.Normal();
  return m;
}

size_t DrawLanguage(Rng& rng, const std::vector<LanguageWeight>& langs,
                    double total) {
  double u = rng.Uniform() * total;
  for (size_t i = 0; i < langs.size(); ++i) {
    if (u < langs[i].weight) return i;
    u -= langs[i].weight;
  }
  return langs.size() - 1;
}

}  // namespace

void ValidateSynthConfig(const SynthConfig& cfg) {
  std::ostringstream os;
  if (cfg.n_speakers == 0) {
    os << "n_speakers must be >= 1";
  } else if (cfg.latent_dim == 0) {
    os << "latent_dim must be >= 1";
  } else if (cfg.records_per_speaker == 0) {
    os << "records_per_speaker must be >= 1";
  } else if (!(cfg.noise_sigma >= 0.0)) {
    os << "noise_sigma must be >= 0";
  } else if (!(cfg.projection_shift >= 0.0)) {
    os << "projection_shift must be >= 0";
  } else if (cfg.languages.empty()) {
    os << "at least one language is required";
  } else {
    for (size_t d : cfg.dims) {
      if (d == 0) {
        os << "modality dims must be >= 1";
        break;
      }
    }
    for (const auto& l : cfg.languages) {
      if (!(l.weight > 0.0) || l.language.empty()) {
        os << "language weights must be > 0 with non-empty tags";
        break;
      }
    }
  }
  if (!os.str().empty()) throw Error(ErrorKind::kConfig, os.str());
}

std::string SyntheticSpeakerId(const SynthConfig& cfg, size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return cfg.speaker_prefix + buf;
}

SynthDataset Generate(const SynthConfig& cfg) {
  ValidateSynthConfig(cfg);
  const size_t k = cfg.latent_dim;
  Rng latent_rng(DeriveSeed(cfg.seed, "latent"));
  Rng proj_rng(DeriveSeed(cfg.projection_seed.value_or(cfg.seed), "projection"));
  Rng shift_rng(DeriveSeed(cfg.shift_seed, "shift"));
  Rng noise_rng(DeriveSeed(cfg.seed, "noise"));
  Rng lang_rng(DeriveSeed(cfg.seed, "language"));

  GroundTruth gt;
  gt.latents = GaussianMat(latent_rng, cfg.n_speakers, k, 1.0);
  for (size_t i = 0; i < cfg.n_speakers; ++i) {
    gt.speakers.push_back(SyntheticSpeakerId(cfg, i));
    gt.ages.push_back(18.0 + 62.0 * latent_rng.Uniform());
    gt.genders.push_back(latent_rng.Uniform() < 0.5 ? 0 : 1);
  }
  for (ModalityKind m : kAllModalities) {
    const size_t in = IsIdentityModality(m) ? k : 2;
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    Mat proj = GaussianMat(proj_rng, cfg.dims[ModalityIndex(m)], in, scale);
    if (cfg.projection_shift > 0.0) {
      proj += GaussianMat(shift_rng, proj.rows(), proj.cols(),
                          cfg.projection_shift * scale);
    }
    gt.projections[ModalityIndex(m)] = std::move(proj);
  }

  double total_weight = 0.0;
  for (const auto& l : cfg.languages) total_weight += l.weight;

  std::vector<EmbeddingRecord> records;
  records.reserve(cfg.n_speakers * cfg.records_per_speaker * 4);
  auto emit = [&](size_t spk, const std::string& owner, Side side,
                  const std::string& lang) {
    for (ModalityKind m : {IdentityModality(side), AgeGenderModality(side)}) {
      const Mat& proj = gt.projections[ModalityIndex(m)];
      std::vector<double> source;
      if (IsIdentityModality(m)) {
        auto z = gt.latents.Row(spk);
        source.assign(z.begin(), z.end());
      } else {
        source = {(gt.ages[spk] - 18.0) / 62.0,
                  static_cast<double>(gt.genders[spk])};
      }
      EmbeddingRecord r;
      r.record_id = MakeRecordId(owner, m);
      r.speaker_id = gt.speakers[spk];
      r.language = lang;
      r.modality = m;
      r.vector.resize(proj.rows());
      for (size_t d = 0; d < proj.rows(); ++d) {
        const double clean = Dot(proj.Row(d), source);
        r.vector[d] =
            static_cast<float>(clean + cfg.noise_sigma * noise_rng.Normal());
      }
      records.push_back(std::move(r));
    }
    gt.owner_speaker[owner] = gt.speakers[spk];
  };

  for (size_t i = 0; i < cfg.n_speakers; ++i) {
    const std::string& spk = gt.speakers[i];
    std::string speaker_lang;
    if (cfg.language_assignment == LanguageAssignment::kPerSpeaker) {
      speaker_lang =
          cfg.languages[DrawLanguage(lang_rng, cfg.languages, total_weight)]
              .language;
    }
    for (Side side : {Side::kVoice, Side::kFace}) {
      for (size_t j = 0; j < cfg.records_per_speaker; ++j) {
        char suffix[24];
        std::snprintf(suffix, sizeof(suffix), "_%c%03zu",
                      side == Side::kVoice ? 'v' : 'f', j);
        const std::string lang =
            cfg.language_assignment == LanguageAssignment::kPerSpeaker
                ? speaker_lang
                : cfg.languages[DrawLanguage(lang_rng, cfg.languages,
                                             total_weight)]
                      .language;
        emit(i, spk + suffix, side, lang);
      }
    }
  }

  return {EmbeddingStore::FromRecords(std::move(records), cfg.dataset_name),
          std::move(gt)};
}

bool OracleSameSpeaker(const GroundTruth& truth, const std::string& face_id,
                       const std::string& voice_id) {
  auto lookup = [&](const std::string& id) -> const std::string& {
    auto it = truth.owner_speaker.find(std::string(OwnerOf(id)));
    if (it == truth.owner_speaker.end()) {
      throw Error(ErrorKind::kLookup, "unknown record '" + id + "'");
    }
    return it->second;
  };
  return lookup(face_id) == lookup(voice_id);
}

std::string EncodeGroundTruth(const GroundTruth& truth) {
  ModalityFile file;
  file.modality = ModalityKind::kVoiceSpeaker;
  file.dim = static_cast<uint32_t>(truth.latents.cols() + 2);
  for (size_t i = 0; i < truth.speakers.size(); ++i) {
    file.ids.push_back("gt:" + truth.speakers[i]);
    std::vector<float> v;
    for (double z : truth.latents.Row(i)) v.push_back(static_cast<float>(z));
    v.push_back(static_cast<float>((truth.ages[i] - 18.0) / 62.0));
    v.push_back(static_cast<float>(truth.genders[i]));
    file.vectors.push_back(std::move(v));
  }
  return EncodeModalityFile(file);
}

GroundTruth ReadGroundTruth(const std::string& dir) {
  const std::string path = (fs::path(dir) / kGroundTruthFileName).string();
  ModalityFile file = DecodeModalityFile(ReadFileBytes(path), path);
  if (file.dim < 3) {
    throw Error(ErrorKind::kSchema, path + ": ground-truth dim too small");
  }
  GroundTruth gt;
  const size_t k = file.dim - 2;
  gt.latents = Mat(file.ids.size(), k);
  for (size_t i = 0; i < file.ids.size(); ++i) {
    if (file.ids[i].rfind("gt:", 0) != 0) {
      throw Error(ErrorKind::kFormat, path + ": bad ground-truth id '" +
                                          file.ids[i] + "'");
    }
    gt.speakers.push_back(file.ids[i].substr(3));
    for (size_t d = 0; d < k; ++d) gt.latents(i, d) = file.vectors[i][d];
    gt.ages.push_back(18.0 + 62.0 * file.vectors[i][k]);
    gt.genders.push_back(file.vectors[i][k + 1] > 0.5f ? 1 : 0);
  }
  const std::string manifest_path =
      (fs::path(dir) / kManifestFileName).string();
  Manifest manifest =
      ParseManifestTsv(ReadFileBytes(manifest_path), manifest_path);
  for (const auto& e : manifest.entries) {
    gt.owner_speaker[std::string(OwnerOf(e.record_id))] = e.speaker_id;
  }
  return gt;
}

void WriteSynthDataset(const SynthDataset& ds, const std::string& dir) {
  WriteStore(ds.store, dir);
  WriteFileAtomic((fs::path(dir) / kGroundTruthFileName).string(),
                  EncodeGroundTruth(ds.truth));
}

}  // namespace fva
