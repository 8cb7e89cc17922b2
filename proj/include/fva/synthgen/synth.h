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

#ifndef FVA_SYNTHGEN_SYNTH_H_
#define FVA_SYNTHGEN_SYNTH_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fva/diffcore/mat.h"
#include "fva/embedstore/embedding_store.h"

namespace fva {

struct LanguageWeight {
  std::string language;
  double weight = 1.0;
};

enum class LanguageAssignment {
  kPerRecord,   // every utterance / image draws its own language
  kPerSpeaker,  // one draw per speaker, shared by all of their records
};

inline constexpr std::array<size_t, 4> kSmallModeDims = {64, 16, 48, 8};

struct SynthConfig {
  size_t n_speakers = 30;
  size_t latent_dim = 16;
  // Indexed by ModalityKind.
  std::array<size_t, 4> dims = kSmallModeDims;
  double noise_sigma = 0.01;
  size_t records_per_speaker = 10;
  uint64_t seed = 1;
  std::vector<LanguageWeight> languages = {{"en", 1.0}, {"de", 1.0}};
  LanguageAssignment language_assignment = LanguageAssignment::kPerRecord;
  std::string speaker_prefix = "spk";
  std::string dataset_name = "synthetic";
  // Projections come from this seed when set, else from `seed`. Two corpora
  // sharing a projection seed share the modality geometry.
  std::optional<uint64_t> projection_seed;
  // Std-dev of a Gaussian perturbation added to every projection entry
  // (scaled like the projection itself); models a recording-domain shift.
  double projection_shift = 0.0;
  uint64_t shift_seed = 0;
};

void ValidateSynthConfig(const SynthConfig& cfg);

// Hidden generative structure behind a synthetic corpus.
struct GroundTruth {
  std::vector<std::string> speakers;
  Mat latents;  // n_speakers x latent_dim
  std::vector<double> ages;
  std::vector<int> genders;
  // Identity modalities: dim x latent_dim. Age-gender modalities: dim x 2.
  std::array<Mat, 4> projections;
  // owner id -> speaker id for every utterance / image.
  std::map<std::string, std::string> owner_speaker;
};

struct SynthDataset {
  EmbeddingStore store;
  GroundTruth truth;
};

// identity vector  = G_m z + noise_sigma ε
// age-gender vector = H_m [(age - 18) / 62, gender] + noise_sigma ε
SynthDataset Generate(const SynthConfig& cfg);

// Speaker id for index i: prefix followed by a 3-digit zero-padded number.
std::string SyntheticSpeakerId(const SynthConfig& cfg, size_t i);

// True when both ids (owner or record ids) belong to the same speaker;
// unknown ids throw a lookup error.
bool OracleSameSpeaker(const GroundTruth& truth, const std::string& face_id,
                       const std::string& voice_id);

// Sidecar written next to the store: an FVE1 container (modality code 0)
// with one record per speaker, id "gt:<speaker>", vector
// [latent..., age_norm, gender].
inline constexpr std::string_view kGroundTruthFileName = "ground_truth.fve";
std::string EncodeGroundTruth(const GroundTruth& truth);
// Reads the sidecar plus the store manifest for the owner map. Projections
// are not persisted.
GroundTruth ReadGroundTruth(const std::string& dir);

void WriteSynthDataset(const SynthDataset& ds, const std::string& dir);

}  // namespace fva

#endif  // FVA_SYNTHGEN_SYNTH_H_
