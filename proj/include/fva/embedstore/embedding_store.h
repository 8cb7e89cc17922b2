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

#ifndef FVA_EMBEDSTORE_EMBEDDING_STORE_H_
#define FVA_EMBEDSTORE_EMBEDDING_STORE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fva {

// Codes are the on-disk modality byte; do not reorder.
enum class ModalityKind : uint8_t {
  kVoiceSpeaker = 0,
  kVoiceAgeGender = 1,
  kFaceIdentity = 2,
  kFaceAgeGender = 3,
};

inline constexpr std::array<ModalityKind, 4> kAllModalities = {
    ModalityKind::kVoiceSpeaker, ModalityKind::kVoiceAgeGender,
    ModalityKind::kFaceIdentity, ModalityKind::kFaceAgeGender};

// Widths of the frozen upstream embeddings, indexed by ModalityKind.
inline constexpr std::array<size_t, 4> kBackboneDims = {6144, 1536, 4096,
                                                        768};

// "voice_speaker", "voice_agegender", "face_identity", "face_agegender".
const char* ModalityName(ModalityKind m);
ModalityKind ParseModality(std::string_view name);
inline size_t ModalityIndex(ModalityKind m) { return static_cast<size_t>(m); }

enum class DimMode { kGeneric, kBackboneShaped };

struct EmbeddingRecord {
  std::string record_id;
  std::string speaker_id;
  std::string language;
  ModalityKind modality = ModalityKind::kVoiceSpeaker;
  std::vector<float> vector;
};

struct ManifestEntry {
  std::string record_id;
  std::string speaker_id;
  std::string language;
  ModalityKind modality = ModalityKind::kVoiceSpeaker;
  uint32_t dim = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;
};

// Immutable set of records with one declared dim per present modality.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Validates: non-empty, unique record ids, one dim per modality, lowercase
  // language tags. Throws a schema error otherwise.
  static EmbeddingStore FromRecords(std::vector<EmbeddingRecord> records,
                                    std::string dataset_name);

  const std::string& dataset_name() const { return dataset_name_; }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  // 0 when the modality has no records.
  size_t dim(ModalityKind m) const { return dims_[ModalityIndex(m)]; }

  const EmbeddingRecord* Find(std::string_view record_id) const;
  Manifest GetManifest() const;

  // Keeps only the records listed in `manifest`, in manifest order.
  EmbeddingStore Restrict(const Manifest& manifest) const;

 private:
  std::string dataset_name_;
  std::vector<EmbeddingRecord> records_;
  std::array<size_t, 4> dims_{};
  std::unordered_map<std::string, size_t> index_;
};

// Throws a schema error if the store's declared dims disagree with the
// backbone widths (backbone-shaped mode) or any dim is zero.
void ValidateDims(const EmbeddingStore& store, DimMode mode);

// --- binary container, one file per modality -----------------------------
// magic "FVE1" | version u32 = 1 | modality u8 | dim u32 | count u32 |
// count x (id_len u16 | id bytes | dim x f32), all little-endian.

inline constexpr std::string_view kStoreMagic = "FVE1";
inline constexpr uint32_t kStoreVersion = 1;

struct ModalityFile {
  ModalityKind modality = ModalityKind::kVoiceSpeaker;
  uint32_t dim = 0;
  std::vector<std::string> ids;
  std::vector<std::vector<float>> vectors;
};

std::string EncodeModalityFile(const ModalityFile& file);
ModalityFile DecodeModalityFile(std::string_view bytes,
                                const std::string& source);

// --- manifest TSV ---------------------------------------------------------
// Header: record_id<TAB>speaker_id<TAB>language<TAB>modality<TAB>dim

std::string FormatManifestTsv(const Manifest& manifest);
Manifest ParseManifestTsv(std::string_view text, const std::string& source);

// Writes manifest.tsv plus <modality>.fve for each present modality.
void WriteStore(const EmbeddingStore& store, const std::string& dir);
// The dataset name is the directory's basename.
EmbeddingStore ReadStore(const std::string& dir);

std::string StoreFileName(ModalityKind m);
inline constexpr std::string_view kManifestFileName = "manifest.tsv";

// Drops every entry whose language equals `excluded`; order is preserved.
Manifest FilterExcludeLanguage(const Manifest& manifest,
                               std::string_view excluded);

// Ids of entries in `manifest` tagged with `language`.
std::vector<std::string> EntriesWithLanguage(const Manifest& manifest,
                                             std::string_view language);

}  // namespace fva

#endif  // FVA_EMBEDSTORE_EMBEDDING_STORE_H_
