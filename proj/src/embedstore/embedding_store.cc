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

#include "fva/embedstore/embedding_store.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <sstream>

#include "fva/common/binary_io.h"
#include "fva/common/error.h"

namespace fva {

namespace fs = std::filesystem;

const char* ModalityName(ModalityKind m) {
  switch (m) {
    case ModalityKind::kVoiceSpeaker: return "voice_speaker";
    case ModalityKind::kVoiceAgeGender: return "voice_agegender";
    case ModalityKind::kFaceIdentity: return "face_identity";
    case ModalityKind::kFaceAgeGender: return "face_agegender";
  }
  return "unknown";
}

ModalityKind ParseModality(std::string_view name) {
  for (ModalityKind m : kAllModalities) {
    if (name == ModalityName(m)) return m;
  }
  throw Error(ErrorKind::kSchema,
              "unknown modality '" + std::string(name) + "'");
}

namespace {

bool IsLowercaseTag(std::string_view lang) {
  if (lang.empty()) return false;
  return std::all_of(lang.begin(), lang.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
}

}  // namespace

EmbeddingStore EmbeddingStore::FromRecords(std::vector<EmbeddingRecord> records,
                                           std::string dataset_name) {
  if (records.empty()) {
    throw Error(ErrorKind::kSchema, "store '" + dataset_name + "' is empty");
  }
  EmbeddingStore store;
  store.dataset_name_ = std::move(dataset_name);
  for (size_t i = 0; i < records.size(); ++i) {
    const EmbeddingRecord& r = records[i];
    if (r.record_id.empty() || r.record_id.size() > 0xFFFF) {
      throw Error(ErrorKind::kSchema,
                  "record id length must be in [1, 65535]: '" +
                      r.record_id.substr(0, 64) + "'");
    }
    if (r.record_id.find_first_of("\t\n") != std::string::npos ||
        r.speaker_id.empty() ||
        r.speaker_id.find_first_of("\t\n") != std::string::npos) {
      throw Error(ErrorKind::kSchema,
                  "record '" + r.record_id + "' has an invalid id field");
    }
    if (!IsLowercaseTag(r.language)) {
      throw Error(ErrorKind::kSchema, "record '" + r.record_id +
                                          "' language tag '" + r.language +
                                          "' is not a lowercase subtag");
    }
    size_t& dim = store.dims_[ModalityIndex(r.modality)];
    if (r.vector.empty()) {
      throw Error(ErrorKind::kSchema,
                  "record '" + r.record_id + "' has an empty vector");
    }
    if (dim == 0) {
      dim = r.vector.size();
    } else if (dim != r.vector.size()) {
      std::ostringstream os;
      os << "record '" << r.record_id << "' has dim " << r.vector.size()
         << " but " << ModalityName(r.modality) << " is declared " << dim;
      throw Error(ErrorKind::kSchema, os.str());
    }
    if (!store.index_.emplace(r.record_id, i).second) {
      throw Error(ErrorKind::kSchema,
                  "duplicate record id '" + r.record_id + "'");
    }
  }
  store.records_ = std::move(records);
  return store;
}

const EmbeddingRecord* EmbeddingStore::Find(std::string_view record_id) const {
  auto it = index_.find(std::string(record_id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

Manifest EmbeddingStore::GetManifest() const {
  Manifest m;
  m.dataset_name = dataset_name_;
  m.entries.reserve(records_.size());
  for (const auto& r : records_) {
    m.entries.push_back({r.record_id, r.speaker_id, r.language, r.modality,
                         static_cast<uint32_t>(r.vector.size())});
  }
  return m;
}

EmbeddingStore EmbeddingStore::Restrict(const Manifest& manifest) const {
  std::vector<EmbeddingRecord> kept;
  kept.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    const EmbeddingRecord* r = Find(e.record_id);
    if (r == nullptr) {
      throw Error(ErrorKind::kLookup, "manifest record '" + e.record_id +
                                          "' not in store '" + dataset_name_ +
                                          "'");
    }
    kept.push_back(*r);
  }
  return FromRecords(std::move(kept), dataset_name_);
}

void ValidateDims(const EmbeddingStore& store, DimMode mode) {
  for (ModalityKind m : kAllModalities) {
    const size_t d = store.dim(m);
    if (d == 0) continue;
    if (mode == DimMode::kBackboneShaped &&
        d != kBackboneDims[ModalityIndex(m)]) {
      std::ostringstream os;
      os << ModalityName(m) << " dim " << d << " != backbone-shaped "
         << kBackboneDims[ModalityIndex(m)];
      throw Error(ErrorKind::kSchema, os.str());
    }
  }
}

std::string EncodeModalityFile(const ModalityFile& file) {
  if (file.ids.size() != file.vectors.size()) {
    throw Error(ErrorKind::kSchema, "id/vector count mismatch");
  }
  ByteWriter w;
  size_t total = 17;
  for (const auto& id : file.ids) total += 2 + id.size() + 4 * file.dim;
  w.Reserve(total);
  w.Bytes(kStoreMagic);
  w.U32(kStoreVersion);
  w.U8(static_cast<uint8_t>(file.modality));
  w.U32(file.dim);
  w.U32(static_cast<uint32_t>(file.ids.size()));
  for (size_t i = 0; i < file.ids.size(); ++i) {
    if (file.vectors[i].size() != file.dim) {
      throw Error(ErrorKind::kSchema, "record '" + file.ids[i] +
                                          "' vector length disagrees with "
                                          "file dim");
    }
    w.U16(static_cast<uint16_t>(file.ids[i].size()));
    w.Bytes(file.ids[i]);
    w.F32Array(file.vectors[i]);
  }
  return w.Release();
}

ModalityFile DecodeModalityFile(std::string_view bytes,
                                const std::string& source) {
  ByteReader r(bytes, source);
  if (r.Bytes(4, "magic") != kStoreMagic) {
    throw Error(ErrorKind::kFormat, source + ": bad magic (expected FVE1)");
  }
  const uint32_t version = r.U32("version");
  if (version != kStoreVersion) {
    throw Error(ErrorKind::kFormat, source + ": unsupported version " +
                                        std::to_string(version));
  }
  ModalityFile file;
  const uint8_t code = r.U8("modality code");
  if (code > 3) {
    throw Error(ErrorKind::kFormat, source + ": modality code " +
                                        std::to_string(code) +
                                        " out of range");
  }
  file.modality = static_cast<ModalityKind>(code);
  file.dim = r.U32("dim");
  const uint32_t count = r.U32("count");
  if (file.dim == 0 && count > 0) {
    throw Error(ErrorKind::kSchema, source + ": zero dim");
  }
  file.ids.reserve(count);
  file.vectors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t len = r.U16("id length");
    file.ids.emplace_back(r.Bytes(len, "record id"));
    std::vector<float> v(file.dim);
    r.F32Array(v, "vector");
    file.vectors.push_back(std::move(v));
  }
  if (!r.AtEnd()) {
    throw Error(ErrorKind::kFormat, source + ": trailing bytes at offset " +
                                        std::to_string(r.offset()));
  }
  return file;
}

std::string FormatManifestTsv(const Manifest& manifest) {
  std::ostringstream os;
  os << "record_id\tspeaker_id\tlanguage\tmodality\tdim\n";
  for (const auto& e : manifest.entries) {
    os << e.record_id << '\t' << e.speaker_id << '\t' << e.language << '\t'
       << ModalityName(e.modality) << '\t' << e.dim << '\n';
  }
  return os.str();
}

Manifest ParseManifestTsv(std::string_view text, const std::string& source) {
  Manifest m;
  size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != "record_id\tspeaker_id\tlanguage\tmodality\tdim") {
        throw Error(ErrorKind::kFormat, source + ": bad manifest header");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 5) {
      throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line_no) +
                                          ": expected 5 columns, got " +
                                          std::to_string(cols.size()));
    }
    ManifestEntry e;
    e.record_id = cols[0];
    e.speaker_id = cols[1];
    e.language = cols[2];
    e.modality = ParseModality(cols[3]);
    auto [ptr, ec] =
        std::from_chars(cols[4].data(), cols[4].data() + cols[4].size(), e.dim);
    if (ec != std::errc() || ptr != cols[4].data() + cols[4].size()) {
      throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line_no) +
                                          ": bad dim '" + std::string(cols[4]) +
                                          "'");
    }
    m.entries.push_back(std::move(e));
  }
  if (!saw_header) {
    throw Error(ErrorKind::kFormat, source + ": empty manifest");
  }
  return m;
}

std::string StoreFileName(ModalityKind m) {
  return std::string(ModalityName(m)) + ".fve";
}

void WriteStore(const EmbeddingStore& store, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir + ": " + ec.message());
  for (ModalityKind m : kAllModalities) {
    if (store.dim(m) == 0) continue;
    ModalityFile file;
    file.modality = m;
    file.dim = static_cast<uint32_t>(store.dim(m));
    for (const auto& r : store.records()) {
      if (r.modality != m) continue;
      file.ids.push_back(r.record_id);
      file.vectors.push_back(r.vector);
    }
    WriteFileAtomic((fs::path(dir) / StoreFileName(m)).string(),
                    EncodeModalityFile(file));
  }
  WriteFileAtomic((fs::path(dir) / kManifestFileName).string(),
                  FormatManifestTsv(store.GetManifest()));
}

EmbeddingStore ReadStore(const std::string& dir) {
  const fs::path root(dir);
  const std::string manifest_path = (root / kManifestFileName).string();
  Manifest manifest =
      ParseManifestTsv(ReadFileBytes(manifest_path), manifest_path);

  std::array<std::optional<ModalityFile>, 4> files;
  std::array<std::unordered_map<std::string, size_t>, 4> file_index;
  for (const auto& e : manifest.entries) {
    auto& slot = files[ModalityIndex(e.modality)];
    if (slot) continue;
    const std::string path = (root / StoreFileName(e.modality)).string();
    slot = DecodeModalityFile(ReadFileBytes(path), path);
    if (slot->modality != e.modality) {
      throw Error(ErrorKind::kSchema, path + ": modality code mismatch");
    }
    auto& idx = file_index[ModalityIndex(e.modality)];
    for (size_t i = 0; i < slot->ids.size(); ++i) idx.emplace(slot->ids[i], i);
  }

  std::vector<EmbeddingRecord> records;
  records.reserve(manifest.entries.size());
  for (auto& e : manifest.entries) {
    const size_t mi = ModalityIndex(e.modality);
    ModalityFile& file = *files[mi];
    if (e.dim != file.dim) {
      std::ostringstream os;
      os << "manifest dim " << e.dim << " for '" << e.record_id
         << "' disagrees with file dim " << file.dim;
      throw Error(ErrorKind::kSchema, os.str());
    }
    auto it = file_index[mi].find(e.record_id);
    if (it == file_index[mi].end()) {
      throw Error(ErrorKind::kSchema, "record '" + e.record_id +
                                          "' listed in manifest but missing "
                                          "from " +
                                          StoreFileName(e.modality));
    }
    records.push_back({std::move(e.record_id), std::move(e.speaker_id),
                       std::move(e.language), e.modality,
                       std::move(file.vectors[it->second])});
  }
  for (size_t mi = 0; mi < 4; ++mi) {
    if (files[mi] && files[mi]->ids.size() != file_index[mi].size()) {
      throw Error(ErrorKind::kSchema, "duplicate ids in " +
                                          StoreFileName(kAllModalities[mi]));
    }
  }
  size_t per_file_total = 0;
  for (const auto& f : files) per_file_total += f ? f->ids.size() : 0;
  if (per_file_total != records.size()) {
    throw Error(ErrorKind::kSchema,
                "store files hold records absent from the manifest");
  }
  std::string name = root.filename().string();
  if (name.empty()) name = root.parent_path().filename().string();
  return EmbeddingStore::FromRecords(std::move(records), std::move(name));
}

Manifest FilterExcludeLanguage(const Manifest& manifest,
                               std::string_view excluded) {
  Manifest out;
  out.dataset_name = manifest.dataset_name;
  for (const auto& e : manifest.entries) {
    if (e.language != excluded) out.entries.push_back(e);
  }
  return out;
}

std::vector<std::string> EntriesWithLanguage(const Manifest& manifest,
                                             std::string_view language) {
  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (e.language == language) ids.push_back(e.record_id);
  }
  return ids;
}

}  // namespace fva
