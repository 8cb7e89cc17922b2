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

#include "fva/embedstore/concat.h"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "fva/common/error.h"

namespace fva {

const char* SideName(Side side) {
  return side == Side::kVoice ? "voice" : "face";
}

ModalityKind IdentityModality(Side side) {
  return side == Side::kVoice ? ModalityKind::kVoiceSpeaker
                              : ModalityKind::kFaceIdentity;
}

ModalityKind AgeGenderModality(Side side) {
  return side == Side::kVoice ? ModalityKind::kVoiceAgeGender
                              : ModalityKind::kFaceAgeGender;
}

std::string MakeRecordId(std::string_view owner_id, ModalityKind m) {
  std::string id(owner_id);
  id += '#';
  id += ModalityName(m);
  return id;
}

std::string_view OwnerOf(std::string_view record_id) {
  const size_t pos = record_id.rfind('#');
  return pos == std::string_view::npos ? record_id : record_id.substr(0, pos);
}

namespace {

void AppendUpcast(const std::vector<float>& src, std::vector<double>* dst) {
  dst->insert(dst->end(), src.begin(), src.end());
}

}  // namespace

AssembledSet AssembleConcatInputs(const EmbeddingStore& store, Side side,
                                  Pairing pairing) {
  const ModalityKind id_mod = IdentityModality(side);
  const ModalityKind ag_mod = AgeGenderModality(side);
  AssembledSet out;
  out.side = side;
  out.dim = store.dim(id_mod) + store.dim(ag_mod);

  // owner -> (identity record, age-gender record), in first-seen order.
  std::vector<std::string> owners;
  std::unordered_map<std::string, std::pair<const EmbeddingRecord*,
                                            const EmbeddingRecord*>>
      parts;
  for (const auto& r : store.records()) {
    if (r.modality != id_mod && r.modality != ag_mod) continue;
    std::string owner(OwnerOf(r.record_id));
    auto [it, inserted] = parts.try_emplace(owner, nullptr, nullptr);
    if (inserted) owners.push_back(owner);
    (r.modality == id_mod ? it->second.first : it->second.second) = &r;
  }

  std::vector<std::pair<const EmbeddingRecord*, const EmbeddingRecord*>> pairs;
  for (const auto& owner : owners) {
    const auto& [id_rec, ag_rec] = parts.at(owner);
    if (id_rec == nullptr || ag_rec == nullptr) {
      out.skipped.push_back(
          {owner, std::string("missing ") +
                      ModalityName(id_rec == nullptr ? id_mod : ag_mod)});
      continue;
    }
    if (id_rec->speaker_id != ag_rec->speaker_id) {
      out.skipped.push_back({owner, "component speaker ids disagree"});
      continue;
    }
    pairs.emplace_back(id_rec, ag_rec);
  }

  if (pairing == Pairing::kPerOwner) {
    for (const auto& [id_rec, ag_rec] : pairs) {
      ConcatInput in;
      in.owner_id = std::string(OwnerOf(id_rec->record_id));
      in.speaker_id = id_rec->speaker_id;
      in.language = id_rec->language;
      in.vec.reserve(out.dim);
      AppendUpcast(id_rec->vector, &in.vec);
      AppendUpcast(ag_rec->vector, &in.vec);
      out.items.push_back(std::move(in));
    }
  } else {
    std::vector<std::string> speakers;
    std::map<std::string, std::pair<std::vector<double>, size_t>> sums;
    std::map<std::string, std::string> lang;
    for (const auto& [id_rec, ag_rec] : pairs) {
      auto [it, inserted] = sums.try_emplace(
          id_rec->speaker_id, std::vector<double>(out.dim, 0.0), 0);
      if (inserted) {
        speakers.push_back(id_rec->speaker_id);
        lang[id_rec->speaker_id] = id_rec->language;
      }
      auto& acc = it->second.first;
      const size_t id_dim = id_rec->vector.size();
      for (size_t i = 0; i < id_dim; ++i) acc[i] += id_rec->vector[i];
      for (size_t i = 0; i < ag_rec->vector.size(); ++i) {
        acc[id_dim + i] += ag_rec->vector[i];
      }
      ++it->second.second;
    }
    for (const auto& spk : speakers) {
      auto& [acc, n] = sums.at(spk);
      for (double& v : acc) v /= static_cast<double>(n);
      out.items.push_back({spk, spk, lang.at(spk), std::move(acc)});
    }
  }

  if (out.items.empty()) {
    throw Error(ErrorKind::kSchema,
                std::string("no assemblable ") + SideName(side) +
                    " inputs in store '" + store.dataset_name() + "'");
  }
  return out;
}

AssembledSet SelectSpeakers(const AssembledSet& set,
                            const std::vector<std::string>& speakers) {
  const std::set<std::string> keep(speakers.begin(), speakers.end());
  AssembledSet out;
  out.side = set.side;
  out.dim = set.dim;
  for (const auto& item : set.items) {
    if (keep.count(item.speaker_id)) out.items.push_back(item);
  }
  return out;
}

std::vector<std::string> SpeakersOf(const AssembledSet& set) {
  std::set<std::string> s;
  for (const auto& item : set.items) s.insert(item.speaker_id);
  return {s.begin(), s.end()};
}

Mat StackInputs(const AssembledSet& set, const std::vector<size_t>& indices) {
  Mat m(indices.size(), set.dim);
  for (size_t r = 0; r < indices.size(); ++r) {
    const auto& v = set.items.at(indices[r]).vec;
    std::copy(v.begin(), v.end(), m.Row(r).begin());
  }
  return m;
}

Mat StackAll(const AssembledSet& set) {
  std::vector<size_t> idx(set.items.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return StackInputs(set, idx);
}

}  // namespace fva
