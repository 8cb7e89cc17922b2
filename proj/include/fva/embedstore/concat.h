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

#ifndef FVA_EMBEDSTORE_CONCAT_H_
#define FVA_EMBEDSTORE_CONCAT_H_

#include <string>
#include <string_view>
#include <vector>

#include "fva/diffcore/mat.h"
#include "fva/embedstore/embedding_store.h"

namespace fva {

enum class Side { kVoice, kFace };

const char* SideName(Side side);
ModalityKind IdentityModality(Side side);
ModalityKind AgeGenderModality(Side side);

// Record ids follow `<owner_id>#<modality_name>`: the identity and age-gender
// embeddings of one utterance (or image) share the owner id.
std::string MakeRecordId(std::string_view owner_id, ModalityKind m);
// Everything before the last '#', or the whole id if there is none.
std::string_view OwnerOf(std::string_view record_id);

enum class Pairing {
  kPerOwner,        // one input per utterance / image
  kPerSpeakerMean,  // component embeddings averaged per speaker
};

// One modality-side network input: identity embedding followed by the
// age-gender embedding, upcast to double.
struct ConcatInput {
  std::string owner_id;
  std::string speaker_id;
  std::string language;
  std::vector<double> vec;
};

struct SkippedOwner {
  std::string owner_id;
  std::string reason;
};

struct AssembledSet {
  Side side = Side::kVoice;
  size_t dim = 0;
  std::vector<ConcatInput> items;
  std::vector<SkippedOwner> skipped;
};

// Pairs each identity record with the age-gender record of the same owner.
// Owners lacking either component are skipped and reported; an empty result
// is a schema error.
AssembledSet AssembleConcatInputs(const EmbeddingStore& store, Side side,
                                  Pairing pairing = Pairing::kPerOwner);

// Items whose speaker id is in `speakers` (sorted or not), order preserved.
AssembledSet SelectSpeakers(const AssembledSet& set,
                            const std::vector<std::string>& speakers);

// Sorted unique speaker ids.
std::vector<std::string> SpeakersOf(const AssembledSet& set);

// Rows of the given items stacked into a batch matrix.
Mat StackInputs(const AssembledSet& set, const std::vector<size_t>& indices);
Mat StackAll(const AssembledSet& set);

}  // namespace fva

#endif  // FVA_EMBEDSTORE_CONCAT_H_
