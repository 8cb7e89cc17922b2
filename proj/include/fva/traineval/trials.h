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

#ifndef FVA_TRAINEVAL_TRIALS_H_
#define FVA_TRAINEVAL_TRIALS_H_

#include <string>
#include <string_view>
#include <vector>

#include "fva/diffcore/rng.h"
#include "fva/embedstore/concat.h"

namespace fva {

// One face-voice verification pair. Ids are the owner ids of the
// assembled inputs (utterance / image).
struct Trial {
  std::string face_id;
  std::string voice_id;
  bool same = false;

  friend bool operator==(const Trial&, const Trial&) = default;
};

struct TrialCounts {
  size_t n_target = 0;
  size_t n_nontarget = 0;
};

// Number of distinct same- and cross-speaker pairs among `speakers`.
TrialCounts AvailableTrials(const AssembledSet& faces,
                            const AssembledSet& voices,
                            const std::vector<std::string>& speakers);

// Samples n_target same-speaker and n_nontarget cross-speaker pairs without
// replacement from the given speakers only, then shuffles them. Every
// listed speaker must have at least one face and one voice item. Asking for
// more pairs than exist is a sampling error.
std::vector<Trial> GenerateTrials(const AssembledSet& faces,
                                  const AssembledSet& voices,
                                  const std::vector<std::string>& speakers,
                                  size_t n_target, size_t n_nontarget,
                                  Rng& rng);

// As GenerateTrials but clamps the requested counts to what exists and
// skips speakers that lack face or voice items.
std::vector<Trial> GenerateTrialsClamped(
    const AssembledSet& faces, const AssembledSet& voices,
    const std::vector<std::string>& speakers, TrialCounts requested,
    Rng& rng);

// TSV with header face_record_id<TAB>voice_record_id<TAB>label, label
// "same" or "different".
std::string FormatTrialsTsv(const std::vector<Trial>& trials);
std::vector<Trial> ParseTrialsTsv(std::string_view text,
                                  const std::string& source);

}  // namespace fva

#endif  // FVA_TRAINEVAL_TRIALS_H_
