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

#ifndef FVA_EMBEDSTORE_FOLDS_H_
#define FVA_EMBEDSTORE_FOLDS_H_

#include <map>
#include <string>
#include <vector>

#include "fva/diffcore/rng.h"

namespace fva {

// Speaker-disjoint partition used for cross-validation.
struct FoldPlan {
  size_t n_folds = 0;
  std::map<std::string, size_t> assignments;
  // folds[i] lists fold i's speakers in assignment order.
  std::vector<std::vector<std::string>> folds;

  std::vector<std::string> SpeakersOutside(size_t fold) const;
};

// Sorts and dedups `speakers`, permutes them with `rng`, then assigns
// round-robin, so fold sizes differ by at most one and fold 0 gets the
// remainder first.
FoldPlan SplitFolds(std::vector<std::string> speakers, size_t n_folds,
                    Rng& rng);

}  // namespace fva

#endif  // FVA_EMBEDSTORE_FOLDS_H_
