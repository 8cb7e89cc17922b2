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

#include "fva/embedstore/folds.h"

#include <algorithm>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

std::vector<std::string> FoldPlan::SpeakersOutside(size_t fold) const {
  std::vector<std::string> out;
  for (size_t f = 0; f < folds.size(); ++f) {
    if (f == fold) continue;
    out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan SplitFolds(std::vector<std::string> speakers, size_t n_folds,
                    Rng& rng) {
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()),
                 speakers.end());
  if (n_folds == 0 || n_folds > speakers.size()) {
    std::ostringstream os;
    os << "cannot split " << speakers.size() << " speakers into " << n_folds
       << " folds";
    throw Error(ErrorKind::kConfig, os.str());
  }
  rng.Shuffle(&speakers);
  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.folds.resize(n_folds);
  for (size_t i = 0; i < speakers.size(); ++i) {
    plan.assignments[speakers[i]] = i % n_folds;
    plan.folds[i % n_folds].push_back(speakers[i]);
  }
  return plan;
}

}  // namespace fva
