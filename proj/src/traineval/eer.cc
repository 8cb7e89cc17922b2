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

#include "fva/traineval/eer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fva/common/error.h"

namespace fva {

EvalReport ComputeEer(std::span<const ScoredTrial> scores) {
  EvalReport rep;
  std::vector<ScoredTrial> sorted(scores.begin(), scores.end());
  double sum_t = 0.0, sum_n = 0.0;
  for (const auto& s : sorted) {
    if (!std::isfinite(s.score)) {
      throw Error(ErrorKind::kMetric, "non-finite score");
    }
    if (s.target) {
      ++rep.n_target;
      sum_t += s.score;
    } else {
      ++rep.n_nontarget;
      sum_n += s.score;
    }
  }
  if (rep.n_target == 0 || rep.n_nontarget == 0) {
    throw Error(ErrorKind::kMetric,
                "EER needs at least one target and one non-target score (got " +
                    std::to_string(rep.n_target) + " / " +
                    std::to_string(rep.n_nontarget) + ")");
  }
  rep.mean_target_score = sum_t / rep.n_target;
  rep.mean_nontarget_score = sum_n / rep.n_nontarget;

  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredTrial& a, const ScoredTrial& b) {
              return a.score < b.score;
            });
  const double nt = static_cast<double>(rep.n_target);
  const double nn = static_cast<double>(rep.n_nontarget);

  // Walk thresholds upward. Before consuming the group at score t:
  // targets_below = #{target < t}, nontargets_at_or_above = #{non-target >= t}.
  size_t targets_below = 0;
  size_t nontargets_at_or_above = rep.n_nontarget;
  double prev_far = 0.0, prev_frr = 0.0, prev_t = 0.0;
  bool have_prev = false;
  size_t i = 0;
  while (true) {
    const bool at_end = i == sorted.size();
    const double t =
        at_end ? std::numeric_limits<double>::infinity() : sorted[i].score;
    const double far = nontargets_at_or_above / nn;
    const double frr = targets_below / nt;
    if (frr >= far) {
      if (frr == far || !have_prev) {
        rep.eer = far;
        rep.threshold = at_end && have_prev ? prev_t : t;
      } else {
        const double d0 = prev_far - prev_frr;  // > 0
        const double d1 = far - frr;            // < 0
        const double alpha = d0 / (d0 - d1);
        rep.eer = prev_far + alpha * (far - prev_far);
        rep.threshold = at_end ? prev_t : prev_t + alpha * (t - prev_t);
      }
      return rep;
    }
    prev_far = far;
    prev_frr = frr;
    prev_t = t;
    have_prev = true;
    // Consume every score equal to t.
    while (i < sorted.size() && sorted[i].score == t) {
      if (sorted[i].target) {
        ++targets_below;
      } else {
        --nontargets_at_or_above;
      }
      ++i;
    }
  }
}

}  // namespace fva
