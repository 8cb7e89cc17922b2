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

#include "fva/traineval/scoring.h"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fva/common/error.h"

namespace fva {

namespace {

std::unordered_map<std::string, size_t> IndexOwners(const AssembledSet& set) {
  std::unordered_map<std::string, size_t> idx;
  for (size_t i = 0; i < set.items.size(); ++i) {
    idx.emplace(set.items[i].owner_id, i);
  }
  return idx;
}

struct ResolvedTrials {
  std::vector<size_t> face_rows;
  std::vector<size_t> voice_rows;
};

ResolvedTrials Resolve(const AssembledSet& faces, const AssembledSet& voices,
                       const std::vector<Trial>& trials) {
  const auto fidx = IndexOwners(faces);
  const auto vidx = IndexOwners(voices);
  ResolvedTrials r;
  std::set<std::string> missing;
  for (const auto& t : trials) {
    auto f = fidx.find(t.face_id);
    auto v = vidx.find(t.voice_id);
    if (f == fidx.end()) missing.insert(t.face_id);
    if (v == vidx.end()) missing.insert(t.voice_id);
    if (f != fidx.end() && v != vidx.end()) {
      r.face_rows.push_back(f->second);
      r.voice_rows.push_back(v->second);
    }
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << missing.size() << " trial record(s) not found:";
    size_t shown = 0;
    for (const auto& id : missing) {
      if (shown++ == 20) {
        os << " ...";
        break;
      }
      os << ' ' << id;
    }
    throw Error(ErrorKind::kLookup, os.str());
  }
  return r;
}

// Embeds only the rows referenced by trials; returns row -> embedding row.
Mat EmbedRows(const MappingHead& head, const AssembledSet& set,
              const std::vector<size_t>& rows,
              std::unordered_map<size_t, size_t>* where) {
  std::vector<size_t> unique;
  for (size_t r : rows) {
    if (where->emplace(r, unique.size()).second) unique.push_back(r);
  }
  return HeadEmbed(head, StackInputs(set, unique));
}

}  // namespace

std::vector<double> ScoreTrials(const JointModel& model,
                                const AssembledSet& faces,
                                const AssembledSet& voices,
                                const std::vector<Trial>& trials) {
  ValidateModelDims(model, voices.dim, faces.dim);
  const ResolvedTrials r = Resolve(faces, voices, trials);
  std::unordered_map<size_t, size_t> fpos, vpos;
  const Mat fe = EmbedRows(model.face, faces, r.face_rows, &fpos);
  const Mat ve = EmbedRows(model.voice, voices, r.voice_rows, &vpos);
  std::vector<double> scores(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    scores[i] = ScorePair(fe.Row(fpos.at(r.face_rows[i])),
                          ve.Row(vpos.at(r.voice_rows[i])));
  }
  return scores;
}

std::vector<double> ScoreTrialsXAttn(const XAttnModel& model,
                                     const AssembledSet& faces,
                                     const AssembledSet& voices,
                                     const std::vector<Trial>& trials) {
  const ResolvedTrials r = Resolve(faces, voices, trials);
  Rng unused(0);
  std::vector<double> scores(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    scores[i] = XAttnForward(model, voices.items[r.voice_rows[i]].vec,
                             faces.items[r.face_rows[i]].vec, Mode::kEval,
                             unused)
                    .logit;
  }
  return scores;
}

EvalReport EvaluateScores(const std::vector<Trial>& trials,
                          const std::vector<double>& scores) {
  if (trials.size() != scores.size()) {
    throw Error(ErrorKind::kShape, "trial/score count mismatch");
  }
  std::vector<ScoredTrial> st(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    st[i] = {scores[i], trials[i].same};
  }
  return ComputeEer(st);
}

std::string FormatScoreTsv(const std::vector<Trial>& trials,
                           const std::vector<double>& scores) {
  std::string out = "face_record_id\tvoice_record_id\tlabel\tscore\n";
  char buf[64];
  for (size_t i = 0; i < trials.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", scores[i]);
    out += trials[i].face_id;
    out += '\t';
    out += trials[i].voice_id;
    out += '\t';
    out += trials[i].same ? "same" : "different";
    out += '\t';
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace fva
