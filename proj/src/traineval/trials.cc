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

#include "fva/traineval/trials.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

namespace {

struct SpeakerItems {
  std::vector<std::string> faces;
  std::vector<std::string> voices;
};

// Per-speaker owner ids, in the given speaker order (sorted + unique).
std::vector<std::pair<std::string, SpeakerItems>> Group(
    const AssembledSet& faces, const AssembledSet& voices,
    std::vector<std::string> speakers, bool require_both) {
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()),
                 speakers.end());
  std::map<std::string, SpeakerItems> by_speaker;
  for (const auto& s : speakers) by_speaker[s];
  for (const auto& it : faces.items) {
    auto f = by_speaker.find(it.speaker_id);
    if (f != by_speaker.end()) f->second.faces.push_back(it.owner_id);
  }
  for (const auto& it : voices.items) {
    auto f = by_speaker.find(it.speaker_id);
    if (f != by_speaker.end()) f->second.voices.push_back(it.owner_id);
  }
  std::vector<std::pair<std::string, SpeakerItems>> out;
  for (auto& [spk, items] : by_speaker) {
    if (require_both && (items.faces.empty() || items.voices.empty())) {
      throw Error(ErrorKind::kSampling,
                  "speaker '" + spk + "' lacks " +
                      (items.faces.empty() ? "face" : "voice") + " items");
    }
    out.emplace_back(spk, std::move(items));
  }
  return out;
}

// k distinct values from [0, n), sorted (Floyd's algorithm).
std::vector<uint64_t> SampleDistinct(uint64_t n, uint64_t k, Rng& rng) {
  std::set<uint64_t> chosen;
  for (uint64_t j = n - k; j < n; ++j) {
    const uint64_t t = rng.UniformInt(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

TrialCounts AvailableTrials(const AssembledSet& faces,
                            const AssembledSet& voices,
                            const std::vector<std::string>& speakers) {
  auto groups = Group(faces, voices, speakers, false);
  size_t nf = 0, nv = 0, same = 0;
  for (const auto& [spk, g] : groups) {
    nf += g.faces.size();
    nv += g.voices.size();
    same += g.faces.size() * g.voices.size();
  }
  return {same, nf * nv - same};
}

std::vector<Trial> GenerateTrials(const AssembledSet& faces,
                                  const AssembledSet& voices,
                                  const std::vector<std::string>& speakers,
                                  size_t n_target, size_t n_nontarget,
                                  Rng& rng) {
  auto groups = Group(faces, voices, speakers, true);
  // Flatten faces and voices, grouped by speaker.
  std::vector<std::string> all_faces, all_voices;
  std::vector<size_t> face_spk, voice_begin, voice_end;
  for (size_t s = 0; s < groups.size(); ++s) {
    const auto& g = groups[s].second;
    voice_begin.push_back(all_voices.size());
    all_voices.insert(all_voices.end(), g.voices.begin(), g.voices.end());
    voice_end.push_back(all_voices.size());
    for (const auto& f : g.faces) {
      all_faces.push_back(f);
      face_spk.push_back(s);
    }
  }
  const TrialCounts avail = AvailableTrials(faces, voices, speakers);
  if (n_target > avail.n_target || n_nontarget > avail.n_nontarget) {
    std::ostringstream os;
    os << "requested " << n_target << " target / " << n_nontarget
       << " non-target trials but only " << avail.n_target << " / "
       << avail.n_nontarget << " exist among " << groups.size()
       << " speakers";
    throw Error(ErrorKind::kSampling, os.str());
  }

  std::vector<Trial> trials;
  trials.reserve(n_target + n_nontarget);

  // Target index space: for each face, the voices of its own speaker.
  {
    std::vector<uint64_t> prefix = {0};
    for (size_t f = 0; f < all_faces.size(); ++f) {
      const size_t s = face_spk[f];
      prefix.push_back(prefix.back() + voice_end[s] - voice_begin[s]);
    }
    for (uint64_t idx : SampleDistinct(prefix.back(), n_target, rng)) {
      const size_t f =
          std::upper_bound(prefix.begin(), prefix.end(), idx) - prefix.begin() - 1;
      const size_t v = voice_begin[face_spk[f]] + (idx - prefix[f]);
      trials.push_back({all_faces[f], all_voices[v], true});
    }
  }
  // Non-target index space: for each face, all voices outside its speaker's
  // contiguous block.
  {
    const size_t nv = all_voices.size();
    std::vector<uint64_t> prefix = {0};
    for (size_t f = 0; f < all_faces.size(); ++f) {
      const size_t s = face_spk[f];
      prefix.push_back(prefix.back() + nv - (voice_end[s] - voice_begin[s]));
    }
    for (uint64_t idx : SampleDistinct(prefix.back(), n_nontarget, rng)) {
      const size_t f =
          std::upper_bound(prefix.begin(), prefix.end(), idx) - prefix.begin() - 1;
      const size_t s = face_spk[f];
      size_t v = idx - prefix[f];
      if (v >= voice_begin[s]) v += voice_end[s] - voice_begin[s];
      trials.push_back({all_faces[f], all_voices[v], false});
    }
  }
  rng.Shuffle(&trials);
  return trials;
}

std::vector<Trial> GenerateTrialsClamped(
    const AssembledSet& faces, const AssembledSet& voices,
    const std::vector<std::string>& speakers, TrialCounts requested,
    Rng& rng) {
  // Speakers whose records on one side were all filtered out (e.g. by a
  // language exclusion) cannot form target pairs; leave them out.
  std::vector<std::string> usable;
  for (const auto& [spk, g] : Group(faces, voices, speakers, false)) {
    if (!g.faces.empty() && !g.voices.empty()) usable.push_back(spk);
  }
  const TrialCounts avail = AvailableTrials(faces, voices, usable);
  return GenerateTrials(faces, voices, usable,
                        std::min(requested.n_target, avail.n_target),
                        std::min(requested.n_nontarget, avail.n_nontarget),
                        rng);
}

std::string FormatTrialsTsv(const std::vector<Trial>& trials) {
  std::ostringstream os;
  os << "face_record_id\tvoice_record_id\tlabel\n";
  for (const auto& t : trials) {
    os << t.face_id << '\t' << t.voice_id << '\t'
       << (t.same ? "same" : "different") << '\n';
  }
  return os.str();
}

std::vector<Trial> ParseTrialsTsv(std::string_view text,
                                  const std::string& source) {
  std::vector<Trial> trials;
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
      if (line != "face_record_id\tvoice_record_id\tlabel") {
        throw Error(ErrorKind::kFormat, source + ": bad trials header");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos ||
        line.find('\t', t2 + 1) != std::string_view::npos) {
      throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line_no) +
                                          ": expected 3 columns");
    }
    const std::string_view label = line.substr(t2 + 1);
    if (label != "same" && label != "different") {
      throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line_no) +
                                          ": label must be same|different");
    }
    trials.push_back({std::string(line.substr(0, t1)),
                      std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                      label == "same"});
  }
  if (!saw_header) throw Error(ErrorKind::kFormat, source + ": empty trial file");
  return trials;
}

}  // namespace fva
