// Copyright (c) 2026 The ctc-interleave Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctctts/alignment.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>

#include "ctctts/error.h"

namespace ctctts {

namespace {

// Names the interleaved formats use for special tokens and separators.
constexpr std::array<std::string_view, 9> kReservedSymbols = {
    "eob", "eos", "pad", "zero", " ", ",", ".", "?", "!"};

bool is_reserved(std::string_view symbol) {
  return std::find(kReservedSymbols.begin(), kReservedSymbols.end(), symbol) !=
         kReservedSymbols.end();
}

void check_column(int column, const Alphabet& alphabet) {
  if (column < 0 || static_cast<std::size_t>(column) >= alphabet.size()) {
    throw Error(ErrorKind::kInvalidLabelIndex,
                "column " + std::to_string(column) + " outside alphabet of " +
                    std::to_string(alphabet.size()));
  }
}

void check_target(std::span<const int> target, const Alphabet& alphabet) {
  if (target.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "empty target label sequence");
  }
  for (int label : target) {
    if (label < 0 ||
        static_cast<std::size_t>(label) >= alphabet.phoneme_count()) {
      throw Error(ErrorKind::kInvalidLabelIndex,
                  "label " + std::to_string(label) + " outside " +
                      std::to_string(alphabet.phoneme_count()) + " phonemes");
    }
  }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols, std::string_view blank)
    : symbols_(std::move(symbols)) {
  std::set<std::string_view> seen;
  int blank_count = 0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    if (s.empty()) throw Error(ErrorKind::kInvalidConfig, "empty symbol");
    if (!seen.insert(s).second) {
      throw Error(ErrorKind::kInvalidConfig, "duplicate symbol '" + s + "'");
    }
    if (s == blank) {
      blank_ = static_cast<int>(i);
      ++blank_count;
      continue;
    }
    if (is_reserved(s)) {
      throw Error(ErrorKind::kInvalidConfig,
                  "phoneme symbol '" + s + "' is reserved");
    }
    phonemes_.push_back(s);
  }
  if (blank_count != 1) {
    throw Error(ErrorKind::kInvalidConfig,
                "blank symbol '" + std::string(blank) + "' missing");
  }
}

Alphabet Alphabet::from_phonemes(std::vector<std::string> phonemes,
                                 std::string blank) {
  phonemes.push_back(blank);
  return Alphabet(std::move(phonemes), blank);
}

int Alphabet::column_of(int label) const {
  return label < blank_ ? label : label + 1;
}

int Alphabet::label_of(int column) const {
  if (column == blank_) {
    throw Error(ErrorKind::kInvalidLabelIndex, "blank has no phoneme label");
  }
  return column < blank_ ? column : column - 1;
}

std::optional<int> Alphabet::find_phoneme(std::string_view symbol) const {
  auto it = std::find(phonemes_.begin(), phonemes_.end(), symbol);
  if (it == phonemes_.end()) return std::nullopt;
  return static_cast<int>(it - phonemes_.begin());
}

int Alphabet::phoneme_label(std::string_view symbol) const {
  auto label = find_phoneme(symbol);
  if (!label) {
    throw Error(ErrorKind::kUnknownPhoneme,
                "'" + std::string(symbol) + "' not in alphabet");
  }
  return *label;
}

Posteriogram::Posteriogram(Alphabet alphabet, std::vector<double> values,
                           std::size_t frames)
    : alphabet_(std::move(alphabet)), values_(std::move(values)),
      frames_(frames) {
  const std::size_t width = alphabet_.size();
  if (frames_ == 0) {
    throw Error(ErrorKind::kFormatError, "posteriogram has no frames");
  }
  if (values_.size() != frames_ * width) {
    throw Error(ErrorKind::kFormatError,
                "expected " + std::to_string(frames_ * width) +
                    " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t t = 0; t < frames_; ++t) {
    double* row = values_.data() + t * width;
    double peak = kLogZero;
    for (std::size_t c = 0; c < width; ++c) {
      double& v = row[c];
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw Error(ErrorKind::kFormatError,
                    "non-finite value at frame " + std::to_string(t));
      }
      v = std::max(v, kLogZero);
      peak = std::max(peak, v);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) sum += std::exp(row[c] - peak);
    const double norm = peak + std::log(sum);
    for (std::size_t c = 0; c < width; ++c) {
      row[c] = std::max(row[c] - norm, kLogZero);
    }
  }
}

Posteriogram Posteriogram::from_probabilities(
    Alphabet alphabet, const std::vector<std::vector<double>>& rows) {
  std::vector<double> values;
  values.reserve(rows.size() * alphabet.size());
  for (const auto& row : rows) {
    if (row.size() != alphabet.size()) {
      throw Error(ErrorKind::kFormatError, "row width differs from alphabet");
    }
    for (double p : row) {
      if (p < 0.0) throw Error(ErrorKind::kFormatError, "negative probability");
      values.push_back(p > 0.0 ? std::log(p) : kLogZero);
    }
  }
  const std::size_t frames = rows.size();
  return Posteriogram(std::move(alphabet), std::move(values), frames);
}

AlignmentPath AlignmentPath::from_columns(std::vector<int> path,
                                          const Alphabet& alphabet) {
  AlignmentPath out;
  out.occurrence.assign(path.size(), -1);
  int occ = -1;
  int prev = -1;
  for (std::size_t t = 0; t < path.size(); ++t) {
    check_column(path[t], alphabet);
    if (!alphabet.is_blank(path[t])) {
      if (path[t] != prev) ++occ;
      out.occurrence[t] = occ;
    }
    prev = path[t];
  }
  out.path = std::move(path);
  return out;
}

LabelSequence collapse(std::span<const int> path, const Alphabet& alphabet) {
  LabelSequence out;
  int prev = -1;
  for (int column : path) {
    check_column(column, alphabet);
    if (column != prev && !alphabet.is_blank(column)) {
      out.push_back(alphabet.label_of(column));
    }
    prev = column;
  }
  return out;
}

std::size_t min_frames(std::span<const int> target) {
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++repeats;
  }
  return target.size() + repeats;
}

AlignmentPath forced_align(const Posteriogram& post,
                           std::span<const int> target) {
  const Alphabet& alphabet = post.alphabet();
  check_target(target, alphabet);
  const std::size_t frames = post.frames();
  const std::size_t needed = min_frames(target);
  if (frames < needed) {
    throw Error(ErrorKind::kInfeasibleAlignment,
                std::to_string(target.size()) + " labels need " +
                    std::to_string(needed) + " frames, posteriogram has " +
                    std::to_string(frames));
  }

  // State s: even = blank, odd = target[(s - 1) / 2].
  const std::size_t states = 2 * target.size() + 1;
  const int blank = alphabet.blank_index();
  auto column = [&](std::size_t s) {
    return s % 2 == 0 ? blank : alphabet.column_of(target[(s - 1) / 2]);
  };
  auto can_skip = [&](std::size_t s) {
    return s % 2 == 1 && s >= 3 && target[(s - 1) / 2] != target[(s - 3) / 2];
  };

  // Reachability is tracked apart from the scores: a feasible path through a
  // zero-probability frame still scores near kLogZero.
  std::vector<double> prev(states, kLogZero);
  std::vector<double> cur(states, kLogZero);
  std::vector<bool> prev_ok(states, false);
  std::vector<bool> cur_ok(states, false);
  // Predecessor offset per (frame, state): 0 stay, 1 advance, 2 skip.
  std::vector<std::uint8_t> back(frames * states, 0);

  prev[0] = post.log_prob(0, column(0));
  prev[1] = post.log_prob(0, column(1));
  prev_ok[0] = prev_ok[1] = true;
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      bool ok = prev_ok[s];
      double best = prev[s];
      std::uint8_t step = 0;
      if (s >= 1 && prev_ok[s - 1] && (!ok || prev[s - 1] > best)) {
        ok = true;
        best = prev[s - 1];
        step = 1;
      }
      if (can_skip(s) && prev_ok[s - 2] && (!ok || prev[s - 2] > best)) {
        ok = true;
        best = prev[s - 2];
        step = 2;
      }
      cur_ok[s] = ok;
      cur[s] = ok ? best + post.log_prob(t, column(s)) : kLogZero;
      back[t * states + s] = step;
    }
    std::swap(prev, cur);
    std::swap(prev_ok, cur_ok);
  }

  const std::size_t last_label = states - 2;
  const std::size_t last_blank = states - 1;
  std::size_t state = last_label;
  if (prev_ok[last_blank] &&
      (!prev_ok[last_label] || prev[last_blank] > prev[last_label])) {
    state = last_blank;
  }
  AlignmentPath out;
  out.path.resize(frames);
  out.occurrence.resize(frames);
  for (std::size_t t = frames; t-- > 0;) {
    out.path[t] = column(state);
    out.occurrence[t] = state % 2 == 0 ? -1 : static_cast<int>((state - 1) / 2);
    state -= back[t * states + state];
  }
  for (std::size_t t = 0; t < frames; ++t) {
    out.score += post.log_prob(t, out.path[t]);
  }
  return out;
}

RefinedAlignment refine(const AlignmentPath& path, const Alphabet& alphabet) {
  AlignmentPath derived;
  const AlignmentPath* src = &path;
  if (path.occurrence.size() != path.path.size()) {
    derived = AlignmentPath::from_columns(path.path, alphabet);
    src = &derived;
  }
  const std::size_t frames = src->path.size();
  int last = -1;
  for (std::size_t t = 0; t < frames; ++t) {
    check_column(src->path[t], alphabet);
    if (!alphabet.is_blank(src->path[t])) last = src->occurrence[t];
  }
  if (last < 0) {
    throw Error(ErrorKind::kEmptyAlignment, "path contains only blanks");
  }

  std::vector<int> owner(frames);
  int next = last;
  for (std::size_t t = frames; t-- > 0;) {
    if (!alphabet.is_blank(src->path[t])) next = src->occurrence[t];
    owner[t] = next;
  }

  RefinedAlignment out;
  out.frame_labels.resize(frames);
  out.phoneme_spans.resize(static_cast<std::size_t>(last) + 1);
  std::vector<bool> seen(out.phoneme_spans.size(), false);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto occ = static_cast<std::size_t>(owner[t]);
    Span& span = out.phoneme_spans[occ];
    if (!seen[occ]) {
      seen[occ] = true;
      span.start = static_cast<int>(t);
    }
    span.end = static_cast<int>(t) + 1;
  }
  // Labels come from the non-blank frames of each occurrence.
  for (std::size_t t = 0; t < frames; ++t) {
    if (!alphabet.is_blank(src->path[t])) {
      out.phoneme_spans[static_cast<std::size_t>(src->occurrence[t])].label =
          alphabet.label_of(src->path[t]);
    }
  }
  for (std::size_t t = 0; t < frames; ++t) {
    out.frame_labels[t] = out.phoneme_spans[static_cast<std::size_t>(owner[t])].label;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorKind::kEmptyAlignment,
                  "occurrence " + std::to_string(i) + " has no frames");
    }
  }
  return out;
}

TokenMap map_tokens(const RefinedAlignment& refined, int ratio,
                    std::size_t token_count) {
  if (ratio < 1) {
    throw Error(ErrorKind::kRatioMismatch,
                "ratio must be positive, got " + std::to_string(ratio));
  }
  const std::size_t expected = static_cast<std::size_t>(ratio) * refined.frames();
  if (token_count != expected) {
    throw Error(ErrorKind::kRatioMismatch,
                std::to_string(refined.frames()) + " frames at ratio " +
                    std::to_string(ratio) + " need " + std::to_string(expected) +
                    " tokens, got " + std::to_string(token_count));
  }
  TokenMap out;
  out.ratio = ratio;
  out.phoneme_token_spans.reserve(refined.phoneme_spans.size());
  for (const Span& span : refined.phoneme_spans) {
    out.phoneme_token_spans.push_back(
        {span.label, span.start * ratio, span.end * ratio});
  }
  return out;
}

UtteranceAlignment align_utterance(const Posteriogram& post,
                                   std::span<const int> target, int ratio,
                                   std::size_t token_count) {
  UtteranceAlignment out;
  out.path = forced_align(post, target);
  out.refined = refine(out.path, post.alphabet());
  out.tokens = map_tokens(out.refined, ratio, token_count);
  return out;
}

}  // namespace ctctts
