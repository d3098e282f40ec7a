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

#include "ctctts/lexicon.h"

#include <cctype>
#include <random>
#include <sstream>

#include "ctctts/error.h"

namespace ctctts {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::optional<Separator> punctuation(char c) {
  switch (c) {
    case ',': return Separator::kComma;
    case '.': return Separator::kPeriod;
    case '?': return Separator::kQuestion;
    case '!': return Separator::kExclamation;
    default: return std::nullopt;
  }
}

std::vector<std::string> split_fields(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Uniform draw in [0, n). Modulo keeps the sequence identical across
// standard library implementations.
std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace

std::string_view separator_symbol(Separator sep) {
  switch (sep) {
    case Separator::kSpace: return " ";
    case Separator::kComma: return ",";
    case Separator::kPeriod: return ".";
    case Separator::kQuestion: return "?";
    case Separator::kExclamation: return "!";
  }
  return " ";
}

std::optional<Separator> separator_from_symbol(std::string_view symbol) {
  if (symbol == " ") return Separator::kSpace;
  if (symbol.size() == 1) return punctuation(symbol[0]);
  return std::nullopt;
}

void Lexicon::add(std::string word, std::vector<std::string> phonemes) {
  if (phonemes.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "empty pronunciation for '" + word + "'");
  }
  if (entries_.count(word) != 0) {
    throw Error(ErrorKind::kDuplicateEntry, "'" + word + "' listed twice");
  }
  entries_.emplace(std::move(word), std::move(phonemes));
}

const std::vector<std::string>* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& Lexicon::at(std::string_view word) const {
  const auto* phonemes = find(word);
  if (phonemes == nullptr) {
    throw Error(ErrorKind::kUnknownWord, "'" + std::string(word) + "' not in lexicon");
  }
  return *phonemes;
}

std::string Lexicon::to_text() const {
  std::string out;
  for (const auto& [word, phonemes] : entries_) {
    out += word;
    out += '\t';
    for (std::size_t i = 0; i < phonemes.size(); ++i) {
      if (i > 0) out += ' ';
      out += phonemes[i];
    }
    out += '\n';
  }
  return out;
}

Lexicon load_lexicon(std::string_view text, const Alphabet* alphabet) {
  Lexicon lexicon;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorKind::kFormatError,
                  "lexicon line " + std::to_string(line_no) +
                      ": expected word<TAB>phonemes");
    }
    std::string word(line.substr(0, tab));
    std::vector<std::string> phonemes = split_fields(line.substr(tab + 1));
    if (alphabet != nullptr) {
      for (const auto& ph : phonemes) {
        if (!alphabet->find_phoneme(ph)) {
          throw Error(ErrorKind::kUnknownPhoneme,
                      "lexicon line " + std::to_string(line_no) + ": '" + ph +
                          "' not in alphabet");
        }
      }
    }
    lexicon.add(std::move(word), std::move(phonemes));
  }
  return lexicon;
}

TextSplit split_text(std::string_view text) {
  TextSplit out;
  std::string word;
  bool pending = false;  // last word still waiting for its separator
  auto flush = [&] {
    if (word.empty()) return;
    out.words.push_back(std::move(word));
    out.separators.push_back(Separator::kSpace);
    word.clear();
    pending = true;
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (auto sep = punctuation(c)) {
      flush();
      if (pending) {
        out.separators.back() = *sep;
        pending = false;
      }
    } else {
      if (word.empty()) pending = false;
      word += c;
    }
  }
  flush();
  return out;
}

std::string join_text(const std::vector<std::string>& words,
                      const std::vector<Separator>& separators) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += words[i];
    const Separator sep =
        i < separators.size() ? separators[i] : Separator::kSpace;
    if (sep != Separator::kSpace) out += separator_symbol(sep);
    if (i + 1 < words.size()) out += ' ';
  }
  return out;
}

std::vector<std::string> Utterance::target() const {
  std::vector<std::string> out;
  for (const auto& phonemes : word_phonemes) {
    out.insert(out.end(), phonemes.begin(), phonemes.end());
  }
  return out;
}

LabelSequence Utterance::target_labels(const Alphabet& alphabet) const {
  LabelSequence out;
  for (const auto& ph : target()) out.push_back(alphabet.phoneme_label(ph));
  return out;
}

std::size_t Utterance::phoneme_count() const {
  std::size_t n = 0;
  for (const auto& phonemes : word_phonemes) n += phonemes.size();
  return n;
}

void Utterance::validate() const {
  if (words.empty()) throw Error(ErrorKind::kEmptyUtterance, "no words");
  if (word_phonemes.size() != words.size() ||
      separators.size() != words.size()) {
    throw Error(ErrorKind::kInvalidConfig,
                "words, word_phonemes and separators differ in length");
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (word_phonemes[i].empty()) {
      throw Error(ErrorKind::kUnknownWord,
                  "no pronunciation for '" + words[i] + "'");
    }
  }
  if (ratio < 1) {
    throw Error(ErrorKind::kInvalidConfig, "ratio must be positive");
  }
}

Utterance make_utterance(std::string_view text, const Lexicon& lexicon,
                         std::vector<int> speech_tokens, int ratio) {
  TextSplit split = split_text(text);
  Utterance utt;
  utt.text = std::string(text);
  for (const auto& word : split.words) utt.word_phonemes.push_back(lexicon.at(word));
  utt.words = std::move(split.words);
  utt.separators = std::move(split.separators);
  utt.speech_tokens = std::move(speech_tokens);
  utt.ratio = ratio;
  return utt;
}

std::vector<WordSpan> word_spans(const Utterance& utt, const TokenMap& tmap) {
  const auto& spans = tmap.phoneme_token_spans;
  if (spans.size() != utt.phoneme_count()) {
    throw Error(ErrorKind::kLexiconAlignmentMismatch,
                "alignment has " + std::to_string(spans.size()) +
                    " phoneme spans, utterance has " +
                    std::to_string(utt.phoneme_count()) + " phonemes");
  }
  if (spans.empty() ||
      static_cast<std::size_t>(spans.back().end) != utt.speech_tokens.size()) {
    throw Error(ErrorKind::kLexiconAlignmentMismatch,
                "token spans do not cover the " +
                    std::to_string(utt.speech_tokens.size()) + " speech tokens");
  }
  std::vector<WordSpan> out;
  int ph = 0;
  for (std::size_t w = 0; w < utt.word_phonemes.size(); ++w) {
    const int n = static_cast<int>(utt.word_phonemes[w].size());
    WordSpan span;
    span.word_index = static_cast<int>(w);
    span.phonemes = {ph, ph + n};
    span.tokens = {spans[static_cast<std::size_t>(ph)].start,
                   spans[static_cast<std::size_t>(ph + n - 1)].end};
    out.push_back(span);
    ph += n;
  }
  return out;
}

SynthUtterance synth_utterance(std::uint64_t seed, const SynthConfig& config) {
  if (config.phoneme_inventory.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "empty phoneme inventory");
  }
  if (config.word_count < 1) {
    throw Error(ErrorKind::kInvalidConfig, "word_count must be at least 1");
  }
  if (config.ratio < 1 || config.max_word_phonemes < 1 ||
      config.max_phoneme_frames < 1 || config.speech_vocab < 1) {
    throw Error(ErrorKind::kInvalidConfig, "non-positive synth parameter");
  }
  Alphabet alphabet = Alphabet::from_phonemes(config.phoneme_inventory);
  const double floor = 1.0 / static_cast<double>(alphabet.size());
  if (!(config.peak_prob > floor)) {
    throw Error(ErrorKind::kInvalidConfig,
                "peak_prob must exceed 1/|alphabet| = " + std::to_string(floor));
  }
  const double peak = std::min(config.peak_prob, 1.0 - 1e-6);

  std::mt19937_64 rng(seed);
  const auto& inventory = config.phoneme_inventory;
  const int blank = alphabet.blank_index();

  Utterance utt;
  Lexicon lexicon;
  std::vector<int> path;
  utt.ratio = config.ratio;
  std::map<std::vector<std::string>, std::string> spelled;

  for (int w = 0; w < config.word_count; ++w) {
    const std::size_t len = 1 + draw(rng, static_cast<std::size_t>(config.max_word_phonemes));
    std::vector<std::string> phonemes;
    for (std::size_t i = 0; i < len; ++i) {
      phonemes.push_back(inventory[draw(rng, inventory.size())]);
    }
    auto it = spelled.find(phonemes);
    if (it == spelled.end()) {
      std::string word;
      for (const auto& ph : phonemes) word += ph;
      if (lexicon.find(word) != nullptr) word += "_" + std::to_string(spelled.size());
      lexicon.add(word, phonemes);
      it = spelled.emplace(phonemes, word).first;
    }
    utt.words.push_back(it->second);
    utt.word_phonemes.push_back(std::move(phonemes));
    if (w + 1 < config.word_count) {
      utt.separators.push_back(draw(rng, 4) == 0 ? Separator::kComma : Separator::kSpace);
    } else {
      static constexpr Separator kFinal[] = {Separator::kPeriod, Separator::kPeriod,
                                             Separator::kQuestion, Separator::kExclamation};
      utt.separators.push_back(kFinal[draw(rng, 4)]);
    }
  }
  utt.text = join_text(utt.words, utt.separators);

  auto push_blanks = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) path.push_back(blank);
  };
  push_blanks(draw(rng, 3));
  int prev = -1;
  for (std::size_t w = 0; w < utt.word_phonemes.size(); ++w) {
    for (std::size_t i = 0; i < utt.word_phonemes[w].size(); ++i) {
      const int column = alphabet.column_of(alphabet.phoneme_label(utt.word_phonemes[w][i]));
      std::size_t gap = (i == 0 && w > 0) ? draw(rng, 3) : 0;
      if (column == prev && gap == 0) gap = 1;
      push_blanks(gap);
      const std::size_t frames = 1 + draw(rng, static_cast<std::size_t>(config.max_phoneme_frames));
      for (std::size_t f = 0; f < frames; ++f) path.push_back(column);
      prev = column;
    }
  }

  const std::size_t frames = path.size();
  const std::size_t width = alphabet.size();
  const double rest = (1.0 - peak) / static_cast<double>(width - 1);
  std::vector<double> values(frames * width, std::log(rest));
  for (std::size_t t = 0; t < frames; ++t) {
    values[t * width + static_cast<std::size_t>(path[t])] = std::log(peak);
  }

  const std::size_t token_count = frames * static_cast<std::size_t>(config.ratio);
  utt.speech_tokens.reserve(token_count);
  for (std::size_t i = 0; i < token_count; ++i) {
    utt.speech_tokens.push_back(
        static_cast<int>(draw(rng, static_cast<std::size_t>(config.speech_vocab))));
  }

  std::vector<int> labels =
      refine(AlignmentPath::from_columns(path, alphabet), alphabet).frame_labels;
  return SynthUtterance{std::move(utt),
                        Posteriogram(std::move(alphabet), std::move(values), frames),
                        std::move(lexicon), std::move(path), std::move(labels)};
}

}  // namespace ctctts
