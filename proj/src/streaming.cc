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

#include "ctctts/streaming.h"

#include <cctype>
#include <deque>

namespace ctctts {

namespace {

void check_text(const StreamText& text) {
  if (text.word_phonemes.empty()) throw Error(ErrorKind::kEmptyUtterance, "no words");
  if (text.separators.size() != text.word_phonemes.size()) {
    throw Error(ErrorKind::kInvalidConfig, "separator count differs from word count");
  }
  for (std::size_t w = 0; w < text.word_phonemes.size(); ++w) {
    if (text.word_phonemes[w].empty()) {
      throw Error(ErrorKind::kUnknownWord, "word " + std::to_string(w) + " has no pronunciation");
    }
  }
  if (text.ratio < 1) throw Error(ErrorKind::kInvalidConfig, "ratio must be positive");
}

std::vector<Token> block_text(const StreamText& text, std::size_t k) {
  Block b;
  b.cur_phonemes = text.word_phonemes[k];
  b.separator = text.separators[k];
  if (k + 1 < text.word_phonemes.size()) b.next_phonemes = text.word_phonemes[k + 1];
  return b.text();
}

void check_output(const Token& out) {
  if (!out.is_target()) {
    throw Error(ErrorKind::kDecoderContract,
                "decoder produced " + std::string(to_string(out.cls)) +
                    "; only speech tokens and eob are allowed");
  }
}

// Accumulates steps, chunk boundaries and first-packet accounting.
class Recorder {
 public:
  Recorder(Variant variant, const StreamText& text, const StreamOptions& options)
      : cost_(options.cost) {
    trace_.variant = variant;
    trace_.utterance_key = text.key();
  }

  void add(StepPhase phase, std::vector<Token> fed, std::optional<Token> emitted) {
    TraceStep step;
    step.index = static_cast<int>(trace_.steps.size());
    step.phase = phase;
    step.fed = std::move(fed);
    step.emitted = std::move(emitted);
    if (phase == StepPhase::kPrompt) {
      ++trace_.prompt_steps;
    } else if (step.emitted && step.emitted->cls == TokenClass::kSpeech) {
      chunk_.push_back(step.emitted->id);
      if (static_cast<int>(chunk_.size()) == cost_.chunk_size) {
        step.chunk = static_cast<int>(trace_.chunks.size());
        trace_.chunks.push_back(std::move(chunk_));
        chunk_.clear();
        if (trace_.fpl_steps == 0) trace_.fpl_steps = step.index + 1 - trace_.prompt_steps;
      }
    }
    trace_.steps.push_back(std::move(step));
  }

  void end_block(int tokens) { trace_.per_block_token_counts.push_back(tokens); }

  StreamTrace finish() {
    if (!chunk_.empty()) {
      trace_.steps.back().chunk = static_cast<int>(trace_.chunks.size());
      trace_.chunks.push_back(std::move(chunk_));
      chunk_.clear();
    }
    if (trace_.fpl_steps == 0) {
      trace_.fpl_steps = std::max(1, static_cast<int>(trace_.steps.size()) - trace_.prompt_steps);
    }
    trace_.fpl_sim_ms = fpl_ms(trace_.fpl_steps, cost_);
    return std::move(trace_);
  }

 private:
  LatencyCostModel cost_;
  StreamTrace trace_;
  std::vector<int> chunk_;
};

[[noreturn]] void runaway(Recorder& rec, std::size_t block, int cap) {
  rec.end_block(cap);
  throw RunawayBlockError("block " + std::to_string(block) + " reached the cap of " +
                              std::to_string(cap) + " tokens without eob",
                          rec.finish());
}

int block_cap(const StreamOptions& options, const StreamText& text, std::size_t k) {
  return options.cap ? *options.cap
                     : default_block_cap(text.ratio, text.word_phonemes[k].size());
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::kL ? "l" : "f"; }

Variant parse_variant(std::string_view s) {
  if (s.size() == 1) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    if (c == 'l') return Variant::kL;
    if (c == 'f') return Variant::kF;
  }
  throw Error(ErrorKind::kInvalidConfig, "variant must be l or f, got '" + std::string(s) + "'");
}

std::string_view to_string(StepPhase phase) {
  switch (phase) {
    case StepPhase::kPrompt: return "prompt";
    case StepPhase::kForced: return "forced";
    case StepPhase::kGenerated: return "generated";
  }
  return "forced";
}

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::kLess: return "less";
    case Ordering::kEqual: return "equal";
    case Ordering::kGreater: return "greater";
  }
  return "equal";
}

void LatencyCostModel::validate() const {
  if (!(per_step_ms > 0.0) || !(codec_chunk_ms > 0.0) || chunk_size < 1) {
    throw Error(ErrorKind::kInvalidConfig, "cost model fields must be positive");
  }
}

StreamText StreamText::from_utterance(const Utterance& utt) {
  return {utt.word_phonemes, utt.separators, utt.ratio};
}

StreamText StreamText::from_blocks(const std::vector<Block>& blocks, int ratio) {
  StreamText text;
  text.ratio = ratio;
  for (const auto& b : blocks) {
    text.word_phonemes.push_back(b.cur_phonemes);
    text.separators.push_back(b.separator);
  }
  return text;
}

std::string StreamText::key() const {
  std::string out;
  for (std::size_t w = 0; w < word_phonemes.size(); ++w) {
    for (const auto& ph : word_phonemes[w]) {
      out += ph;
      out += '\x1f';
    }
    if (w < separators.size()) out += separator_symbol(separators[w]);
    out += '\x1e';
  }
  return out;
}

std::vector<int> StreamTrace::output_stream() const {
  std::vector<int> out;
  for (const auto& step : steps) {
    if (step.phase == StepPhase::kGenerated && step.emitted &&
        step.emitted->cls == TokenClass::kSpeech) {
      out.push_back(step.emitted->id);
    }
  }
  return out;
}

std::vector<PairedStep> StreamTrace::paired_steps() const {
  std::vector<PairedStep> out;
  for (const auto& step : steps) {
    if (step.fed.size() != 2) continue;
    out.push_back({step.fed[0], step.fed[1], step.emitted.value_or(Token::pad())});
  }
  return out;
}

std::vector<Token> StreamTrace::sequence() const {
  std::vector<Token> out;
  for (const auto& step : steps) {
    if (step.fed.size() == 1) out.push_back(step.fed[0]);
  }
  return out;
}

int default_block_cap(int ratio, std::size_t phonemes) {
  return 4 * ratio * static_cast<int>(phonemes) + 8;
}

StreamTrace stream_l(const StreamText& text, Decoder& decoder, const StreamOptions& options) {
  check_text(text);
  options.cost.validate();
  Recorder rec(Variant::kL, text, options);
  std::vector<Token> context;

  if (options.prompt != nullptr && !options.prompt->blocks.empty()) {
    for (auto& tok : render_l(options.prompt->blocks).tokens) {
      context.push_back(tok);
      rec.add(StepPhase::kPrompt, {std::move(tok)}, std::nullopt);
    }
  }

  for (std::size_t k = 0; k < text.word_phonemes.size(); ++k) {
    for (auto& tok : block_text(text, k)) {
      context.push_back(tok);
      rec.add(StepPhase::kForced, {std::move(tok)}, std::nullopt);
    }
    const int cap = block_cap(options, text, k);
    int count = 0;
    for (;;) {
      Token out = decoder.next_l(context);
      check_output(out);
      if (out.cls == TokenClass::kSpeech && count == cap) runaway(rec, k, cap);
      context.push_back(out);
      rec.add(StepPhase::kGenerated, {out}, out);
      if (out.cls == TokenClass::kEob) break;
      ++count;
    }
    rec.end_block(count);
  }
  return rec.finish();
}

StreamTrace stream_f(const StreamText& text, Decoder& decoder, const StreamOptions& options) {
  check_text(text);
  options.cost.validate();
  Recorder rec(Variant::kF, text, options);
  std::vector<PairedStep> context;

  bool after_boundary = false;
  if (options.prompt != nullptr && !options.prompt->blocks.empty()) {
    for (auto& step : render_f(options.prompt->blocks).steps) {
      rec.add(StepPhase::kPrompt, {step.speech_in, step.text_in}, step.target);
      context.push_back(std::move(step));
    }
    after_boundary = true;
  }

  std::deque<Token> pending;
  auto next_text = [&] {
    if (pending.empty()) return Token::pad();
    Token t = std::move(pending.front());
    pending.pop_front();
    return t;
  };

  for (std::size_t k = 0; k < text.word_phonemes.size(); ++k) {
    for (auto& tok : block_text(text, k)) pending.push_back(std::move(tok));
    PairedStep input;
    if (k == 0 && !after_boundary) {
      input.speech_in = Token::zero();
      input.text_in = next_text();
    } else {
      input.speech_in = Token::eob();
      input.text_in = Token::zero();
    }
    const int cap = block_cap(options, text, k);
    int count = 0;
    for (;;) {
      context.push_back(input);
      Token out = decoder.next_f(context);
      check_output(out);
      if (out.cls == TokenClass::kSpeech && count == cap) {
        context.pop_back();
        runaway(rec, k, cap);
      }
      context.back().target = out;
      rec.add(StepPhase::kGenerated, {input.speech_in, input.text_in}, out);
      if (out.cls == TokenClass::kEob) break;
      ++count;
      input = PairedStep{out, next_text(), Token::pad()};
    }
    rec.end_block(count);
  }
  if (!pending.empty()) {
    throw Error(ErrorKind::kTextOverflow,
                std::to_string(pending.size()) + " text symbols left after the final block");
  }
  return rec.finish();
}

StreamTrace stream(Variant variant, const StreamText& text, Decoder& decoder,
                   const StreamOptions& options) {
  return variant == Variant::kL ? stream_l(text, decoder, options)
                                : stream_f(text, decoder, options);
}

std::vector<std::vector<int>> chunk_emit(std::span<const int> tokens, int chunk_size) {
  if (chunk_size < 1) throw Error(ErrorKind::kInvalidConfig, "chunk size must be at least 1");
  std::vector<std::vector<int>> out;
  const auto c = static_cast<std::size_t>(chunk_size);
  for (std::size_t i = 0; i < tokens.size(); i += c) {
    const std::size_t end = std::min(tokens.size(), i + c);
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

double fpl_ms(int fpl_steps, const LatencyCostModel& cost) {
  return fpl_steps * cost.per_step_ms + cost.codec_chunk_ms;
}

bool FplReport::feature_paired_faster() const {
  if (first_variant == second_variant) return false;
  return first_variant == Variant::kF ? ordering == Ordering::kLess
                                      : ordering == Ordering::kGreater;
}

FplReport fpl_compare(const StreamTrace& first, const StreamTrace& second,
                      const LatencyCostModel& cost) {
  cost.validate();
  if (first.utterance_key != second.utterance_key) {
    throw Error(ErrorKind::kTraceMismatch, "traces come from different utterances");
  }
  FplReport r;
  r.first_variant = first.variant;
  r.second_variant = second.variant;
  r.first_ms = fpl_ms(first.fpl_steps, cost);
  r.second_ms = fpl_ms(second.fpl_steps, cost);
  r.ordering = r.first_ms < r.second_ms   ? Ordering::kLess
               : r.first_ms > r.second_ms ? Ordering::kGreater
                                          : Ordering::kEqual;
  return r;
}

}  // namespace ctctts
