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

#include "ctctts/decoders.h"

#include <algorithm>

namespace ctctts {

namespace {

std::vector<Token> targets_of(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  for (const auto& tok : tokens) {
    if (tok.is_target()) out.push_back(tok);
  }
  return out;
}

void check_layout(const CountModel& model, Variant layout) {
  if (model.layout() != layout) {
    throw Error(ErrorKind::kDecoderContract,
                "count model was trained on the " + std::string(to_string(model.layout())) +
                    " layout");
  }
}

void check_corpus(std::size_t size, int order) {
  if (size == 0) throw Error(ErrorKind::kEmptyCorpus, "no training sequences");
  if (order < 1) throw Error(ErrorKind::kInvalidConfig, "order must be at least 1");
}

}  // namespace

OracleDecoder::OracleDecoder(std::vector<Token> targets) : targets_(std::move(targets)) {
  for (const auto& tok : targets_) {
    if (!tok.is_target()) {
      throw Error(ErrorKind::kInvalidConfig, "oracle targets must be speech or eob");
    }
  }
}

OracleDecoder::OracleDecoder(const InterleavedSequenceL& seq)
    : OracleDecoder(targets_of(seq.tokens)) {}

OracleDecoder::OracleDecoder(const PairedSequenceF& seq) {
  for (const auto& step : seq.steps) targets_.push_back(step.target);
}

OracleDecoder OracleDecoder::from_blocks(const std::vector<Block>& blocks) {
  std::vector<Token> targets;
  for (const auto& b : blocks) {
    for (int id : b.speech_tokens) targets.push_back(Token::speech(id));
    targets.push_back(Token::eob());
  }
  return OracleDecoder(std::move(targets));
}

Token OracleDecoder::next() {
  if (cursor_ >= targets_.size()) {
    throw Error(ErrorKind::kExhausted,
                "oracle queried past its " + std::to_string(targets_.size()) + " targets");
  }
  return targets_[cursor_++];
}

Token OracleDecoder::next_l(std::span<const Token>) { return next(); }
Token OracleDecoder::next_f(std::span<const PairedStep>) { return next(); }

CountModel::CountModel(Variant layout, int order) : layout_(layout), order_(order) {
  if (order < 1) throw Error(ErrorKind::kInvalidConfig, "order must be at least 1");
}

std::string CountModel::symbol(const PairedStep& step) {
  return step.speech_in.key() + '\t' + step.text_in.key();
}

int CountModel::output_id(const Token& tok) {
  if (tok.cls == TokenClass::kEob) return kEobId;
  if (tok.cls == TokenClass::kSpeech) return tok.id;
  throw Error(ErrorKind::kInvalidConfig,
              "text-class token " + tok.key() + " cannot be a count-model output");
}

Token CountModel::output_token(int id) {
  return id == kEobId ? Token::eob() : Token::speech(id);
}

void CountModel::observe(std::span<const std::string> context, const Token& target) {
  const int id = output_id(target);
  ++total_targets_;
  if (context.empty()) {
    ++tables_[Context{}][id];
    return;
  }
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(order_));
  for (std::size_t len = 1; len <= n; ++len) {
    Context key(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    ++tables_[std::move(key)][id];
  }
}

void CountModel::set_counts(Context context, Counts counts) {
  for (const auto& [id, n] : counts) {
    if (n < 0) throw Error(ErrorKind::kFormatError, "negative count");
  }
  tables_[std::move(context)] = std::move(counts);
}

Token CountModel::predict(std::span<const std::string> context) const {
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(order_));
  auto best_of = [](const Counts& counts) {
    int best = 0;
    long best_n = -1;
    for (const auto& [id, c] : counts) {
      if (c > best_n) {
        best = id;
        best_n = c;
      }
    }
    return best_n > 0 ? std::optional<int>(best) : std::nullopt;
  };
  if (n == 0) {
    auto it = tables_.find(Context{});
    if (it != tables_.end()) {
      if (auto id = best_of(it->second)) return output_token(*id);
    }
  }
  for (std::size_t len = n; len >= 1; --len) {
    Context key(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    auto it = tables_.find(key);
    if (it == tables_.end()) continue;
    if (auto id = best_of(it->second)) return output_token(*id);
  }
  throw Error(ErrorKind::kUnknownContext,
              context.empty() ? std::string("empty context never observed")
                              : "no suffix of the context ending in '" + context.back() +
                                    "' was observed");
}

CountModel train_counts(const std::vector<InterleavedSequenceL>& corpus, int order) {
  check_corpus(corpus.size(), order);
  CountModel model(Variant::kL, order);
  for (const auto& seq : corpus) {
    std::vector<std::string> symbols;
    symbols.reserve(seq.tokens.size());
    for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
      const Token& tok = seq.tokens[t];
      if (tok.is_target()) model.observe(symbols, tok);
      symbols.push_back(CountModel::symbol(tok));
    }
  }
  return model;
}

CountModel train_counts(const std::vector<PairedSequenceF>& corpus, int order) {
  check_corpus(corpus.size(), order);
  CountModel model(Variant::kF, order);
  for (const auto& seq : corpus) {
    std::vector<std::string> symbols;
    symbols.reserve(seq.steps.size());
    for (const auto& step : seq.steps) {
      symbols.push_back(CountModel::symbol(step));
      model.observe(symbols, step.target);
    }
  }
  return model;
}

Token count_next(const CountModel& model, std::span<const Token> context) {
  check_layout(model, Variant::kL);
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(model.order()));
  std::vector<std::string> symbols;
  for (std::size_t i = context.size() - n; i < context.size(); ++i) {
    symbols.push_back(CountModel::symbol(context[i]));
  }
  return model.predict(symbols);
}

Token count_next(const CountModel& model, std::span<const PairedStep> context) {
  check_layout(model, Variant::kF);
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(model.order()));
  std::vector<std::string> symbols;
  for (std::size_t i = context.size() - n; i < context.size(); ++i) {
    symbols.push_back(CountModel::symbol(context[i]));
  }
  return model.predict(symbols);
}

Token CountDecoder::next_l(std::span<const Token> context) { return count_next(model_, context); }

Token CountDecoder::next_f(std::span<const PairedStep> context) {
  return count_next(model_, context);
}

}  // namespace ctctts
