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

#pragma once

#include <climits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctctts/interleave.h"
#include "ctctts/streaming.h"

namespace ctctts {

// Replays ground-truth targets (speech tokens and eob) in order, ignoring
// the context it is given.
class OracleDecoder : public Decoder {
 public:
  explicit OracleDecoder(std::vector<Token> targets);
  explicit OracleDecoder(const InterleavedSequenceL& seq);
  explicit OracleDecoder(const PairedSequenceF& seq);
  // Both layouts share the same target stream.
  static OracleDecoder from_blocks(const std::vector<Block>& blocks);

  Token next_l(std::span<const Token> context) override;
  Token next_f(std::span<const PairedStep> context) override;

  // Throws Exhausted past the final target.
  Token next();
  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return targets_.size(); }
  void reset() { cursor_ = 0; }

 private:
  std::vector<Token> targets_;
  std::size_t cursor_ = 0;
};

// Order-k count model with backoff. Contexts are input-side symbols only:
// tokens for the length-wise layout, (speech_in, text_in) pairs for the
// feature-paired one. Only speech and eob positions become targets.
class CountModel {
 public:
  // Ranks eob after every speech id in the lowest-id tie-break.
  static constexpr int kEobId = INT_MAX;

  using Context = std::vector<std::string>;
  using Counts = std::map<int, long>;

  CountModel(Variant layout, int order);

  Variant layout() const { return layout_; }
  int order() const { return order_; }
  const std::map<Context, Counts>& tables() const { return tables_; }
  long total_targets() const { return total_targets_; }

  // Counts `target` under every suffix of `context` of length 1..order, or
  // under the empty context when `context` is empty.
  void observe(std::span<const std::string> context, const Token& target);
  void set_counts(Context context, Counts counts);
  void set_total_targets(long n) { total_targets_ = n; }

  // Longest seen suffix wins; argmax with lowest-id ties. Throws
  // UnknownContext.
  Token predict(std::span<const std::string> context) const;

  static std::string symbol(const Token& tok) { return tok.key(); }
  static std::string symbol(const PairedStep& step);
  static int output_id(const Token& tok);
  static Token output_token(int id);

 private:
  Variant layout_;
  int order_;
  std::map<Context, Counts> tables_;
  long total_targets_ = 0;
};

// Throws EmptyCorpus, InvalidConfig for order < 1.
CountModel train_counts(const std::vector<InterleavedSequenceL>& corpus, int order);
CountModel train_counts(const std::vector<PairedSequenceF>& corpus, int order);

Token count_next(const CountModel& model, std::span<const Token> context);
Token count_next(const CountModel& model, std::span<const PairedStep> context);

// Greedy decoder over a shared, read-only count model.
class CountDecoder : public Decoder {
 public:
  explicit CountDecoder(const CountModel& model) : model_(model) {}
  Token next_l(std::span<const Token> context) override;
  Token next_f(std::span<const PairedStep> context) override;

 private:
  const CountModel& model_;
};

}  // namespace ctctts
