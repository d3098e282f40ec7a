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

#include "doctest.h"

#include "corpus.h"
#include "ctctts/decoders.h"
#include "ctctts/error.h"

using namespace ctctts;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kFormatError;
}

std::vector<int> iota_tokens(int first, int n) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i) v.push_back(first + i);
  return v;
}

std::vector<Block> hi_there_blocks() {
  return {Block{0, {"h", "aɪ"}, Separator::kSpace, {"ð", "ɛ", "ɹ"}, iota_tokens(0, 15)},
          Block{1, {"ð", "ɛ", "ɹ"}, Separator::kPeriod, {}, iota_tokens(15, 15)}};
}

}  // namespace

TEST_CASE("oracle decoder replays targets then exhausts") {
  OracleDecoder o(render_l(hi_there_blocks()));
  CHECK(o.size() == 32);
  CHECK(o.next() == Token::speech(0));
  for (int i = 1; i < 15; ++i) o.next();
  CHECK(o.next() == Token::eob());
  for (int i = 0; i < 16; ++i) o.next();
  CHECK(o.cursor() == 32);
  CHECK(kind_of([&] { o.next(); }) == ErrorKind::kExhausted);
  o.reset();
  CHECK(o.next() == Token::speech(0));

  OracleDecoder f(render_f(hi_there_blocks()));
  OracleDecoder b = OracleDecoder::from_blocks(hi_there_blocks());
  CHECK(f.size() == b.size());
  while (b.cursor() < b.size()) CHECK(f.next() == b.next());
}

TEST_CASE("train_counts counts only speech and eob targets") {
  const auto l = render_l(hi_there_blocks());
  const auto model = train_counts(std::vector<InterleavedSequenceL>{l}, 4);
  CHECK(model.total_targets() == (15 + 1) + (15 + 1));
  for (const auto& [ctx, counts] : model.tables()) {
    CHECK(ctx.size() <= 4);
    for (const auto& [id, n] : counts) {
      CHECK(n > 0);
      CHECK(CountModel::output_token(id).is_target());
    }
  }

  const auto fm = train_counts(std::vector<PairedSequenceF>{render_f(hi_there_blocks())}, 4);
  CHECK(fm.total_targets() == 32);
  CHECK(fm.layout() == Variant::kF);
}

TEST_CASE("order one on a two-token sequence has two contexts") {
  InterleavedSequenceL seq;
  seq.tokens = {Token::speech(5), Token::eob()};
  const auto model = train_counts(std::vector<InterleavedSequenceL>{seq}, 1);
  CHECK(model.tables().size() == 2);
  CHECK(model.tables().count({}) == 1);
  CHECK(model.tables().count({"t:5"}) == 1);
}

TEST_CASE("text values at masked positions never become outputs") {
  auto blocks = hi_there_blocks();
  const auto a = train_counts(std::vector<InterleavedSequenceL>{render_l(blocks)}, 2);
  blocks[0].cur_phonemes = {"x", "y"};
  const auto b = train_counts(std::vector<InterleavedSequenceL>{render_l(blocks)}, 2);
  CHECK(a.total_targets() == b.total_targets());
  // Relabeled text changes contexts only; the output multiset is unchanged.
  std::map<int, long> out_a, out_b;
  for (const auto& [ctx, counts] : a.tables())
    if (ctx.size() == 1)
      for (const auto& [id, n] : counts) out_a[id] += n;
  for (const auto& [ctx, counts] : b.tables())
    if (ctx.size() == 1)
      for (const auto& [id, n] : counts) out_b[id] += n;
  CHECK(out_a == out_b);
}

TEST_CASE("prediction uses backoff and lowest-id ties") {
  CountModel m(Variant::kL, 3);
  m.set_counts({"t:1", "t:2"}, {{9, 1}});
  m.set_counts({"t:2"}, {{4, 2}, {3, 2}, {CountModel::kEobId, 2}});
  const std::vector<Token> ctx = {Token::speech(0), Token::speech(1), Token::speech(2)};
  CHECK(count_next(m, ctx) == Token::speech(9));
  const std::vector<Token> other = {Token::speech(7), Token::speech(2)};
  CHECK(count_next(m, other) == Token::speech(3));
  const std::vector<Token> unseen = {Token::speech(42)};
  CHECK(kind_of([&] { count_next(m, unseen); }) == ErrorKind::kUnknownContext);
  const std::vector<PairedStep> fctx = {{Token::zero(), Token::phoneme("a"), Token::pad()}};
  CHECK(kind_of([&] { count_next(m, fctx); }) == ErrorKind::kDecoderContract);

  CountModel e(Variant::kL, 2);
  e.set_counts({"t:1"}, {{CountModel::kEobId, 1}});
  CHECK(count_next(e, std::vector<Token>{Token::speech(1)}) == Token::eob());
}

TEST_CASE("training errors") {
  CHECK(kind_of([] { train_counts(std::vector<InterleavedSequenceL>{}, 4); }) ==
        ErrorKind::kEmptyCorpus);
  CHECK(kind_of([] { train_counts(std::vector<PairedSequenceF>{}, 4); }) ==
        ErrorKind::kEmptyCorpus);
  CHECK(kind_of([] {
          train_counts(std::vector<InterleavedSequenceL>{render_l(hi_there_blocks())}, 0);
        }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("count model memorizes a small synthetic corpus") {
  std::vector<corpus::Sample> samples;
  for (std::uint64_t seed : {3u, 4u, 5u}) samples.push_back(corpus::make_sample(seed, 6));
  std::vector<InterleavedSequenceL> lcorpus;
  std::vector<PairedSequenceF> fcorpus;
  for (const auto& s : samples) {
    lcorpus.push_back(render_l(s.blocks));
    fcorpus.push_back(render_f(s.blocks));
  }
  const auto lm = train_counts(lcorpus, 4);
  const auto fm = train_counts(fcorpus, 4);
  CountDecoder ld(lm), fd(fm);
  for (const auto& s : samples) {
    const auto text = StreamText::from_utterance(s.synth.utterance);
    CHECK(stream_l(text, ld).output_stream() == s.synth.utterance.speech_tokens);
    CHECK(stream_f(text, fd).output_stream() == s.synth.utterance.speech_tokens);

    // Position by position agreement with the oracle on the training data.
    auto oracle = OracleDecoder::from_blocks(s.blocks);
    const auto steps = render_f(s.blocks).steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      CHECK(count_next(fm, std::span(steps).first(i + 1)) == oracle.next());
    }
  }
}
