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

// Synthetic corpora pushed through the real pipeline (synth, align, blocks).
#pragma once

#include <cstdint>
#include <vector>

#include "ctctts/alignment.h"
#include "ctctts/interleave.h"
#include "ctctts/lexicon.h"

namespace corpus {

struct Sample {
  ctctts::SynthUtterance synth;
  std::vector<ctctts::Block> blocks;
};

inline Sample make_sample(std::uint64_t seed, int words) {
  ctctts::SynthConfig cfg;
  cfg.word_count = words;
  Sample s{ctctts::synth_utterance(seed, cfg), {}};
  const auto& utt = s.synth.utterance;
  const auto aligned = ctctts::align_utterance(
      s.synth.posteriogram, utt.target_labels(s.synth.posteriogram.alphabet()), utt.ratio,
      utt.speech_tokens.size());
  s.blocks = ctctts::build_blocks(utt, ctctts::word_spans(utt, aligned.tokens));
  return s;
}

}  // namespace corpus
