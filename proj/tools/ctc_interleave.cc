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

// ctc_interleave: command-line front end for alignment, interleaving,
// streaming simulation, synthetic data generation and sequence statistics.
//
// Exit codes: 0 success, 2 input or contract error, 3 runaway block.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctctts/alignment.h"
#include "ctctts/decoders.h"
#include "ctctts/error.h"
#include "ctctts/interleave.h"
#include "ctctts/io.h"
#include "ctctts/lexicon.h"
#include "ctctts/streaming.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctctts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRunaway = 3;

struct Globals {
  bool compact = false;
  std::string log_level;
};

std::shared_ptr<spdlog::logger> g_log;

void setup_logging(const std::string& flag_level) {
  g_log = spdlog::stderr_color_st("ctc_interleave");
  g_log->set_pattern("%l: %v");
  std::string level = flag_level;
  if (level.empty()) {
    const char* env = std::getenv("CTC_INTERLEAVE_LOG");
    level = env != nullptr ? env : "warn";
  }
  if (level == "error") {
    g_log->set_level(spdlog::level::err);
  } else if (level == "warn") {
    g_log->set_level(spdlog::level::warn);
  } else if (level == "info") {
    g_log->set_level(spdlog::level::info);
  } else if (level == "debug") {
    g_log->set_level(spdlog::level::debug);
  } else {
    g_log->set_level(spdlog::level::warn);
    g_log->warn("unknown log level '{}', using warn", level);
  }
}

json load_json(const fs::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormatError, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j, const Globals& g) {
  io::write_file_atomic(path, io::dump(j, g.compact));
  g_log->info("wrote {}", path.string());
}

std::vector<Block> load_blocks(const fs::path& path, Variant* layout = nullptr) {
  const auto file = io::sequence_from_jsonl(io::read_file(path));
  if (layout != nullptr) *layout = file.variant;
  return file.variant == Variant::kL ? parse_l(file.tokens) : parse_f(file.steps);
}

// Output paths must sit in an existing directory.
const auto kWritablePath = CLI::Validator(
    [](std::string& p) -> std::string {
      const fs::path parent = fs::absolute(fs::path(p)).parent_path();
      if (!fs::is_directory(parent)) return "directory does not exist: " + parent.string();
      return {};
    },
    "PATH", "writable path");

// --- align ---------------------------------------------------------------

struct AlignArgs {
  std::string posteriors, lexicon, utterance, out;
  std::optional<int> ratio;
  std::string blank = "∅";
};

int run_align(const AlignArgs& a, const Globals& g) {
  const auto post = io::load_posteriogram(a.posteriors, a.blank);
  const auto lexicon = load_lexicon(io::read_file(a.lexicon), &post.alphabet());
  auto utt = io::utterance_from_json(load_json(a.utterance));
  if (a.ratio) utt.ratio = *a.ratio;

  std::vector<std::vector<std::string>> from_lexicon;
  for (const auto& w : utt.words) from_lexicon.push_back(lexicon.at(w));
  if (!utt.word_phonemes.empty() && utt.word_phonemes != from_lexicon) {
    throw Error(ErrorKind::kInvalidConfig,
                "utterance pronunciations disagree with the lexicon");
  }
  utt.word_phonemes = std::move(from_lexicon);
  utt.validate();

  const auto target = utt.target_labels(post.alphabet());
  const auto aligned = align_utterance(post, target, utt.ratio, utt.speech_tokens.size());
  g_log->info("aligned {} phonemes over {} frames, score {}", target.size(), post.frames(),
              aligned.path.score);
  write_json(a.out, io::alignment_to_json(aligned, post.alphabet()), g);
  return kExitOk;
}

// --- interleave ----------------------------------------------------------

struct InterleaveArgs {
  std::string alignment, utterance, variant = "l", out, lexicon;
};

int run_interleave(const InterleaveArgs& a, const Globals&) {
  auto utt = io::utterance_from_json(load_json(a.utterance));
  if (utt.word_phonemes.empty()) {
    if (a.lexicon.empty()) {
      throw Error(ErrorKind::kInvalidConfig,
                  "utterance has no word_phonemes; pass --lexicon to look them up");
    }
    const auto lexicon = load_lexicon(io::read_file(a.lexicon));
    for (const auto& w : utt.words) utt.word_phonemes.push_back(lexicon.at(w));
  }
  const auto tmap = io::token_map_from_json(load_json(a.alignment));
  const auto blocks = build_blocks(utt, word_spans(utt, tmap));
  const Variant variant = parse_variant(a.variant);

  std::string text;
  if (variant == Variant::kL) {
    const auto seq = render_l(blocks);
    g_log->info("{} blocks, {} tokens, {} masked", blocks.size(), seq.tokens.size(),
                seq.mask_positions.size());
    text = io::sequence_l_to_jsonl(seq);
  } else {
    const auto seq = render_f(blocks);
    for (const auto& w : seq.warnings) g_log->warn("{}", w);
    if (seq.carried_symbols > 0) {
      g_log->warn("{} text symbols carried into later blocks", seq.carried_symbols);
    }
    g_log->info("{} blocks, {} steps", blocks.size(), seq.steps.size());
    text = io::sequence_f_to_jsonl(seq);
  }
  io::write_file_atomic(a.out, text);
  return kExitOk;
}

// --- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string sequence, variant, decoder = "oracle", model, cost, out, prompt;
  std::optional<int> chunk_size, cap;
  std::optional<double> per_step_ms, codec_chunk_ms;
  int ratio = kDefaultRatio;
};

int run_simulate(const SimulateArgs& a, const Globals& g) {
  Variant layout = Variant::kL;
  const auto blocks = load_blocks(a.sequence, &layout);
  const Variant variant = a.variant.empty() ? layout : parse_variant(a.variant);

  LatencyCostModel cost;
  if (!a.cost.empty()) cost = io::cost_from_json(load_json(a.cost));
  if (a.chunk_size) cost.chunk_size = *a.chunk_size;
  if (a.per_step_ms) cost.per_step_ms = *a.per_step_ms;
  if (a.codec_chunk_ms) cost.codec_chunk_ms = *a.codec_chunk_ms;
  cost.validate();

  StreamOptions options;
  options.cost = cost;
  options.cap = a.cap;
  PromptPrefix prompt;
  if (!a.prompt.empty()) {
    prompt.blocks = load_blocks(a.prompt);
    options.prompt = &prompt;
  }

  std::unique_ptr<Decoder> decoder;
  std::optional<CountModel> model;
  if (a.decoder == "oracle") {
    decoder = std::make_unique<OracleDecoder>(OracleDecoder::from_blocks(blocks));
  } else {
    model = io::count_model_from_json(load_json(a.model));
    if (model->layout() != variant) {
      throw Error(ErrorKind::kDecoderContract,
                  "count model was trained on the " + std::string(to_string(model->layout())) +
                      " layout but the " + std::string(to_string(variant)) +
                      " engine was requested");
    }
    decoder = std::make_unique<CountDecoder>(*model);
  }

  const auto text = StreamText::from_blocks(blocks, a.ratio);
  try {
    const auto trace = stream(variant, text, *decoder, options);
    g_log->info("{} steps, fpl_steps {}, fpl_sim_ms {}", trace.steps.size(), trace.fpl_steps,
                trace.fpl_sim_ms);
    write_json(a.out, io::trace_to_json(trace), g);
    return kExitOk;
  } catch (const RunawayBlockError& e) {
    write_json(a.out, io::trace_to_json(e.trace()), g);
    g_log->error("{} (partial trace written to {})", e.what(), a.out);
    return kExitRunaway;
  }
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> sequences;
  std::string variant, out;
  int order = 4;
};

int run_train(const TrainArgs& a, const Globals& g) {
  std::vector<std::vector<Block>> corpus;
  Variant layout = Variant::kL;
  for (std::size_t i = 0; i < a.sequences.size(); ++i) {
    Variant v = Variant::kL;
    corpus.push_back(load_blocks(a.sequences[i], &v));
    if (i == 0) layout = v;
  }
  const Variant variant = a.variant.empty() ? layout : parse_variant(a.variant);
  std::optional<CountModel> model;
  if (variant == Variant::kL) {
    std::vector<InterleavedSequenceL> seqs;
    for (const auto& b : corpus) seqs.push_back(render_l(b));
    model = train_counts(seqs, a.order);
  } else {
    std::vector<PairedSequenceF> seqs;
    for (const auto& b : corpus) seqs.push_back(render_f(b));
    model = train_counts(seqs, a.order);
  }
  g_log->info("{} contexts, {} targets", model->tables().size(), model->total_targets());
  write_json(a.out, io::count_model_to_json(*model), g);
  return kExitOk;
}

// --- gen -----------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  int words = 2;
  int ratio = kDefaultRatio;
  double peak = 0.95;
  std::string out_dir;
  bool binary = false;
};

int run_gen(const GenArgs& a, const Globals& g) {
  SynthConfig cfg;
  cfg.word_count = a.words;
  cfg.ratio = a.ratio;
  cfg.peak_prob = a.peak;
  const auto s = synth_utterance(a.seed, cfg);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_json(dir / "utterance.json", io::utterance_to_json(s.utterance), g);
  if (a.binary) {
    std::string bytes;
    const auto manifest = io::posteriogram_to_json_binary(s.posteriogram, "posteriors.f32", bytes);
    io::write_file_atomic(dir / "posteriors.f32", bytes);
    write_json(dir / "posteriors.json", manifest, g);
  } else {
    write_json(dir / "posteriors.json", io::posteriogram_to_json(s.posteriogram), g);
  }
  io::write_file_atomic(dir / "lexicon.tsv", s.lexicon.to_text());
  return kExitOk;
}

// --- stats ---------------------------------------------------------------

struct StatsArgs {
  std::string sequence, out;
};

int run_stats(const StatsArgs& a, const Globals& g) {
  Variant layout = Variant::kL;
  const auto blocks = load_blocks(a.sequence, &layout);
  std::size_t text = 0, speech = 0;
  json per_block = json::array();
  for (const auto& b : blocks) {
    const std::size_t t = b.text().size();
    text += t;
    speech += b.speech_tokens.size();
    json entry = {{"block", b.index},
                  {"text", t},
                  {"speech", b.speech_tokens.size()}};
    entry["length"] = layout == Variant::kL ? t + b.speech_tokens.size() + 1
                                            : b.speech_tokens.size() + 1;
    per_block.push_back(std::move(entry));
  }
  const std::size_t eob = blocks.size();
  const std::size_t length = layout == Variant::kL ? text + speech + eob : speech + eob;
  json out = {{"variant", to_string(layout)},
              {"blocks", blocks.size()},
              {"words", blocks.size()},
              {"length", length},
              {"text_symbols", text},
              {"speech_tokens", speech},
              {"eob", eob},
              {"text_speech_ratio", speech == 0 ? 0.0 : double(text) / double(speech)},
              {"per_block", std::move(per_block)}};
  // Only the length-wise layout has text positions to mask; in the paired
  // layout text rides in input slots, so report how full those slots are.
  if (layout == Variant::kL) {
    out["mask_coverage"] = double(text) / double(length);
  } else {
    out["text_slot_occupancy"] = double(text) / double(length);
  }
  const std::string rendered = io::dump(out, g.compact);
  std::cout << rendered;
  if (!a.out.empty()) io::write_file_atomic(a.out, rendered);
  return kExitOk;
}

// --- compare -------------------------------------------------------------

struct CompareArgs {
  std::string first, second, cost;
};

int run_compare(const CompareArgs& a, const Globals& g) {
  const auto t1 = io::trace_from_json(load_json(a.first));
  const auto t2 = io::trace_from_json(load_json(a.second));
  LatencyCostModel cost;
  if (!a.cost.empty()) cost = io::cost_from_json(load_json(a.cost));
  const auto r = fpl_compare(t1, t2, cost);
  const json out = {{"first", {{"variant", to_string(r.first_variant)}, {"fpl_sim_ms", r.first_ms}}},
                    {"second", {{"variant", to_string(r.second_variant)}, {"fpl_sim_ms", r.second_ms}}},
                    {"ordering", to_string(r.ordering)},
                    {"feature_paired_faster", r.feature_paired_faster()}};
  std::cout << io::dump(out, g.compact);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTC-aligned text/speech interleaving toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--compact", g.compact, "write single-line JSON");
  app.add_option("--log-level", g.log_level, "error|warn|info|debug (overrides CTC_INTERLEAVE_LOG)")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "CTC forced alignment to frame and token spans");
  c_align->add_option("--posteriors", align.posteriors)->required()->check(CLI::ExistingFile);
  c_align->add_option("--lexicon", align.lexicon)->required()->check(CLI::ExistingFile);
  c_align->add_option("--utterance", align.utterance)->required()->check(CLI::ExistingFile);
  c_align->add_option("--ratio", align.ratio, "speech tokens per frame")->check(CLI::PositiveNumber);
  c_align->add_option("--blank", align.blank, "blank symbol for CSV posteriors");
  c_align->add_option("--out", align.out)->required()->check(kWritablePath);

  InterleaveArgs inter;
  auto* c_inter = app.add_subcommand("interleave", "render bi-word blocks as a sequence file");
  c_inter->add_option("--alignment", inter.alignment)->required()->check(CLI::ExistingFile);
  c_inter->add_option("--utterance", inter.utterance)->required()->check(CLI::ExistingFile);
  c_inter->add_option("--lexicon", inter.lexicon)->check(CLI::ExistingFile);
  c_inter->add_option("--variant", inter.variant)->check(CLI::IsMember({"l", "f"}));
  c_inter->add_option("--out", inter.out)->required()->check(kWritablePath);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "run a streaming engine over a sequence file");
  c_sim->add_option("--sequence", sim.sequence)->required()->check(CLI::ExistingFile);
  c_sim->add_option("--variant", sim.variant, "defaults to the sequence file's layout")
      ->check(CLI::IsMember({"l", "f"}));
  c_sim->add_option("--decoder", sim.decoder)->check(CLI::IsMember({"oracle", "counts"}));
  auto* model_opt = c_sim->add_option("--model", sim.model)->check(CLI::ExistingFile);
  c_sim->add_option("--chunk-size", sim.chunk_size)->check(CLI::PositiveNumber);
  c_sim->add_option("--cost", sim.cost)->check(CLI::ExistingFile);
  c_sim->add_option("--per-step-ms", sim.per_step_ms);
  c_sim->add_option("--codec-chunk-ms", sim.codec_chunk_ms);
  c_sim->add_option("--cap", sim.cap, "tokens per block before RunawayBlock")
      ->check(CLI::NonNegativeNumber);
  c_sim->add_option("--ratio", sim.ratio, "tokens per frame, for the default cap")
      ->check(CLI::PositiveNumber);
  c_sim->add_option("--prompt", sim.prompt, "sequence file of pre-aligned prompt blocks")
      ->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out)->required()->check(kWritablePath);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "fit a count model on sequence files");
  c_train->add_option("--sequence", train.sequences)->required()->check(CLI::ExistingFile);
  c_train->add_option("--variant", train.variant)->check(CLI::IsMember({"l", "f"}));
  c_train->add_option("--order", train.order)->check(CLI::PositiveNumber);
  c_train->add_option("--out", train.out)->required()->check(kWritablePath);

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "write a synthetic utterance, posteriogram and lexicon");
  c_gen->add_option("--seed", gen.seed)->required();
  c_gen->add_option("--words", gen.words)->check(CLI::PositiveNumber);
  c_gen->add_option("--ratio", gen.ratio)->check(CLI::PositiveNumber);
  c_gen->add_option("--peak", gen.peak, "peak frame probability");
  c_gen->add_flag("--binary", gen.binary, "store posteriors in a float32 sidecar");
  c_gen->add_option("--out-dir", gen.out_dir)->required();

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "print block and mask statistics as JSON");
  c_stats->add_option("--sequence", stats.sequence)->required()->check(CLI::ExistingFile);
  c_stats->add_option("--out", stats.out)->check(kWritablePath);

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "compare first-packet latency of two traces");
  c_cmp->add_option("first", cmp.first)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("second", cmp.second)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--cost", cmp.cost)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  setup_logging(g.log_level);

  try {
    if (c_sim->parsed() && sim.decoder == "counts" && model_opt->count() == 0) {
      throw Error(ErrorKind::kInvalidConfig, "--decoder counts requires --model");
    }
    if (c_align->parsed()) return run_align(align, g);
    if (c_inter->parsed()) return run_interleave(inter, g);
    if (c_sim->parsed()) return run_simulate(sim, g);
    if (c_train->parsed()) return run_train(train, g);
    if (c_gen->parsed()) return run_gen(gen, g);
    if (c_stats->parsed()) return run_stats(stats, g);
    if (c_cmp->parsed()) return run_compare(cmp, g);
  } catch (const Error& e) {
    g_log->error("{}", e.what());
    return e.kind() == ErrorKind::kRunawayBlock ? kExitRunaway : kExitInput;
  } catch (const std::exception& e) {
    g_log->error("{}", e.what());
    return kExitInput;
  }
  return kExitInput;
}
