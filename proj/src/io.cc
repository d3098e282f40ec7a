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

#include "ctctts/io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ctctts/error.h"

namespace ctctts::io {

namespace {

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorKind::kFormatError, what);
}

template <typename F>
auto guarded(const char* what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    format_error(std::string(what) + ": " + e.what());
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(delim, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

Separator separator_value(const std::string& s) {
  auto sep = separator_from_symbol(s);
  if (!sep) format_error("unknown separator '" + s + "'");
  return *sep;
}

// F-channel values: speech ids as numbers, specials as literal strings.
json speech_channel(const Token& tok) {
  switch (tok.cls) {
    case TokenClass::kSpeech: return tok.id;
    case TokenClass::kEob: return "eob";
    case TokenClass::kZero: return "zero";
    default: format_error("token " + tok.key() + " cannot sit in the speech channel");
  }
}

Token speech_channel_from(const json& j) {
  if (j.is_number_integer()) return Token::speech(j.get<int>());
  const auto s = j.get<std::string>();
  if (s == "eob") return Token::eob();
  if (s == "zero") return Token::zero();
  format_error("bad speech channel value '" + s + "'");
}

json text_channel(const Token& tok) {
  switch (tok.cls) {
    case TokenClass::kPhoneme:
    case TokenClass::kSeparator: return tok.symbol;
    case TokenClass::kEos: return "eos";
    case TokenClass::kPad: return "pad";
    case TokenClass::kZero: return "zero";
    default: format_error("token " + tok.key() + " cannot sit in the text channel");
  }
}

Token text_channel_from(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "eos") return Token::eos();
  if (s == "pad") return Token::pad();
  if (s == "zero") return Token::zero();
  if (auto sep = separator_from_symbol(s)) return Token::separator(*sep);
  if (s.empty()) format_error("empty text channel value");
  return Token::phoneme(s);
}

TokenClass class_from(const std::string& s) {
  for (auto cls : {TokenClass::kPhoneme, TokenClass::kSeparator, TokenClass::kSpeech,
                   TokenClass::kEob, TokenClass::kEos, TokenClass::kPad, TokenClass::kZero}) {
    if (s == to_string(cls)) return cls;
  }
  format_error("unknown token class '" + s + "'");
}

StepPhase phase_from(const std::string& s) {
  for (auto p : {StepPhase::kPrompt, StepPhase::kForced, StepPhase::kGenerated}) {
    if (s == to_string(p)) return p;
  }
  format_error("unknown step phase '" + s + "'");
}

Token output_from_key(const std::string& key) {
  if (key == "<eob>") return Token::eob();
  if (key.rfind("t:", 0) == 0) {
    try {
      return Token::speech(std::stoi(key.substr(2)));
    } catch (const std::exception&) {
    }
  }
  format_error("bad count-model output '" + key + "'");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) format_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) format_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) format_error("cannot rename into " + path.string() + ": " + ec.message());
}

std::string dump(const json& j, bool compact) {
  return compact ? j.dump() + "\n" : j.dump(2) + "\n";
}

Posteriogram posteriogram_from_json(const json& j, const std::filesystem::path& base_dir) {
  return guarded("posteriogram manifest", [&] {
    const auto symbols = j.at("alphabet").get<std::vector<std::string>>();
    const auto blank = j.value("blank", std::string("∅"));
    Alphabet alphabet(symbols, blank);
    const std::size_t width = alphabet.size();
    std::vector<double> values;
    std::size_t frames = 0;
    if (j.contains("log_probs")) {
      const auto rows = j.at("log_probs").get<std::vector<std::vector<double>>>();
      frames = rows.size();
      for (const auto& row : rows) {
        if (row.size() != width) format_error("row width differs from alphabet size");
        values.insert(values.end(), row.begin(), row.end());
      }
    } else if (j.contains("binary")) {
      static_assert(std::endian::native == std::endian::little,
                    "sidecar reader assumes a little-endian host");
      const std::string bytes = read_file(base_dir / j.at("binary").get<std::string>());
      if (bytes.size() % (4 * width) != 0) format_error("sidecar size is not a whole number of rows");
      frames = bytes.size() / (4 * width);
      values.resize(frames * width);
      for (std::size_t i = 0; i < values.size(); ++i) {
        float f;
        std::memcpy(&f, bytes.data() + 4 * i, 4);
        values[i] = f;
      }
    } else {
      format_error("manifest needs log_probs or binary");
    }
    if (j.contains("frames") && j.at("frames").get<std::size_t>() != frames) {
      format_error("manifest declares " + std::to_string(j.at("frames").get<std::size_t>()) +
                   " frames, data holds " + std::to_string(frames));
    }
    return Posteriogram(std::move(alphabet), std::move(values), frames);
  });
}

Posteriogram posteriogram_from_csv(const std::string& text, const std::string& blank) {
  const auto lines = lines_of(text);
  if (lines.empty()) format_error("empty CSV posteriogram");
  Alphabet alphabet(split(lines[0], ','), blank);
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != alphabet.size()) {
      format_error("CSV row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                   " fields");
    }
    for (const auto& f : fields) {
      try {
        values.push_back(std::stod(f));
      } catch (const std::exception&) {
        format_error("CSV row " + std::to_string(i) + ": bad number '" + f + "'");
      }
    }
  }
  return Posteriogram(std::move(alphabet), std::move(values), lines.size() - 1);
}

Posteriogram load_posteriogram(const std::filesystem::path& path, const std::string& csv_blank) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return posteriogram_from_csv(text, csv_blank);
  const json j = guarded("posteriogram manifest", [&] { return json::parse(text); });
  return posteriogram_from_json(j, path.parent_path());
}

json posteriogram_to_json(const Posteriogram& post) {
  json rows = json::array();
  for (std::size_t t = 0; t < post.frames(); ++t) {
    const auto row = post.row(t);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"frames", post.frames()},
          {"alphabet", post.alphabet().symbols()},
          {"blank", post.alphabet().blank_symbol()},
          {"log_probs", std::move(rows)}};
}

json posteriogram_to_json_binary(const Posteriogram& post, const std::string& binary_name,
                                 std::string& binary) {
  binary.clear();
  for (std::size_t t = 0; t < post.frames(); ++t) {
    for (double v : post.row(t)) {
      const float f = static_cast<float>(v);
      char bytes[4];
      std::memcpy(bytes, &f, 4);
      binary.append(bytes, 4);
    }
  }
  return {{"frames", post.frames()},
          {"alphabet", post.alphabet().symbols()},
          {"blank", post.alphabet().blank_symbol()},
          {"binary", binary_name}};
}

json utterance_to_json(const Utterance& utt) {
  std::vector<std::string> seps;
  for (auto s : utt.separators) seps.emplace_back(separator_symbol(s));
  return {{"text", utt.text},
          {"words", utt.words},
          {"separators", seps},
          {"word_phonemes", utt.word_phonemes},
          {"speech_tokens", utt.speech_tokens},
          {"ratio", utt.ratio}};
}

Utterance utterance_from_json(const json& j) {
  return guarded("utterance manifest", [&] {
    Utterance utt;
    utt.text = j.value("text", std::string());
    if (j.contains("words")) {
      utt.words = j.at("words").get<std::vector<std::string>>();
    } else {
      utt.words = split_text(utt.text).words;
    }
    if (j.contains("separators")) {
      for (const auto& s : j.at("separators").get<std::vector<std::string>>()) {
        utt.separators.push_back(separator_value(s));
      }
    } else {
      utt.separators = split_text(utt.text).separators;
    }
    if (j.contains("word_phonemes")) {
      utt.word_phonemes = j.at("word_phonemes").get<std::vector<std::vector<std::string>>>();
    }
    utt.speech_tokens = j.value("speech_tokens", std::vector<int>{});
    utt.ratio = j.value("ratio", kDefaultRatio);
    return utt;
  });
}

json alignment_to_json(const UtteranceAlignment& alignment, const Alphabet& alphabet) {
  json frame_labels = json::array();
  for (int label : alignment.refined.frame_labels) frame_labels.push_back(alphabet.phonemes()[label]);
  json phoneme_spans = json::array();
  for (const auto& s : alignment.refined.phoneme_spans) {
    phoneme_spans.push_back(
        {{"phoneme", alphabet.phonemes()[s.label]}, {"start_frame", s.start}, {"end_frame", s.end}});
  }
  json token_spans = json::array();
  for (const auto& s : alignment.tokens.phoneme_token_spans) {
    token_spans.push_back(
        {{"phoneme", alphabet.phonemes()[s.label]}, {"start_token", s.start}, {"end_token", s.end}});
  }
  json path = json::array();
  for (int c : alignment.path.path) path.push_back(alphabet.symbols()[c]);
  return {{"frame_labels", std::move(frame_labels)},
          {"phoneme_spans", std::move(phoneme_spans)},
          {"token_spans", std::move(token_spans)},
          {"ratio", alignment.tokens.ratio},
          {"path", std::move(path)},
          {"score", alignment.path.score}};
}

TokenMap token_map_from_json(const json& j) {
  return guarded("alignment file", [&] {
    TokenMap tmap;
    tmap.ratio = j.value("ratio", kDefaultRatio);
    int label = 0;
    for (const auto& s : j.at("token_spans")) {
      tmap.phoneme_token_spans.push_back(
          {label++, s.at("start_token").get<int>(), s.at("end_token").get<int>()});
    }
    int expected = 0;
    for (const auto& s : tmap.phoneme_token_spans) {
      if (s.start != expected || s.end <= s.start) format_error("token spans do not partition");
      expected = s.end;
    }
    return tmap;
  });
}

json token_to_json(const Token& tok) {
  json value;
  switch (tok.cls) {
    case TokenClass::kPhoneme:
    case TokenClass::kSeparator: value = tok.symbol; break;
    case TokenClass::kSpeech: value = tok.id; break;
    default: value = std::string(to_string(tok.cls)); break;
  }
  return {{"class", std::string(to_string(tok.cls))}, {"value", std::move(value)}};
}

Token token_from_json(const json& j) {
  return guarded("token", [&] {
    const TokenClass cls = class_from(j.at("class").get<std::string>());
    switch (cls) {
      case TokenClass::kPhoneme: return Token::phoneme(j.at("value").get<std::string>());
      case TokenClass::kSeparator: return Token::separator(separator_value(j.at("value").get<std::string>()));
      case TokenClass::kSpeech: return Token::speech(j.at("value").get<int>());
      case TokenClass::kEob: return Token::eob();
      case TokenClass::kEos: return Token::eos();
      case TokenClass::kPad: return Token::pad();
      case TokenClass::kZero: return Token::zero();
    }
    return Token::pad();
  });
}

std::string sequence_l_to_jsonl(const InterleavedSequenceL& seq, bool compact) {
  std::string out;
  std::size_t m = 0;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const bool masked = m < seq.mask_positions.size() &&
                        seq.mask_positions[m] == static_cast<int>(i);
    if (masked) ++m;
    json line = token_to_json(seq.tokens[i]);
    line["pos"] = i;
    line["mask"] = masked;
    out += compact ? line.dump() : line.dump(1);
    out += '\n';
  }
  return out;
}

std::string sequence_f_to_jsonl(const PairedSequenceF& seq, bool compact) {
  std::string out;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto& s = seq.steps[i];
    json line = {{"step", i},
                 {"speech_in", speech_channel(s.speech_in)},
                 {"text_in", text_channel(s.text_in)},
                 {"target", speech_channel(s.target)}};
    out += compact ? line.dump() : line.dump(1);
    out += '\n';
  }
  return out;
}

namespace {

// Splits JSON Lines; pretty-printed records spanning several lines are
// accepted by parsing objects back to back.
std::vector<json> parse_records(const std::string& text) {
  std::vector<json> out;
  guarded("JSON Lines", [&] {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t start = text.find_first_not_of(" \t\r\n", pos);
      if (start == std::string::npos) break;
      std::size_t depth = 0;
      bool in_string = false;
      std::size_t i = start;
      for (; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
          if (c == '\\') ++i;
          else if (c == '"') in_string = false;
        } else if (c == '"') {
          in_string = true;
        } else if (c == '{') {
          ++depth;
        } else if (c == '}') {
          if (--depth == 0) break;
        }
      }
      if (i >= text.size()) format_error("truncated JSON Lines record");
      out.push_back(json::parse(text.substr(start, i + 1 - start)));
      pos = i + 1;
    }
    return 0;
  });
  return out;
}

}  // namespace

std::vector<Token> sequence_l_from_jsonl(const std::string& text) {
  std::vector<Token> out;
  for (const auto& rec : parse_records(text)) {
    if (!rec.contains("pos")) format_error("L record without pos");
    if (rec.at("pos").get<std::size_t>() != out.size()) format_error("L positions out of order");
    out.push_back(token_from_json(rec));
  }
  return out;
}

std::vector<PairedStep> sequence_f_from_jsonl(const std::string& text) {
  std::vector<PairedStep> out;
  for (const auto& rec : parse_records(text)) {
    guarded("F record", [&] {
      if (rec.at("step").get<std::size_t>() != out.size()) format_error("F steps out of order");
      out.push_back({speech_channel_from(rec.at("speech_in")),
                     text_channel_from(rec.at("text_in")),
                     speech_channel_from(rec.at("target"))});
      return 0;
    });
  }
  return out;
}

SequenceFile sequence_from_jsonl(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) format_error("empty sequence file");
  SequenceFile out;
  const auto records = parse_records(text);
  if (records.front().contains("step")) {
    out.variant = Variant::kF;
    out.steps = sequence_f_from_jsonl(text);
  } else {
    out.variant = Variant::kL;
    out.tokens = sequence_l_from_jsonl(text);
  }
  return out;
}

json trace_to_json(const StreamTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json fed = json::array();
    for (const auto& tok : s.fed) fed.push_back(token_to_json(tok));
    steps.push_back({{"step", s.index},
                     {"phase", std::string(to_string(s.phase))},
                     {"fed", std::move(fed)},
                     {"emitted", s.emitted ? token_to_json(*s.emitted) : json(nullptr)},
                     {"chunk", s.chunk ? json(*s.chunk) : json(nullptr)}});
  }
  return {{"variant", std::string(to_string(trace.variant))},
          {"fpl_steps", trace.fpl_steps},
          {"fpl_sim_ms", trace.fpl_sim_ms},
          {"prompt_steps", trace.prompt_steps},
          {"chunks", trace.chunks},
          {"per_block_token_counts", trace.per_block_token_counts},
          {"utterance_key", trace.utterance_key},
          {"steps", std::move(steps)}};
}

StreamTrace trace_from_json(const json& j) {
  return guarded("trace file", [&] {
    StreamTrace t;
    t.variant = parse_variant(j.at("variant").get<std::string>());
    t.fpl_steps = j.at("fpl_steps").get<int>();
    t.fpl_sim_ms = j.at("fpl_sim_ms").get<double>();
    t.prompt_steps = j.value("prompt_steps", 0);
    t.chunks = j.at("chunks").get<std::vector<std::vector<int>>>();
    t.per_block_token_counts = j.value("per_block_token_counts", std::vector<int>{});
    t.utterance_key = j.value("utterance_key", std::string());
    for (const auto& s : j.at("steps")) {
      TraceStep step;
      step.index = s.at("step").get<int>();
      step.phase = phase_from(s.at("phase").get<std::string>());
      for (const auto& tok : s.at("fed")) step.fed.push_back(token_from_json(tok));
      if (!s.at("emitted").is_null()) step.emitted = token_from_json(s.at("emitted"));
      if (!s.at("chunk").is_null()) step.chunk = s.at("chunk").get<int>();
      t.steps.push_back(std::move(step));
    }
    return t;
  });
}

json count_model_to_json(const CountModel& model) {
  json tables = json::array();
  for (const auto& [context, counts] : model.tables()) {
    json ctx = json::array();
    for (const auto& sym : context) {
      if (model.layout() == Variant::kF) {
        const auto tab = sym.find('\t');
        ctx.push_back({sym.substr(0, tab), sym.substr(tab + 1)});
      } else {
        ctx.push_back(sym);
      }
    }
    json c = json::object();
    for (const auto& [id, n] : counts) c[CountModel::output_token(id).key()] = n;
    tables.push_back({{"context", std::move(ctx)}, {"counts", std::move(c)}});
  }
  return {{"k", model.order()},
          {"layout", std::string(to_string(model.layout()))},
          {"total_targets", model.total_targets()},
          {"tables", std::move(tables)}};
}

CountModel count_model_from_json(const json& j) {
  return guarded("count model", [&] {
    CountModel model(parse_variant(j.value("layout", std::string("l"))), j.at("k").get<int>());
    for (const auto& entry : j.at("tables")) {
      CountModel::Context ctx;
      for (const auto& sym : entry.at("context")) {
        if (sym.is_array()) {
          ctx.push_back(sym.at(0).get<std::string>() + '\t' + sym.at(1).get<std::string>());
        } else {
          ctx.push_back(sym.get<std::string>());
        }
      }
      CountModel::Counts counts;
      for (const auto& [key, n] : entry.at("counts").items()) {
        counts[CountModel::output_id(output_from_key(key))] = n.get<long>();
      }
      model.set_counts(std::move(ctx), std::move(counts));
    }
    model.set_total_targets(j.value("total_targets", 0L));
    return model;
  });
}

json cost_to_json(const LatencyCostModel& cost) {
  return {{"per_step_ms", cost.per_step_ms},
          {"codec_chunk_ms", cost.codec_chunk_ms},
          {"chunk_size", cost.chunk_size}};
}

LatencyCostModel cost_from_json(const json& j) {
  return guarded("cost model", [&] {
    LatencyCostModel cost;
    cost.per_step_ms = j.value("per_step_ms", cost.per_step_ms);
    cost.codec_chunk_ms = j.value("codec_chunk_ms", cost.codec_chunk_ms);
    cost.chunk_size = j.value("chunk_size", cost.chunk_size);
    cost.validate();
    return cost;
  });
}

}  // namespace ctctts::io
