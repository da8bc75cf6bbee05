// src/prompting.cc

// Copyright 2026  The Remo Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "remo/prompting.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "json.hpp"

namespace remo {

namespace {

// Canonical v1 prompt texts. Trailing spaces inside the templates are
// intentional and load-bearing; editors must not strip them.
constexpr std::string_view kBaseline1Template =
    "For each of the headlines below, what are the top 2 dominant emotions "
    "(must choose from these 8 emotions: Amusement, Awe, Contentment, "
    "Excitement, Fear, Sadness, Anger, and Disgust) that the reader might "
    "feel after reading the headlines? The dominant emotion is the emotion "
    "most commonly experienced among/by the majority of "
    "population/individuals who read the headline. Please only return a "
    "list of {{count}} dominant emotions tuples that the readers might feel "
    "corresponding to each of the headlines. For each tuple in the list, "
    "the first element should be the most likely dominant emotion and the "
    "second element should be the second most likely dominant emotion. Here "
    "are the headlines: {{headlines}}\n";

constexpr std::string_view kGenerationPreamble =
    "Please generate 10 short first-person freetext perspectives on how "
    "readers might feel about each of the following headlines related to "
    "gun control and violence. For each generation, in addition to the "
    "freetext, also write the emotion (Amusement, Awe, Contentment, "
    "Excitement, Fear, Sadness, Anger, and Disgust) of this freetext next "
    "to the freetext, please use ; to separate freetext and emotion. ";

const std::string kZeroShotTemplate =
    std::string(kGenerationPreamble) +
    "\n\nHere is the headline for you to generate freetext: {{headline}}\n";

const std::string kFewShotTemplate =
    std::string(kGenerationPreamble) +
    "\nHere are {{shots}} examples that I want you to learn from, mimic the "
    "content and learn from people's freetext explanations examples: \n\n"
    "{{examples}}\n"
    "Here is the headline for you to generate freetext: {{headline}}\n";

std::string replace_slot(std::string text, std::string_view slot,
                         std::string_view value) {
  const std::string marker = "{{" + std::string(slot) + "}}";
  size_t pos = 0;
  while ((pos = text.find(marker, pos)) != std::string::npos) {
    text.replace(pos, marker.size(), value);
    pos += value.size();
  }
  return text;
}

std::string strip_list_markup(std::string_view line) {
  std::string_view body = trim(line);
  // Leading enumeration: digits followed by '.'  ')' or ':'.
  size_t i = 0;
  while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
    ++i;
  }
  if (i > 0 && i < body.size() &&
      (body[i] == '.' || body[i] == ')' || body[i] == ':')) {
    body = trim(body.substr(i + 1));
  }
  return std::string(body);
}

}  // namespace

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::Baseline1: return "baseline1";
    case PromptMode::ZeroShot: return "zero_shot";
    case PromptMode::FewShotRandom: return "few_shot_random";
    case PromptMode::FewShotFrames: return "few_shot_frames";
  }
  return "zero_shot";
}

PromptMode parse_prompt_mode(std::string_view token) {
  if (token == "baseline1") return PromptMode::Baseline1;
  if (token == "zero_shot") return PromptMode::ZeroShot;
  if (token == "few_shot_random") return PromptMode::FewShotRandom;
  if (token == "few_shot_frames") return PromptMode::FewShotFrames;
  throw ConfigError("unknown prompt mode: '" + std::string(token) + "'");
}

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates templates = [] {
    PromptTemplates t;
    t.version = "1";
    t.baseline1 = std::string(kBaseline1Template);
    t.zero_shot = kZeroShotTemplate;
    t.few_shot = kFewShotTemplate;
    return t;
  }();
  return templates;
}

PromptTemplates PromptTemplates::load(const std::string& dir) {
  namespace fs = std::filesystem;
  PromptTemplates templates;
  templates.baseline1 = read_file((fs::path(dir) / "baseline1.txt").string());
  templates.zero_shot = read_file((fs::path(dir) / "zero_shot.txt").string());
  templates.few_shot = read_file((fs::path(dir) / "few_shot.txt").string());
  const auto manifest_path = fs::path(dir) / "templates_manifest.json";
  if (fs::exists(manifest_path)) {
    const auto doc = nlohmann::json::parse(read_file(manifest_path.string()));
    templates.version = doc.at("version").get<std::string>();
  }
  return templates;
}

void PromptTemplates::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_file((fs::path(dir) / "baseline1.txt").string(), baseline1);
  write_file((fs::path(dir) / "zero_shot.txt").string(), zero_shot);
  write_file((fs::path(dir) / "few_shot.txt").string(), few_shot);
  nlohmann::ordered_json manifest;
  manifest["version"] = version;
  manifest["hash"] = hash();
  manifest["files"] = {"baseline1.txt", "zero_shot.txt", "few_shot.txt"};
  write_file((fs::path(dir) / "templates_manifest.json").string(),
             manifest.dump(2) + "\n");
}

std::string PromptTemplates::hash() const {
  std::uint64_t h = fnv1a64(baseline1);
  h = fnv1a64(zero_shot, h);
  h = fnv1a64(few_shot, h);
  return hex64(h);
}

std::string build_baseline1_prompt(std::span<const std::string> headlines,
                                   const PromptTemplates& templates) {
  if (headlines.empty()) {
    throw std::invalid_argument("baseline1 prompt needs at least 1 headline");
  }
  std::ostringstream list;
  for (size_t i = 0; i < headlines.size(); ++i) {
    list << '\n' << (i + 1) << ". " << headlines[i];
  }
  std::string prompt = replace_slot(templates.baseline1, "count",
                                    std::to_string(headlines.size()));
  return replace_slot(std::move(prompt), "headlines", list.str());
}

std::string build_zero_shot_prompt(const std::string& headline,
                                   const PromptTemplates& templates) {
  if (trim(headline).empty()) {
    throw std::invalid_argument("zero-shot prompt needs a non-empty headline");
  }
  return replace_slot(templates.zero_shot, "headline", headline);
}

FewShotExample exemplar_from_item(const NewsItem& item) {
  FewShotExample exemplar;
  exemplar.headline = item.headline;
  exemplar.frame = item.frame;
  exemplar.lines.reserve(item.annotations.size());
  for (const auto& annotation : item.annotations) {
    exemplar.lines.push_back({annotation.explanation, annotation.emotion});
  }
  return exemplar;
}

std::vector<FewShotExample> sample_few_shot_frame_aware(
    std::span<const NewsItem> train_items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FewShotExample> exemplars;
  exemplars.reserve(kNumFrames);
  for (Frame frame : all_frames()) {
    std::vector<const NewsItem*> candidates;
    for (const auto& item : train_items) {
      if (item.frame == frame) candidates.push_back(&item);
    }
    if (candidates.empty()) {
      throw DataError("train set has no item with frame '" +
                      std::string(to_string(frame)) + "'");
    }
    const auto pick = bounded_rand(rng, candidates.size());
    exemplars.push_back(exemplar_from_item(*candidates[pick]));
  }
  return exemplars;
}

std::vector<FewShotExample> sample_few_shot_random(
    std::span<const NewsItem> train_items, size_t k, std::uint64_t seed) {
  if (k > train_items.size()) {
    throw std::invalid_argument(
        "requested " + std::to_string(k) + " exemplars from " +
        std::to_string(train_items.size()) + " train items");
  }
  std::mt19937_64 rng(seed);
  std::vector<size_t> order(train_items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates: the first k slots are a uniform sample without
  // replacement.
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(
                             bounded_rand(rng, order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<FewShotExample> exemplars;
  exemplars.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    exemplars.push_back(exemplar_from_item(train_items[order[i]]));
  }
  return exemplars;
}

std::string build_few_shot_prompt(const std::string& headline,
                                  std::span<const FewShotExample> exemplars,
                                  const PromptTemplates& templates,
                                  int exemplar_lines) {
  if (exemplars.empty()) {
    throw std::invalid_argument("few-shot prompt needs at least 1 exemplar");
  }
  if (trim(headline).empty()) {
    throw std::invalid_argument("few-shot prompt needs a non-empty headline");
  }
  std::ostringstream blocks;
  for (size_t i = 0; i < exemplars.size(); ++i) {
    if (i > 0) blocks << '\n';
    blocks << "headline " << (i + 1) << ": " << exemplars[i].headline
           << "\n\n";
    size_t limit = exemplars[i].lines.size();
    if (exemplar_lines > 0) {
      limit = std::min(limit, static_cast<size_t>(exemplar_lines));
    }
    for (size_t j = 0; j < limit; ++j) {
      const auto& line = exemplars[i].lines[j];
      blocks << line.explanation << "; " << to_lower(to_string(line.emotion))
             << '\n';
    }
  }
  std::string prompt = replace_slot(templates.few_shot, "shots",
                                    std::to_string(exemplars.size()));
  prompt = replace_slot(std::move(prompt), "examples", blocks.str());
  return replace_slot(std::move(prompt), "headline", headline);
}

ParsedGeneration parse_generation(std::string_view text, int expected_lines) {
  ParsedGeneration parsed;
  parsed.expected = expected_lines;
  int line_no = 0;
  size_t begin = 0;
  while (begin <= text.size()) {
    size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }

    const size_t semi = line.rfind(';');
    if (semi == std::string_view::npos) {
      parsed.rejected.push_back(
          {line_no, std::string(line), "no semicolon separator"});
      if (end == text.size()) break;
      continue;
    }
    const std::string_view explanation = trim(line.substr(0, semi));
    const std::string_view token = line.substr(semi + 1);
    const auto emotion = normalize_emotion_token(token);
    if (!emotion) {
      parsed.rejected.push_back(
          {line_no, std::string(line),
           "unknown emotion token '" + std::string(trim(token)) + "'"});
    } else if (explanation.empty()) {
      parsed.rejected.push_back(
          {line_no, std::string(line), "empty explanation"});
    } else {
      parsed.lines.push_back({std::string(explanation), *emotion});
    }
    if (end == text.size()) break;
  }
  parsed.count_mismatch =
      expected_lines > 0 &&
      parsed.lines.size() != static_cast<size_t>(expected_lines);
  return parsed;
}

std::string render_generation(std::span<const GeneratedLine> lines) {
  std::ostringstream out;
  for (const auto& line : lines) {
    out << line.explanation << "; " << to_lower(to_string(line.emotion))
        << '\n';
  }
  return out.str();
}

std::vector<std::pair<Emotion, Emotion>> parse_baseline1_response(
    std::string_view text, size_t n) {
  if (n < 1) throw std::invalid_argument("baseline1 parse: n must be >= 1");
  std::vector<std::pair<Emotion, Emotion>> tuples;

  auto try_tuple = [&](std::string_view chunk) {
    const size_t comma = chunk.find(',');
    if (comma == std::string_view::npos) return;
    const auto first = normalize_emotion_token(chunk.substr(0, comma));
    const auto second = normalize_emotion_token(chunk.substr(comma + 1));
    if (first && second) tuples.emplace_back(*first, *second);
  };

  if (text.find('(') != std::string_view::npos) {
    size_t pos = 0;
    while (true) {
      const size_t open = text.find('(', pos);
      if (open == std::string_view::npos) break;
      const size_t close = text.find(')', open + 1);
      if (close == std::string_view::npos) break;
      try_tuple(text.substr(open + 1, close - open - 1));
      pos = close + 1;
    }
  } else {
    size_t begin = 0;
    while (begin <= text.size()) {
      size_t end = text.find('\n', begin);
      if (end == std::string_view::npos) end = text.size();
      const std::string line =
          strip_list_markup(text.substr(begin, end - begin));
      if (!line.empty()) try_tuple(line);
      if (end == text.size()) break;
      begin = end + 1;
    }
  }

  if (tuples.size() < n) {
    throw PartialParseError(
        "recovered only " + std::to_string(tuples.size()) + " of " +
            std::to_string(n) + " emotion tuples",
        std::move(tuples));
  }
  tuples.resize(n);
  return tuples;
}

}  // namespace remo
