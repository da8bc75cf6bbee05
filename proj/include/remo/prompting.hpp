// include/remo/prompting.hpp

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

#ifndef REMO_PROMPTING_HPP_
#define REMO_PROMPTING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "remo/common.hpp"
#include "remo/corpus.hpp"
#include "remo/labels.hpp"

namespace remo {

// One "explanation; emotion" line recovered from generator output.
struct GeneratedLine {
  std::string explanation;
  Emotion emotion = Emotion::Amusement;

  bool operator==(const GeneratedLine&) const = default;
};

// A training-split item rendered as a prompt exemplar.
struct FewShotExample {
  std::string headline;
  std::vector<GeneratedLine> lines;
  Frame frame = Frame::Politics;
};

enum class PromptMode {
  Baseline1,
  ZeroShot,
  FewShotRandom,
  FewShotFrames,
};

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view token);

struct PromptSpec {
  PromptMode mode = PromptMode::ZeroShot;
  int shots = 9;
  std::uint64_t seed = 0;
  // Explanation lines rendered per exemplar; 0 keeps all of them.
  int exemplar_lines = 0;
};

// The prompt texts with {{slot}} markers. Shipped as plain-text resource
// files so experiments can pin a template version; the embedded defaults are
// the canonical v1 set.
struct PromptTemplates {
  std::string version = "1";
  std::string baseline1;
  std::string zero_shot;
  std::string few_shot;

  static const PromptTemplates& defaults();
  static PromptTemplates load(const std::string& dir);
  void save(const std::string& dir) const;
  std::string hash() const;
};

std::string build_baseline1_prompt(
    std::span<const std::string> headlines,
    const PromptTemplates& templates = PromptTemplates::defaults());

std::string build_zero_shot_prompt(
    const std::string& headline,
    const PromptTemplates& templates = PromptTemplates::defaults());

// One exemplar per frame category, deterministic per seed. Throws DataError
// naming the first frame with no training item.
std::vector<FewShotExample> sample_few_shot_frame_aware(
    std::span<const NewsItem> train_items, std::uint64_t seed);

// k distinct exemplars, uniform without replacement, deterministic per seed.
std::vector<FewShotExample> sample_few_shot_random(
    std::span<const NewsItem> train_items, size_t k, std::uint64_t seed);

std::string build_few_shot_prompt(
    const std::string& headline, std::span<const FewShotExample> exemplars,
    const PromptTemplates& templates = PromptTemplates::defaults(),
    int exemplar_lines = 0);

struct RejectedLine {
  int line_no = 0;  // 1-based within the response text
  std::string text;
  std::string reason;
};

struct ParsedGeneration {
  std::vector<GeneratedLine> lines;
  std::vector<RejectedLine> rejected;
  int expected = 0;
  bool count_mismatch = false;

  // Parse failure := nothing recoverable.
  bool ok() const { return !lines.empty(); }
};

// Splits the response into lines and each line at its LAST semicolon; the
// trailing token is the emotion (case-insensitive). Bad lines are rejected
// with a reason instead of failing the whole parse.
ParsedGeneration parse_generation(std::string_view text, int expected_lines);

// Canonical rendering of generated lines: "explanation; emotion\n" with the
// lowercase label. parse_generation() inverts it.
std::string render_generation(std::span<const GeneratedLine> lines);

// Thrown when fewer than the requested tuples could be recovered; carries
// the recovered prefix.
class PartialParseError : public DataError {
 public:
  PartialParseError(const std::string& what,
                    std::vector<std::pair<Emotion, Emotion>> recovered)
      : DataError(what), recovered_(std::move(recovered)) {}
  const std::vector<std::pair<Emotion, Emotion>>& recovered() const {
    return recovered_;
  }

 private:
  std::vector<std::pair<Emotion, Emotion>> recovered_;
};

// Recovers n ordered (top1, top2) tuples from a Baseline-1 style response.
// Tolerates list markup; tuples with labels outside the closed set are
// dropped. Throws PartialParseError when fewer than n tuples survive.
std::vector<std::pair<Emotion, Emotion>> parse_baseline1_response(
    std::string_view text, size_t n);

// Builds a FewShotExample straight from a training item.
FewShotExample exemplar_from_item(const NewsItem& item);

}  // namespace remo

#endif  // REMO_PROMPTING_HPP_
