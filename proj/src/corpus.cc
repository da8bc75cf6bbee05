// src/corpus.cc

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

#include "remo/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "remo/common.hpp"

namespace remo {

namespace {

using nlohmann::ordered_json;

constexpr double kDistributionTolerance = 1e-9;

const std::set<std::string>& known_record_fields() {
  static const std::set<std::string> fields = {
      "item_id",  "headline",  "frame",       "annotator_id",
      "emotion",  "intensity", "explanation", "modality"};
  return fields;
}

std::array<int, kNumEmotions> emotion_counts(const NewsItem& item) {
  std::array<int, kNumEmotions> counts{};
  for (const auto& annotation : item.annotations) {
    ++counts[static_cast<size_t>(annotation.emotion)];
  }
  return counts;
}

}  // namespace

EmotionDistribution::EmotionDistribution() {
  probs_.fill(1.0 / kNumEmotions);
}

EmotionDistribution::EmotionDistribution(
    const std::array<double, kNumEmotions>& probs)
    : probs_(probs) {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) {
      throw DataError("emotion distribution has a negative entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw DataError("emotion distribution does not sum to 1 (got " +
                    std::to_string(total) + ")");
  }
}

EmotionDistribution EmotionDistribution::from_counts(
    const std::array<double, kNumEmotions>& counts) {
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw DataError("negative count in distribution");
    total += c;
  }
  if (total <= 0.0) throw DataError("cannot normalize all-zero counts");
  std::array<double, kNumEmotions> probs{};
  for (size_t i = 0; i < counts.size(); ++i) probs[i] = counts[i] / total;
  // Re-spread rounding slack onto the largest entry so the invariant holds
  // exactly even for awkward totals.
  double sum = 0.0;
  for (double p : probs) sum += p;
  size_t arg = 0;
  for (size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[arg]) arg = i;
  }
  probs[arg] += 1.0 - sum;
  return EmotionDistribution(probs);
}

IngestResult ingest_annotations(std::istream& source,
                                const IngestOptions& options) {
  IngestResult result;
  std::unordered_map<std::string, size_t> item_index;
  std::unordered_set<std::string> seen_annotator;  // "item_id\x1fannotator"
  std::unordered_map<std::string, int> first_line_of_item;
  std::set<std::string> warned_fields;

  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;

    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& err) {
      result.errors.push_back(
          {line_no, "", std::string("invalid JSON: ") + err.what()});
      continue;
    }
    if (!record.is_object()) {
      result.errors.push_back({line_no, "", "record is not a JSON object"});
      continue;
    }

    for (const auto& [key, value] : record.items()) {
      (void)value;
      if (!known_record_fields().count(key) && !warned_fields.count(key)) {
        warned_fields.insert(key);
        result.warnings.push_back("ignoring unknown field '" + key +
                                  "' (first seen on line " +
                                  std::to_string(line_no) + ")");
      }
    }

    bool record_ok = true;
    auto require_string = [&](const char* field) -> std::string {
      if (!record.contains(field) || !record[field].is_string() ||
          record[field].get<std::string>().empty()) {
        result.errors.push_back(
            {line_no, field, std::string("missing or empty field '") + field +
                                 "'"});
        record_ok = false;
        return {};
      }
      return record[field].get<std::string>();
    };

    const std::string item_id = require_string("item_id");
    const std::string headline = require_string("headline");
    const std::string frame_token = require_string("frame");
    const std::string annotator_id = require_string("annotator_id");
    const std::string emotion_token = require_string("emotion");
    const std::string explanation_raw =
        record.contains("explanation") && record["explanation"].is_string()
            ? record["explanation"].get<std::string>()
            : std::string();

    std::string modality = "T";
    if (record.contains("modality")) {
      if (!record["modality"].is_string()) {
        result.errors.push_back({line_no, "modality", "modality must be a string"});
        record_ok = false;
      } else {
        modality = record["modality"].get<std::string>();
      }
    }

    std::optional<Emotion> emotion;
    if (!emotion_token.empty()) {
      emotion = parse_emotion(emotion_token);
      if (!emotion) {
        result.errors.push_back({line_no, "emotion",
                                 "unknown emotion token '" + emotion_token +
                                     "'"});
        record_ok = false;
      }
    }
    std::optional<Frame> frame;
    if (!frame_token.empty()) {
      frame = parse_frame(frame_token);
      if (!frame) {
        result.errors.push_back(
            {line_no, "frame", "unknown frame token '" + frame_token + "'"});
        record_ok = false;
      }
    }

    int intensity = 0;
    if (!record.contains("intensity") ||
        !record["intensity"].is_number_integer()) {
      result.errors.push_back(
          {line_no, "intensity", "missing or non-integer field 'intensity'"});
      record_ok = false;
    } else {
      intensity = record["intensity"].get<int>();
      if (intensity < 1 || intensity > 5) {
        result.errors.push_back({line_no, "intensity",
                                 "intensity " + std::to_string(intensity) +
                                     " outside [1,5]"});
        record_ok = false;
      }
    }

    if (trim(explanation_raw).empty()) {
      result.errors.push_back(
          {line_no, "explanation", "explanation has no non-whitespace text"});
      record_ok = false;
    }

    if (!record_ok) continue;

    const std::string annotator_key = item_id + '\x1f' + annotator_id;
    if (!seen_annotator.insert(annotator_key).second) {
      result.errors.push_back({line_no, "annotator_id",
                               "duplicate annotation by '" + annotator_id +
                                   "' for item '" + item_id + "'"});
      continue;
    }

    auto found = item_index.find(item_id);
    if (found == item_index.end()) {
      NewsItem item;
      item.item_id = item_id;
      item.headline = headline;
      item.frame = *frame;
      item.modality = modality;
      item_index.emplace(item_id, result.items.size());
      first_line_of_item.emplace(item_id, line_no);
      result.items.push_back(std::move(item));
      found = item_index.find(item_id);
    } else {
      NewsItem& item = result.items[found->second];
      if (item.headline != headline) {
        result.errors.push_back({line_no, "headline",
                                 "item '" + item_id +
                                     "' has conflicting headlines"});
        continue;
      }
      if (item.frame != *frame) {
        result.errors.push_back(
            {line_no, "frame",
             "item '" + item_id + "' has conflicting frame labels"});
        continue;
      }
      if (item.modality != modality) {
        result.errors.push_back(
            {line_no, "modality",
             "item '" + item_id + "' has conflicting modality tags"});
        continue;
      }
    }

    AnnotationRecord annotation;
    annotation.emotion = *emotion;
    annotation.intensity = intensity;
    annotation.explanation = explanation_raw;
    annotation.annotator_id = annotator_id;
    result.items[found->second].annotations.push_back(std::move(annotation));
    ++result.annotation_count;
  }

  for (const auto& item : result.items) {
    const int line = first_line_of_item[item.item_id];
    const size_t n = item.annotations.size();
    if (options.canonical && n != 10) {
      result.errors.push_back(
          {line, "annotations",
           "item '" + item.item_id + "' has " + std::to_string(n) +
               " annotations (canonical data requires 10; pass the "
               "non-canonical option for synthetic corpora)"});
    } else if (!options.canonical &&
               n < static_cast<size_t>(options.min_annotations)) {
      result.errors.push_back(
          {line, "annotations",
           "item '" + item.item_id + "' has " + std::to_string(n) +
               " annotations (minimum " +
               std::to_string(options.min_annotations) + ")"});
    }
  }

  return result;
}

IngestResult ingest_annotations_file(const std::string& path,
                                     const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open annotation file: " + path);
  return ingest_annotations(in, options);
}

std::vector<NewsItem> ingest_annotations_or_throw(
    std::istream& source, const IngestOptions& options) {
  IngestResult result = ingest_annotations(source, options);
  if (!result.ok()) {
    std::ostringstream message;
    message << "annotation ingest failed with " << result.errors.size()
            << " error(s):";
    for (const auto& issue : result.errors) {
      message << "\n  line " << issue.line;
      if (!issue.field.empty()) message << " [" << issue.field << "]";
      message << ": " << issue.message;
    }
    throw DataError(message.str());
  }
  return std::move(result.items);
}

std::string serialize_annotations(std::span<const NewsItem> items) {
  std::ostringstream out;
  for (const auto& item : items) {
    for (const auto& annotation : item.annotations) {
      ordered_json record;
      record["item_id"] = item.item_id;
      record["headline"] = item.headline;
      record["frame"] = std::string(to_string(item.frame));
      record["annotator_id"] = annotation.annotator_id;
      record["emotion"] = std::string(to_string(annotation.emotion));
      record["intensity"] = annotation.intensity;
      record["explanation"] = annotation.explanation;
      record["modality"] = item.modality;
      out << record.dump() << '\n';
    }
  }
  return out.str();
}

EmotionDistribution emotion_distribution(const NewsItem& item) {
  if (item.annotations.empty()) {
    throw DataError("item '" + item.item_id + "' has no annotations");
  }
  const auto counts = emotion_counts(item);
  std::array<double, kNumEmotions> as_double{};
  for (size_t i = 0; i < counts.size(); ++i) as_double[i] = counts[i];
  return EmotionDistribution::from_counts(as_double);
}

Emotion derive_dominant(const EmotionDistribution& dist) {
  size_t arg = 0;
  for (size_t i = 1; i < kNumEmotions; ++i) {
    if (dist.probs()[i] > dist.probs()[arg]) arg = i;
  }
  return static_cast<Emotion>(arg);
}

Emotion dominant_emotion(const NewsItem& item) {
  return derive_dominant(emotion_distribution(item));
}

int dominant_count(const NewsItem& item) {
  const auto counts = emotion_counts(item);
  return *std::max_element(counts.begin(), counts.end());
}

std::vector<NewsItem> filter_clear_agreement(std::span<const NewsItem> items,
                                             int threshold) {
  if (threshold < 1 || threshold > 10) {
    throw std::invalid_argument("clear-agreement threshold outside [1,10]");
  }
  std::vector<NewsItem> kept;
  for (const auto& item : items) {
    if (!item.annotations.empty() && dominant_count(item) >= threshold) {
      kept.push_back(item);
    }
  }
  return kept;
}

std::string join_explanations(std::span<const std::string> explanations,
                              size_t max_tokens) {
  std::vector<std::string> pieces;
  pieces.reserve(explanations.size());
  for (const auto& raw : explanations) {
    std::string piece(trim(raw));
    if (piece.empty()) continue;
    const char last = piece.back();
    if (last != '.' && last != '!' && last != '?') piece.push_back('.');
    pieces.push_back(std::move(piece));
  }

  size_t keep = pieces.size();
  if (max_tokens > 0) {
    size_t used = 0;
    keep = 0;
    for (const auto& piece : pieces) {
      const size_t n = token_count(piece);
      if (keep > 0 && used + n > max_tokens) break;
      used += n;
      ++keep;
    }
  }

  std::string joined;
  for (size_t i = 0; i < keep; ++i) {
    if (i > 0) joined += kExplanationSeparator;
    joined += pieces[i];
  }
  return joined;
}

std::vector<LabeledExample> build_cee(std::span<const NewsItem> items) {
  std::vector<LabeledExample> examples;
  examples.reserve(items.size());
  for (const auto& item : items) {
    if (item.annotations.empty()) {
      throw DataError("cannot build concatenated example for item '" +
                      item.item_id + "': no annotations");
    }
    std::vector<std::string> explanations;
    explanations.reserve(item.annotations.size());
    for (const auto& annotation : item.annotations) {
      explanations.push_back(annotation.explanation);
    }
    examples.push_back({join_explanations(explanations),
                        dominant_emotion(item), item.item_id});
  }
  return examples;
}

std::vector<LabeledExample> build_ee(std::span<const NewsItem> items) {
  std::vector<LabeledExample> examples;
  for (const auto& item : items) {
    for (const auto& annotation : item.annotations) {
      examples.push_back(
          {annotation.explanation, annotation.emotion, item.item_id});
    }
  }
  return examples;
}

namespace {

// Largest-remainder apportionment of `want` slots over class sizes, ties by
// class order. Guarantees sum(quota) == want and quota_c <= size_c.
std::vector<size_t> apportion(const std::vector<size_t>& sizes, size_t total,
                              size_t want) {
  std::vector<size_t> quota(sizes.size(), 0);
  std::vector<double> remainder(sizes.size(), 0.0);
  size_t assigned = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const double ideal =
        static_cast<double>(want) * static_cast<double>(sizes[i]) /
        static_cast<double>(total);
    quota[i] = static_cast<size_t>(ideal);
    remainder[i] = ideal - static_cast<double>(quota[i]);
    assigned += quota[i];
  }
  while (assigned < want) {
    size_t best = sizes.size();
    for (size_t i = 0; i < sizes.size(); ++i) {
      if (quota[i] >= sizes[i]) continue;
      if (best == sizes.size() || remainder[i] > remainder[best]) best = i;
    }
    if (best == sizes.size()) break;
    ++quota[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return quota;
}

template <typename T>
void shuffle_in_place(std::vector<T>& values, std::mt19937_64& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(bounded_rand(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace

CorpusSplit split_corpus(std::span<const NewsItem> items, std::uint64_t seed) {
  const size_t n = items.size();
  if (n < 4) {
    throw std::invalid_argument("split_corpus requires at least 4 items");
  }
  const size_t n_test = static_cast<size_t>(std::llround(0.25 * n));
  const size_t n_val = static_cast<size_t>(std::llround(0.25 * n));

  std::mt19937_64 rng(seed);
  CorpusSplit split;
  split.seed = seed;

  // Group indices by dominant label, canonical class order.
  std::array<std::vector<size_t>, kNumEmotions> by_class;
  for (size_t i = 0; i < n; ++i) {
    by_class[static_cast<size_t>(dominant_emotion(items[i]))].push_back(i);
  }
  bool stratify = true;
  for (const auto& group : by_class) {
    if (!group.empty() && group.size() < 8) {
      stratify = false;
      break;
    }
  }

  std::vector<size_t> test_idx, val_idx, train_idx;
  if (stratify) {
    std::vector<std::vector<size_t>> classes;
    std::vector<size_t> sizes;
    for (auto& group : by_class) {
      if (group.empty()) continue;
      shuffle_in_place(group, rng);
      sizes.push_back(group.size());
      classes.push_back(group);
    }
    const auto test_quota = apportion(sizes, n, n_test);
    std::vector<size_t> remaining_sizes(sizes);
    for (size_t c = 0; c < classes.size(); ++c) {
      remaining_sizes[c] -= test_quota[c];
    }
    const auto val_quota = apportion(remaining_sizes, n - n_test, n_val);
    for (size_t c = 0; c < classes.size(); ++c) {
      const auto& group = classes[c];
      size_t cursor = 0;
      for (size_t k = 0; k < test_quota[c]; ++k) test_idx.push_back(group[cursor++]);
      for (size_t k = 0; k < val_quota[c]; ++k) val_idx.push_back(group[cursor++]);
      while (cursor < group.size()) train_idx.push_back(group[cursor++]);
    }
    // Keep input order inside each partition so the result does not depend
    // on class iteration order.
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
  } else {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_in_place(order, rng);
    test_idx.assign(order.begin(), order.begin() + n_test);
    val_idx.assign(order.begin() + n_test, order.begin() + n_test + n_val);
    train_idx.assign(order.begin() + n_test + n_val, order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
  }

  for (size_t i : train_idx) split.train.push_back(items[i]);
  for (size_t i : val_idx) split.validation.push_back(items[i]);
  for (size_t i : test_idx) split.test.push_back(items[i]);
  return split;
}

double second_dominant_fraction(std::span<const NewsItem> items) {
  if (items.empty()) throw DataError("second_dominant_fraction: no items");
  size_t hits = 0;
  for (const auto& item : items) {
    if (item.annotations.size() < 2) {
      throw DataError("item '" + item.item_id +
                      "' has fewer than 2 annotations");
    }
    auto counts = emotion_counts(item);
    std::sort(counts.begin(), counts.end(), std::greater<int>());
    if (counts[1] >= 2) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(items.size());
}

double majority_baseline(const CorpusSplit& split) {
  if (split.test.empty()) throw DataError("majority_baseline: empty test set");
  std::array<int, kNumEmotions> counts{};
  for (const auto& item : split.test) {
    ++counts[static_cast<size_t>(dominant_emotion(item))];
  }
  const int top = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(top) / static_cast<double>(split.test.size());
}

std::string CorpusManifest::to_json() const {
  ordered_json doc;
  doc["version"] = version;
  doc["item_count"] = item_count;
  doc["annotation_count"] = annotation_count;
  doc["cr_threshold"] = cr_threshold;
  doc["separator"] = separator;
  doc["split_seed"] = split_seed;
  doc["source_hash"] = source_hash;
  return doc.dump(2) + "\n";
}

CorpusManifest CorpusManifest::from_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  CorpusManifest manifest;
  manifest.version = doc.at("version").get<int>();
  manifest.item_count = doc.at("item_count").get<size_t>();
  manifest.annotation_count = doc.at("annotation_count").get<size_t>();
  manifest.cr_threshold = doc.at("cr_threshold").get<int>();
  manifest.separator = doc.at("separator").get<std::string>();
  manifest.split_seed = doc.at("split_seed").get<std::uint64_t>();
  manifest.source_hash = doc.at("source_hash").get<std::string>();
  return manifest;
}

std::string corpus_hash(std::span<const LabeledExample> examples) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& example : examples) {
    h = fnv1a64(example.text, h);
    h = fnv1a64(to_string(example.label), h);
    h = fnv1a64(example.source_item_id, h);
    h = fnv1a64("\x1e", h);
  }
  return hex64(h);
}

std::string item_set_hash(std::span<const NewsItem> items) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& item : items) {
    h = fnv1a64(item.item_id, h);
    h = fnv1a64("\x1e", h);
  }
  return hex64(h);
}

}  // namespace remo
