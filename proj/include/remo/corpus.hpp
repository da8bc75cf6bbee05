// include/remo/corpus.hpp

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

#ifndef REMO_CORPUS_HPP_
#define REMO_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "remo/labels.hpp"

namespace remo {

// One crowd worker's reaction to one headline.
struct AnnotationRecord {
  Emotion emotion = Emotion::Amusement;
  int intensity = 1;  // 1..5, ingested and preserved but unused downstream
  std::string explanation;
  std::string annotator_id;
};

// A headline with its frame and annotations. Canonical data carries exactly
// 10 annotations; synthetic corpora may carry fewer behind the non-canonical
// ingest flag.
struct NewsItem {
  std::string item_id;
  std::string headline;
  Frame frame = Frame::Politics;
  std::vector<AnnotationRecord> annotations;
  std::string modality = "T";
};

// Probability per emotion label; entries are non-negative and sum to 1
// within 1e-9 (enforced at construction).
class EmotionDistribution {
 public:
  EmotionDistribution();  // uniform
  explicit EmotionDistribution(const std::array<double, kNumEmotions>& probs);
  static EmotionDistribution from_counts(
      const std::array<double, kNumEmotions>& counts);

  double operator[](Emotion emotion) const {
    return probs_[static_cast<size_t>(emotion)];
  }
  const std::array<double, kNumEmotions>& probs() const { return probs_; }

 private:
  std::array<double, kNumEmotions> probs_;
};

// (text, label) training pair; the unit of the EE and CEE corpora.
struct LabeledExample {
  std::string text;
  Emotion label = Emotion::Amusement;
  std::string source_item_id;
};

struct CorpusSplit {
  std::vector<NewsItem> train;
  std::vector<NewsItem> validation;
  std::vector<NewsItem> test;
  std::uint64_t seed = 0;
};

struct IngestOptions {
  // Canonical data must carry exactly 10 annotations per item; synthetic
  // corpora may relax that down to `min_annotations`.
  bool canonical = true;
  int min_annotations = 1;
};

struct IngestIssue {
  int line = 0;  // 1-based input line; 0 for item-level issues
  std::string field;
  std::string message;
};

struct IngestResult {
  std::vector<NewsItem> items;
  std::vector<IngestIssue> errors;
  std::vector<std::string> warnings;
  size_t annotation_count = 0;

  bool ok() const { return errors.empty(); }
};

// Reads line-delimited JSON annotation records and groups them by item_id
// (first-seen order; annotations keep file order). All malformed records are
// collected with their line numbers rather than aborting at the first one.
IngestResult ingest_annotations(std::istream& source,
                                const IngestOptions& options = {});
IngestResult ingest_annotations_file(const std::string& path,
                                     const IngestOptions& options = {});
// Throws DataError listing every issue (line-numbered) unless result.ok().
std::vector<NewsItem> ingest_annotations_or_throw(
    std::istream& source, const IngestOptions& options = {});

// Canonical serialization: one record per annotation, fixed key order.
// Ingesting canonical output and re-serializing is byte-identical.
std::string serialize_annotations(std::span<const NewsItem> items);

EmotionDistribution emotion_distribution(const NewsItem& item);

// Argmax with ties broken by canonical label order.
Emotion derive_dominant(const EmotionDistribution& dist);
Emotion dominant_emotion(const NewsItem& item);

// Count of the most frequent emotion among the item's annotations.
int dominant_count(const NewsItem& item);

// Clear-agreement (CR) filter: keeps items whose dominant-emotion count is
// at least `threshold` (1..10).
std::vector<NewsItem> filter_clear_agreement(std::span<const NewsItem> items,
                                             int threshold);

// Joins explanations in stored order: each is trimmed, given terminal
// punctuation if missing, and the pieces are separated by a single space.
// With max_tokens > 0, whole explanations are dropped from the end until the
// token budget holds (the first explanation is always kept).
std::string join_explanations(std::span<const std::string> explanations,
                              size_t max_tokens = 0);
inline constexpr std::string_view kExplanationSeparator = " ";

// One example per item: all explanations joined, labeled with the dominant
// emotion. Input is expected to be the CR subset.
std::vector<LabeledExample> build_cee(std::span<const NewsItem> items);

// One example per annotation, labeled with that annotation's own emotion.
std::vector<LabeledExample> build_ee(std::span<const NewsItem> items);

// Deterministic 0.5/0.25/0.25 split by news item. Stratified by dominant
// label when every present class has at least 8 items, plain shuffling
// otherwise. Sizes are rounded to nearest and sum to the input size.
CorpusSplit split_corpus(std::span<const NewsItem> items, std::uint64_t seed);

// Fraction of items whose second most frequent emotion has count >= 2.
double second_dominant_fraction(std::span<const NewsItem> items);

// Frequency of the most common dominant label in the split's test set.
double majority_baseline(const CorpusSplit& split);

// Versioned key-value manifest written next to each built corpus.
struct CorpusManifest {
  int version = 1;
  size_t item_count = 0;
  size_t annotation_count = 0;
  int cr_threshold = 0;  // 0 when no CR filter was applied
  std::string separator = std::string(kExplanationSeparator);
  std::uint64_t split_seed = 0;
  std::string source_hash;

  std::string to_json() const;
  static CorpusManifest from_json(const std::string& text);
};

// Order-sensitive content hash over (text, label, source_item_id) triples.
std::string corpus_hash(std::span<const LabeledExample> examples);
// Order-sensitive hash over item ids; used to pin evaluation sets.
std::string item_set_hash(std::span<const NewsItem> items);

}  // namespace remo

#endif  // REMO_CORPUS_HPP_
