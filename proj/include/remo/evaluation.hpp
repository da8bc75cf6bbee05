// include/remo/evaluation.hpp

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

#ifndef REMO_EVALUATION_HPP_
#define REMO_EVALUATION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remo/corpus.hpp"
#include "remo/labels.hpp"

namespace remo {

double exact_match_accuracy(std::span<const Emotion> truths,
                            std::span<const Emotion> top1s);

double top2_accuracy(std::span<const Emotion> truths,
                     std::span<const std::array<Emotion, 2>> top2s);

enum class KlDirection {
  HumanFirst,      // D(human || generated), the default
  GeneratedFirst,  // D(generated || human)
};

// D(p~ || q~) with additive-epsilon smoothing then renormalization applied
// to BOTH arguments, natural log.
double kl_divergence(const EmotionDistribution& p,
                     const EmotionDistribution& q, double epsilon);

struct AverageKl {
  double value = 0.0;
  size_t n_used = 0;
  size_t n_excluded = 0;  // items whose generated label list was empty
};

// Mean per-item KL between each item's human distribution and the
// distribution of generated labels for that item.
AverageKl average_kl(std::span<const NewsItem> items,
                     std::span<const std::vector<Emotion>> generated_labels,
                     double epsilon,
                     KlDirection direction = KlDirection::HumanFirst);

// Per-item correctness of two models on the identical test set.
struct PairedOutcomes {
  std::vector<std::pair<bool, bool>> pairs;  // (A correct, B correct)

  static PairedOutcomes from_predictions(std::span<const Emotion> truths,
                                         std::span<const Emotion> model_a,
                                         std::span<const Emotion> model_b);
};

struct McNemarResult {
  double p_value = 1.0;
  long b = 0;  // A-only-correct count
  long c = 0;  // B-only-correct count
  bool exact = true;       // exact binomial branch (b + c < 25)
  bool degenerate = false; // b + c == 0
};

McNemarResult mcnemar_test(const PairedOutcomes& outcomes);
McNemarResult mcnemar_from_counts(long b, long c);

// Rows = truth, columns = prediction.
using ConfusionMatrix =
    std::array<std::array<long, kNumEmotions>, kNumEmotions>;

ConfusionMatrix confusion_matrix(std::span<const Emotion> truths,
                                 std::span<const Emotion> top1s);

std::string confusion_to_csv(const ConfusionMatrix& matrix);

// Per-pipeline metrics plus multi-run aggregates. `n_items` counts items
// with a valid predicted label (the confusion matrix total); items whose
// generation could not be parsed are `n_excluded`; decoded predictions that
// map to no label are `n_invalid_label` (scored incorrect, outside the 8x8
// grid). Accuracy denominators cover n_items + n_invalid_label.
struct EvalReport {
  int version = 1;
  std::string pipeline;
  std::string config_hash;
  std::string test_set_hash;
  size_t n_items = 0;
  size_t n_excluded = 0;
  size_t n_invalid_label = 0;
  double exact_match = 0.0;
  double top2 = 0.0;
  std::optional<double> avg_kl;
  ConfusionMatrix confusion{};
  std::vector<std::uint64_t> seeds;
  int runs = 1;
  double exact_match_mean = 0.0;
  double exact_match_std = 0.0;
  double top2_mean = 0.0;
  double top2_std = 0.0;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
  // Human-readable one-report table.
  std::string to_table() const;
};

// Builds a single-run report from aligned truth/prediction rows.
EvalReport make_report(const std::string& pipeline,
                       std::span<const Emotion> truths,
                       std::span<const Emotion> top1s,
                       std::span<const std::array<Emotion, 2>> top2s,
                       size_t n_excluded, size_t n_invalid_label,
                       std::uint64_t seed);

// Mean / sample standard deviation across runs of the same pipeline over the
// same test set; confusion counts are summed.
EvalReport aggregate_runs(std::span<const EvalReport> reports);

}  // namespace remo

#endif  // REMO_EVALUATION_HPP_
