// include/remo/pipelines.hpp

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

#ifndef REMO_PIPELINES_HPP_
#define REMO_PIPELINES_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remo/classifier.hpp"
#include "remo/corpus.hpp"
#include "remo/generation.hpp"
#include "remo/prompting.hpp"
#include "remo/seq2seq.hpp"

namespace remo {

enum class PipelineName {
  Headline,   // classify the headline text directly
  Cee,        // classify human concatenated explanations (upper bound)
  CeeT,       // local seq2seq generates explanations, then classify
  CeeChat,    // LLM generates explanations, concatenate, classify
  EeChat,     // LLM generates explanations, classify each, majority vote
  T5Transfer, // two-stage generation-then-label fine-tune
  T5Plain,    // label fine-tune only
};

std::string_view to_string(PipelineName name);
PipelineName parse_pipeline_name(std::string_view token);

enum class Aggregation { None, MajorityVote };

struct PipelineSpec {
  PipelineName name = PipelineName::Headline;
  PromptSpec prompt;  // chat pipelines only
  Aggregation aggregation = Aggregation::None;
};

// Most frequent label; ties broken by canonical label order.
Emotion majority_vote(std::span<const Emotion> labels);

// Two-stage fine-tuning data: stage 1 maps headlines to explanation text,
// stage 2 maps headlines to the (lowercase) label word. Stage 2 always
// starts from stage 1's final weights when stage 1 pairs are present.
struct TransferSchedule {
  std::vector<TextPair> stage1_pairs;
  std::vector<TextPair> stage2_pairs;
  std::vector<std::string> train_item_ids;
};

struct TransferConfig {
  Seq2SeqConfig stage1;
  Seq2SeqConfig stage2;
};

struct TransferOutcome {
  std::string decoded;
  std::optional<Emotion> label;          // exact-match mapping of `decoded`
  std::optional<Prediction> prediction;  // present iff label mapped
};

// Emotion classifier backed by a seq2seq model that decodes the label word.
// A decode that maps to no label is reported as such and scored incorrect
// by the evaluation layer, never fuzzily matched.
class TransferClassifier {
 public:
  static TransferClassifier train(const TransferSchedule& schedule,
                                  const TransferConfig& config);

  TransferOutcome classify(const std::string& headline) const;

  const Seq2SeqModel& model() const { return model_; }
  const std::optional<Seq2SeqManifest>& stage1_manifest() const {
    return stage1_manifest_;
  }
  const std::vector<std::string>& train_item_ids() const {
    return train_item_ids_;
  }

 private:
  Seq2SeqModel model_;
  std::optional<Seq2SeqManifest> stage1_manifest_;
  std::vector<std::string> train_item_ids_;
};

// Spec-facing alias for the two-stage trainer.
TransferClassifier train_with_intermediate_task(
    const TransferSchedule& schedule, const TransferConfig& config);

struct PipelineOutcome {
  enum class Status { Ok, Excluded, InvalidLabel };

  std::string item_id;
  Status status = Status::Ok;
  std::optional<Prediction> prediction;  // present iff status == Ok
  std::string detail;  // exclusion reason / unmapped decode text
};

struct PipelineRun {
  std::string pipeline;
  std::vector<PipelineOutcome> outcomes;  // aligned with the test items
  size_t n_ok = 0;
  size_t n_excluded = 0;
  size_t n_invalid_label = 0;
};

// Trained artifacts and services a pipeline draws on. Only the members the
// chosen pipeline needs must be set.
struct PipelineContext {
  const TextClassifier* headline_classifier = nullptr;
  const TextClassifier* cee_classifier = nullptr;
  const TextClassifier* ee_classifier = nullptr;
  const Seq2SeqModel* explanation_generator = nullptr;  // cee_t
  const TransferClassifier* transfer = nullptr;         // t5_* pipelines
  Generator* generator = nullptr;                       // chat pipelines
  PromptTemplates templates = PromptTemplates::defaults();
  std::vector<FewShotExample> exemplars;  // few-shot prompt modes
};

// Inference only; verifies via the training manifests that no test item was
// part of the classifier's training corpus.
PipelineRun run_pipeline(const PipelineSpec& spec,
                         std::span<const NewsItem> test_items,
                         PipelineContext& context);

// The LLM directly predicts (top1, top2) per headline from one prompt.
PipelineRun baseline1_run(Generator& generator,
                          std::span<const NewsItem> test_items,
                          const PromptTemplates& templates);

// Labels the LLM attached to its own generated explanation lines, voted per
// item. `labels_per_item` feeds the average-KL alignment metric.
struct Baseline2Result {
  PipelineRun run;
  std::vector<std::vector<Emotion>> labels_per_item;
};
Baseline2Result baseline2_run(const PipelineSpec& spec,
                              std::span<const NewsItem> test_items,
                              PipelineContext& context);

// Prompt text for one item under the spec's prompt mode.
std::string pipeline_prompt(const PipelineSpec& spec, const NewsItem& item,
                            const PipelineContext& context);

}  // namespace remo

#endif  // REMO_PIPELINES_HPP_
