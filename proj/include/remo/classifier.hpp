// include/remo/classifier.hpp

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

#ifndef REMO_CLASSIFIER_HPP_
#define REMO_CLASSIFIER_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "remo/corpus.hpp"
#include "remo/labels.hpp"
#include "remo/nn/ops.hpp"

namespace remo {

// Normalized scores over the 8 labels plus the derived top-1/top-2 picks.
// top2 is the two highest-scoring labels in descending score order, ties by
// canonical label order.
struct Prediction {
  EmotionDistribution scores;
  Emotion top1 = Emotion::Amusement;
  std::array<Emotion, 2> top2 = {Emotion::Amusement, Emotion::Awe};

  static Prediction from_scores(const std::array<double, kNumEmotions>& raw);
};

struct ClassifierConfig {
  std::uint64_t seed = 1;
  int epochs = 25;
  double lr = 0.25;
  double lr_decay = 0.05;  // lr_e = lr / (1 + lr_decay * epoch)
  int hash_dim = 1 << 15;
  int max_input_tokens = 256;
  bool bigrams = true;
  double val_fraction = 0.1;
};

struct ClassifierManifest {
  int version = 1;
  std::string corpus_hash;
  std::vector<std::string> train_item_ids;
  std::uint64_t seed = 0;
  int epochs = 0;
  int hash_dim = 0;
  int max_input_tokens = 0;
  bool bigrams = true;
  std::vector<double> val_accuracy;  // per epoch; train accuracy if no val
  bool validated_on_heldout = true;
  std::string weights_hash;

  std::string to_json() const;
  static ClassifierManifest from_json(const std::string& text);
};

// Softmax classifier over hashed bag-of-ngrams features. Deterministic for
// a fixed seed and data; thread-safe for concurrent prediction once trained.
class TextClassifier {
 public:
  static TextClassifier train(std::span<const LabeledExample> examples,
                              const ClassifierConfig& config);

  Prediction predict(const std::string& text) const;

  const ClassifierManifest& manifest() const { return manifest_; }
  std::string weights_hash() const;

  void save(const std::string& path) const;
  static TextClassifier load(const std::string& path);

 private:
  TextClassifier() = default;

  std::vector<std::pair<int, double>> featurize(const std::string& text) const;

  nn::Matrix<double> weights_;  // kNumEmotions x hash_dim
  nn::Vector<double> bias_;
  ClassifierConfig config_;
  ClassifierManifest manifest_;
};

}  // namespace remo

#endif  // REMO_CLASSIFIER_HPP_
