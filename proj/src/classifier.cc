// src/classifier.cc

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

#include "remo/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "remo/common.hpp"

namespace remo {

namespace {

using nlohmann::ordered_json;

constexpr char kModelMagic[9] = "REMOCLS1";

std::vector<size_t> shuffled_indices(size_t n, std::mt19937_64& rng) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(bounded_rand(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::string hash_weight_bytes(const nn::Matrix<double>& weights,
                              const nn::Vector<double>& bias) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a64(std::string_view(
                  reinterpret_cast<const char*>(weights.data()),
                  static_cast<size_t>(weights.size()) * sizeof(double)),
              h);
  h = fnv1a64(std::string_view(
                  reinterpret_cast<const char*>(bias.data()),
                  static_cast<size_t>(bias.size()) * sizeof(double)),
              h);
  return hex64(h);
}

}  // namespace

Prediction Prediction::from_scores(
    const std::array<double, kNumEmotions>& raw) {
  Prediction prediction;
  prediction.scores = EmotionDistribution(raw);
  std::array<int, kNumEmotions> order{};
  for (int i = 0; i < kNumEmotions; ++i) order[i] = i;
  // Descending score; canonical label order on ties.
  std::stable_sort(order.begin(), order.end(),
                   [&raw](int a, int b) { return raw[a] > raw[b]; });
  prediction.top1 = static_cast<Emotion>(order[0]);
  prediction.top2 = {static_cast<Emotion>(order[0]),
                     static_cast<Emotion>(order[1])};
  return prediction;
}

std::string ClassifierManifest::to_json() const {
  ordered_json doc;
  doc["version"] = version;
  doc["corpus_hash"] = corpus_hash;
  doc["train_item_ids"] = train_item_ids;
  doc["seed"] = seed;
  doc["epochs"] = epochs;
  doc["hash_dim"] = hash_dim;
  doc["max_input_tokens"] = max_input_tokens;
  doc["bigrams"] = bigrams;
  doc["val_accuracy"] = val_accuracy;
  doc["validated_on_heldout"] = validated_on_heldout;
  doc["weights_hash"] = weights_hash;
  return doc.dump();
}

ClassifierManifest ClassifierManifest::from_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  ClassifierManifest manifest;
  manifest.version = doc.at("version").get<int>();
  manifest.corpus_hash = doc.at("corpus_hash").get<std::string>();
  manifest.train_item_ids =
      doc.at("train_item_ids").get<std::vector<std::string>>();
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  manifest.epochs = doc.at("epochs").get<int>();
  manifest.hash_dim = doc.at("hash_dim").get<int>();
  manifest.max_input_tokens = doc.at("max_input_tokens").get<int>();
  manifest.bigrams = doc.at("bigrams").get<bool>();
  manifest.val_accuracy = doc.at("val_accuracy").get<std::vector<double>>();
  manifest.validated_on_heldout = doc.at("validated_on_heldout").get<bool>();
  manifest.weights_hash = doc.at("weights_hash").get<std::string>();
  return manifest;
}

std::vector<std::pair<int, double>> TextClassifier::featurize(
    const std::string& text) const {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.size() > static_cast<size_t>(config_.max_input_tokens)) {
    tokens.resize(static_cast<size_t>(config_.max_input_tokens));
  }
  std::unordered_map<int, double> counts;
  const auto dim = static_cast<std::uint64_t>(config_.hash_dim);
  for (const auto& token : tokens) {
    counts[static_cast<int>(fnv1a64(token) % dim)] += 1.0;
  }
  if (config_.bigrams) {
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
      const std::string bigram = tokens[i] + '\x1f' + tokens[i + 1];
      counts[static_cast<int>(fnv1a64(bigram) % dim)] += 1.0;
    }
  }
  std::vector<std::pair<int, double>> features(counts.begin(), counts.end());
  std::sort(features.begin(), features.end());
  double norm = 0.0;
  for (const auto& [idx, value] : features) norm += value * value;
  if (norm > 0.0) {
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& [idx, value] : features) value *= scale;
  }
  return features;
}

TextClassifier TextClassifier::train(std::span<const LabeledExample> examples,
                                     const ClassifierConfig& config) {
  if (examples.empty()) throw DataError("classifier: no training examples");
  std::set<Emotion> distinct;
  for (const auto& example : examples) distinct.insert(example.label);
  if (distinct.size() < 2) {
    throw DataError(
        "degenerate corpus: classifier needs at least 2 distinct labels, "
        "got " +
        std::to_string(distinct.size()));
  }

  TextClassifier model;
  model.config_ = config;
  model.weights_ = nn::Matrix<double>::Zero(kNumEmotions, config.hash_dim);
  model.bias_ = nn::Vector<double>::Zero(kNumEmotions);

  std::mt19937_64 rng(config.seed);

  std::vector<std::vector<std::pair<int, double>>> features;
  features.reserve(examples.size());
  for (const auto& example : examples) {
    features.push_back(model.featurize(example.text));
  }

  // Deterministic held-out slice for the per-epoch accuracy trace.
  auto order = shuffled_indices(examples.size(), rng);
  size_t n_val = static_cast<size_t>(
      std::floor(config.val_fraction * static_cast<double>(examples.size())));
  if (examples.size() < 5) n_val = 0;
  std::vector<size_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<size_t> train_idx(order.begin() + n_val, order.end());

  auto logits_of = [&](size_t i) {
    nn::Vector<double> logits = model.bias_;
    for (const auto& [idx, value] : features[i]) {
      logits += value * model.weights_.col(idx);
    }
    return logits;
  };

  auto accuracy_over = [&](const std::vector<size_t>& idx) {
    if (idx.empty()) return 0.0;
    size_t correct = 0;
    for (size_t i : idx) {
      Eigen::Index arg = 0;
      logits_of(i).maxCoeff(&arg);
      if (static_cast<Emotion>(arg) == examples[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(idx.size());
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.lr / (1.0 + config.lr_decay * epoch);
    auto epoch_order = train_idx;
    for (size_t i = epoch_order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(bounded_rand(rng, i));
      std::swap(epoch_order[i - 1], epoch_order[j]);
    }
    for (size_t i : epoch_order) {
      const nn::Vector<double> grad = nn::cross_entropy_grad(
          nn::Vector<double>(logits_of(i)),
          static_cast<Eigen::Index>(examples[i].label));
      for (const auto& [idx, value] : features[i]) {
        model.weights_.col(idx) -= (lr * value) * grad;
      }
      model.bias_ -= lr * grad;
    }
    model.manifest_.val_accuracy.push_back(
        n_val > 0 ? accuracy_over(val_idx) : accuracy_over(train_idx));
  }

  model.manifest_.corpus_hash = corpus_hash(examples);
  std::set<std::string> ids;
  for (const auto& example : examples) ids.insert(example.source_item_id);
  model.manifest_.train_item_ids.assign(ids.begin(), ids.end());
  model.manifest_.seed = config.seed;
  model.manifest_.epochs = config.epochs;
  model.manifest_.hash_dim = config.hash_dim;
  model.manifest_.max_input_tokens = config.max_input_tokens;
  model.manifest_.bigrams = config.bigrams;
  model.manifest_.validated_on_heldout = n_val > 0;
  model.manifest_.weights_hash =
      hash_weight_bytes(model.weights_, model.bias_);
  return model;
}

Prediction TextClassifier::predict(const std::string& text) const {
  if (trim(text).empty()) {
    throw DataError("classifier: cannot predict on empty text");
  }
  nn::Vector<double> logits = bias_;
  for (const auto& [idx, value] : featurize(text)) {
    logits += value * weights_.col(idx);
  }
  const nn::Vector<double> probs = nn::softmax(logits);
  std::array<double, kNumEmotions> scores{};
  for (int i = 0; i < kNumEmotions; ++i) scores[i] = probs(i);
  // Guard against accumulated rounding drifting past the invariant.
  double total = 0.0;
  for (double s : scores) total += s;
  for (double& s : scores) s /= total;
  return Prediction::from_scores(scores);
}

std::string TextClassifier::weights_hash() const {
  return hash_weight_bytes(weights_, bias_);
}

void TextClassifier::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file: " + path);
  out.write(kModelMagic, 8);
  ordered_json header;
  header["manifest"] = ordered_json::parse(manifest_.to_json());
  header["config"] = {
      {"seed", config_.seed},
      {"epochs", config_.epochs},
      {"lr", config_.lr},
      {"lr_decay", config_.lr_decay},
      {"hash_dim", config_.hash_dim},
      {"max_input_tokens", config_.max_input_tokens},
      {"bigrams", config_.bigrams},
      {"val_fraction", config_.val_fraction},
  };
  const std::string header_text = header.dump();
  const std::uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(),
            static_cast<std::streamsize>(header_text.size()));
  const std::uint64_t rows = weights_.rows();
  const std::uint64_t cols = weights_.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(weights_.data()),
            static_cast<std::streamsize>(weights_.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(bias_.data()),
            static_cast<std::streamsize>(bias_.size() * sizeof(double)));
  if (!out) throw DataError("short write: " + path);
}

TextClassifier TextClassifier::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string_view(magic, 8) != std::string_view(kModelMagic, 8)) {
    throw DataError("not a classifier model file: " + path);
  }
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  const auto header = ordered_json::parse(header_text);

  TextClassifier model;
  model.manifest_ =
      ClassifierManifest::from_json(header.at("manifest").dump());
  const auto& cfg = header.at("config");
  model.config_.seed = cfg.at("seed").get<std::uint64_t>();
  model.config_.epochs = cfg.at("epochs").get<int>();
  model.config_.lr = cfg.at("lr").get<double>();
  model.config_.lr_decay = cfg.at("lr_decay").get<double>();
  model.config_.hash_dim = cfg.at("hash_dim").get<int>();
  model.config_.max_input_tokens = cfg.at("max_input_tokens").get<int>();
  model.config_.bigrams = cfg.at("bigrams").get<bool>();
  model.config_.val_fraction = cfg.at("val_fraction").get<double>();

  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  model.weights_.resize(static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
  model.bias_.resize(kNumEmotions);
  in.read(reinterpret_cast<char*>(model.weights_.data()),
          static_cast<std::streamsize>(rows * cols * sizeof(double)));
  in.read(reinterpret_cast<char*>(model.bias_.data()),
          static_cast<std::streamsize>(kNumEmotions * sizeof(double)));
  if (!in) throw DataError("truncated model file: " + path);
  return model;
}

}  // namespace remo
