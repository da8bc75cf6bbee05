// include/remo/seq2seq.hpp

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

#ifndef REMO_SEQ2SEQ_HPP_
#define REMO_SEQ2SEQ_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "remo/labels.hpp"
#include "remo/nn/gru.hpp"
#include "remo/nn/ops.hpp"

namespace remo {

using TextPair = std::pair<std::string, std::string>;  // (source, target)

struct Seq2SeqConfig {
  std::uint64_t seed = 1;
  int epochs = 80;
  double lr = 0.01;  // Adam
  int embed_dim = 32;
  int hidden_dim = 48;
  int max_source_tokens = 64;
  int max_target_tokens = 512;
  int beam_width = 1;  // 1 = greedy decode
  double val_fraction = 0.1;
  double grad_clip = 5.0;
};

// Word-level vocabulary with <unk>/<bos>/<eos> specials; token ids follow
// first occurrence order so a seed + data fully determine the model.
class Seq2SeqVocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  static Seq2SeqVocab build(std::span<const TextPair> pairs,
                            std::span<const std::string> extra_texts);

  std::vector<int> encode(const std::string& text, size_t max_tokens) const;
  std::string decode(std::span<const int> ids) const;
  std::optional<int> id_of(const std::string& token) const;
  const std::string& token(int id) const { return tokens_[id]; }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  static Seq2SeqVocab from_tokens(std::vector<std::string> tokens);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct Seq2SeqManifest {
  int version = 1;
  std::string data_hash;
  std::uint64_t seed = 0;
  int epochs = 0;
  int embed_dim = 0;
  int hidden_dim = 0;
  int max_source_tokens = 0;
  int max_target_tokens = 0;
  int vocab_size = 0;
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;    // per epoch; empty if no held-out pairs
  std::string init_weights_hash;
  std::string final_weights_hash;
  std::string parent_weights_hash;  // empty for a fresh model

  std::string to_json() const;
  static Seq2SeqManifest from_json(const std::string& text);
};

// GRU encoder-decoder with dot-product attention. Deterministic given seed,
// data and config; greedy decode is byte-stable.
class Seq2SeqModel {
 public:
  static Seq2SeqModel train(std::span<const TextPair> pairs,
                            const Seq2SeqConfig& config,
                            std::span<const std::string> extra_vocab_texts = {});

  // Continues training the same weights on new pairs (fresh optimizer,
  // existing vocabulary). Manifest records the lineage.
  Seq2SeqModel fine_tune(std::span<const TextPair> pairs,
                         const Seq2SeqConfig& config) const;

  std::string generate(const std::string& source) const;

  // Softmax over the first decoded position restricted to the 8 lowercase
  // label tokens (labels missing from the vocabulary score 0).
  std::array<double, kNumEmotions> label_scores(const std::string& source) const;

  const Seq2SeqManifest& manifest() const { return manifest_; }
  const Seq2SeqConfig& config() const { return config_; }
  const Seq2SeqVocab& vocab() const { return vocab_; }
  std::string weights_hash() const;

  void save(const std::string& path) const;
  static Seq2SeqModel load(const std::string& path);

 private:
  Seq2SeqModel() = default;

  struct Workspace;  // per-pair forward caches + gradients

  void init_params(std::mt19937_64& rng);
  void train_epochs(std::span<const TextPair> pairs,
                    const Seq2SeqConfig& config);
  double pair_loss_and_grads(const std::vector<int>& source,
                             const std::vector<int>& target,
                             Workspace* workspace) const;
  // Encoder pass; returns hidden states column per source position.
  nn::Matrix<double> encode(const std::vector<int>& source,
                            std::vector<nn::GruStepCache<double>>* caches) const;
  nn::Vector<double> decode_step(const nn::Matrix<double>& enc_states,
                                 const nn::Vector<double>& state,
                                 int prev_token,
                                 nn::Vector<double>* next_state) const;
  std::vector<int> greedy_decode(const std::vector<int>& source) const;
  std::vector<int> beam_decode(const std::vector<int>& source,
                               int beam_width) const;

  Seq2SeqVocab vocab_;
  Seq2SeqConfig config_;
  Seq2SeqManifest manifest_;

  nn::Matrix<double> embed_src_;  // vocab x embed_dim (rows are tokens)
  nn::Matrix<double> embed_tgt_;
  nn::GruParams<double> encoder_;
  nn::GruParams<double> decoder_;
  nn::Matrix<double> combine_w_;  // hidden x 2*hidden
  nn::Vector<double> combine_b_;
  nn::Matrix<double> out_w_;  // vocab x hidden
  nn::Vector<double> out_b_;
};

// Spec-facing free functions.
Seq2SeqModel train_seq2seq(std::span<const TextPair> pairs,
                           const Seq2SeqConfig& config);
std::string generate_seq2seq(const Seq2SeqModel& model,
                             const std::string& source);

std::string pairs_hash(std::span<const TextPair> pairs);

}  // namespace remo

#endif  // REMO_SEQ2SEQ_HPP_
