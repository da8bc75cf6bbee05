// src/seq2seq.cc

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

#include "remo/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "remo/common.hpp"

namespace remo {

namespace {

using nlohmann::ordered_json;
using nn::Matrix;
using nn::Vector;

constexpr char kModelMagic[9] = "REMOSEQ1";
constexpr double kInitStddev = 0.08;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void hash_block(std::uint64_t& h, const double* data, size_t count) {
  h = fnv1a64(std::string_view(reinterpret_cast<const char*>(data),
                               count * sizeof(double)),
              h);
}

void write_block(std::ofstream& out, const Matrix<double>& m) {
  const std::uint64_t rows = m.rows();
  const std::uint64_t cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix<double> read_block(std::ifstream& in) {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  Matrix<double> m(static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  return m;
}

std::vector<size_t> shuffled_indices(size_t n, std::mt19937_64& rng) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(bounded_rand(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

Seq2SeqVocab Seq2SeqVocab::build(std::span<const TextPair> pairs,
                                 std::span<const std::string> extra_texts) {
  Seq2SeqVocab vocab;
  vocab.tokens_ = {"<unk>", "<bos>", "<eos>"};
  for (size_t i = 0; i < vocab.tokens_.size(); ++i) {
    vocab.index_[vocab.tokens_[i]] = static_cast<int>(i);
  }
  auto absorb = [&vocab](const std::string& text) {
    for (auto& token : tokenize(text)) {
      if (!vocab.index_.count(token)) {
        vocab.index_[token] = static_cast<int>(vocab.tokens_.size());
        vocab.tokens_.push_back(token);
      }
    }
  };
  for (const auto& [source, target] : pairs) {
    absorb(source);
    absorb(target);
  }
  for (const auto& text : extra_texts) absorb(text);
  return vocab;
}

Seq2SeqVocab Seq2SeqVocab::from_tokens(std::vector<std::string> tokens) {
  Seq2SeqVocab vocab;
  vocab.tokens_ = std::move(tokens);
  for (size_t i = 0; i < vocab.tokens_.size(); ++i) {
    vocab.index_[vocab.tokens_[i]] = static_cast<int>(i);
  }
  return vocab;
}

std::vector<int> Seq2SeqVocab::encode(const std::string& text,
                                      size_t max_tokens) const {
  std::vector<int> ids;
  for (const auto& token : tokenize(text)) {
    if (max_tokens > 0 && ids.size() >= max_tokens) break;
    const auto found = index_.find(token);
    ids.push_back(found == index_.end() ? kUnk : found->second);
  }
  return ids;
}

std::string Seq2SeqVocab::decode(std::span<const int> ids) const {
  std::string text;
  for (int id : ids) {
    if (id == kUnk || id == kBos || id == kEos) continue;
    if (!text.empty()) text += ' ';
    text += tokens_[static_cast<size_t>(id)];
  }
  return text;
}

std::optional<int> Seq2SeqVocab::id_of(const std::string& token) const {
  const auto found = index_.find(token);
  if (found == index_.end()) return std::nullopt;
  return found->second;
}

std::string Seq2SeqManifest::to_json() const {
  ordered_json doc;
  doc["version"] = version;
  doc["data_hash"] = data_hash;
  doc["seed"] = seed;
  doc["epochs"] = epochs;
  doc["embed_dim"] = embed_dim;
  doc["hidden_dim"] = hidden_dim;
  doc["max_source_tokens"] = max_source_tokens;
  doc["max_target_tokens"] = max_target_tokens;
  doc["vocab_size"] = vocab_size;
  doc["train_loss"] = train_loss;
  doc["val_loss"] = val_loss;
  doc["init_weights_hash"] = init_weights_hash;
  doc["final_weights_hash"] = final_weights_hash;
  doc["parent_weights_hash"] = parent_weights_hash;
  return doc.dump();
}

Seq2SeqManifest Seq2SeqManifest::from_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  Seq2SeqManifest manifest;
  manifest.version = doc.at("version").get<int>();
  manifest.data_hash = doc.at("data_hash").get<std::string>();
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  manifest.epochs = doc.at("epochs").get<int>();
  manifest.embed_dim = doc.at("embed_dim").get<int>();
  manifest.hidden_dim = doc.at("hidden_dim").get<int>();
  manifest.max_source_tokens = doc.at("max_source_tokens").get<int>();
  manifest.max_target_tokens = doc.at("max_target_tokens").get<int>();
  manifest.vocab_size = doc.at("vocab_size").get<int>();
  manifest.train_loss = doc.at("train_loss").get<std::vector<double>>();
  manifest.val_loss = doc.at("val_loss").get<std::vector<double>>();
  manifest.init_weights_hash =
      doc.at("init_weights_hash").get<std::string>();
  manifest.final_weights_hash =
      doc.at("final_weights_hash").get<std::string>();
  manifest.parent_weights_hash =
      doc.at("parent_weights_hash").get<std::string>();
  return manifest;
}

struct Seq2SeqModel::Workspace {
  Matrix<double> g_embed_src, g_embed_tgt, g_combine_w, g_out_w;
  Vector<double> g_combine_b, g_out_b;
  nn::GruGrads<double> g_enc, g_dec;

  void zero(const Seq2SeqModel& m) {
    g_embed_src = Matrix<double>::Zero(m.embed_src_.rows(), m.embed_src_.cols());
    g_embed_tgt = Matrix<double>::Zero(m.embed_tgt_.rows(), m.embed_tgt_.cols());
    g_combine_w = Matrix<double>::Zero(m.combine_w_.rows(), m.combine_w_.cols());
    g_out_w = Matrix<double>::Zero(m.out_w_.rows(), m.out_w_.cols());
    g_combine_b = Vector<double>::Zero(m.combine_b_.size());
    g_out_b = Vector<double>::Zero(m.out_b_.size());
    g_enc.zero_like(m.encoder_);
    g_dec.zero_like(m.decoder_);
  }

  double squared_norm() const {
    double ss = g_embed_src.squaredNorm() + g_embed_tgt.squaredNorm() +
                g_combine_w.squaredNorm() + g_out_w.squaredNorm() +
                g_combine_b.squaredNorm() + g_out_b.squaredNorm();
    for (const auto* g : {&g_enc, &g_dec}) {
      ss += g->Wz.squaredNorm() + g->Uz.squaredNorm() + g->Wr.squaredNorm() +
            g->Ur.squaredNorm() + g->Wn.squaredNorm() + g->Un.squaredNorm() +
            g->bz.squaredNorm() + g->br.squaredNorm() + g->bn.squaredNorm();
    }
    return ss;
  }

  void scale(double factor) {
    g_embed_src *= factor;
    g_embed_tgt *= factor;
    g_combine_w *= factor;
    g_out_w *= factor;
    g_combine_b *= factor;
    g_out_b *= factor;
    for (auto* g : {&g_enc, &g_dec}) {
      g->Wz *= factor;
      g->Uz *= factor;
      g->Wr *= factor;
      g->Ur *= factor;
      g->Wn *= factor;
      g->Un *= factor;
      g->bz *= factor;
      g->br *= factor;
      g->bn *= factor;
    }
  }
};

void Seq2SeqModel::init_params(std::mt19937_64& rng) {
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto d = static_cast<Eigen::Index>(config_.embed_dim);
  const auto h = static_cast<Eigen::Index>(config_.hidden_dim);
  embed_src_.resize(v, d);
  embed_tgt_.resize(v, d);
  nn::init_gaussian(embed_src_, rng, kInitStddev);
  nn::init_gaussian(embed_tgt_, rng, kInitStddev);
  encoder_.init(d, h, rng, kInitStddev);
  decoder_.init(d, h, rng, kInitStddev);
  combine_w_.resize(h, 2 * h);
  nn::init_gaussian(combine_w_, rng, kInitStddev);
  combine_b_ = Vector<double>::Zero(h);
  out_w_.resize(v, h);
  nn::init_gaussian(out_w_, rng, kInitStddev);
  out_b_ = Vector<double>::Zero(v);
}

Matrix<double> Seq2SeqModel::encode(
    const std::vector<int>& source,
    std::vector<nn::GruStepCache<double>>* caches) const {
  const auto h = static_cast<Eigen::Index>(config_.hidden_dim);
  Matrix<double> states(h, static_cast<Eigen::Index>(source.size()));
  Vector<double> state = Vector<double>::Zero(h);
  if (caches) caches->resize(source.size());
  for (size_t s = 0; s < source.size(); ++s) {
    const Vector<double> x = embed_src_.row(source[s]).transpose();
    nn::GruStepCache<double> cache;
    state = nn::gru_forward(encoder_, x, state,
                            caches ? &(*caches)[s] : &cache);
    states.col(static_cast<Eigen::Index>(s)) = state;
  }
  return states;
}

Vector<double> Seq2SeqModel::decode_step(const Matrix<double>& enc_states,
                                         const Vector<double>& state,
                                         int prev_token,
                                         Vector<double>* next_state) const {
  const Vector<double> x = embed_tgt_.row(prev_token).transpose();
  nn::GruStepCache<double> cache;
  const Vector<double> s = nn::gru_forward(decoder_, x, state, &cache);
  const Vector<double> attn = nn::softmax(
      Vector<double>(enc_states.transpose() * s));
  const Vector<double> context = enc_states * attn;
  Vector<double> cat(s.size() + context.size());
  cat << s, context;
  const Vector<double> o =
      (combine_w_ * cat + combine_b_).array().tanh().matrix();
  if (next_state) *next_state = s;
  return out_w_ * o + out_b_;
}

double Seq2SeqModel::pair_loss_and_grads(const std::vector<int>& source,
                                         const std::vector<int>& target,
                                         Workspace* ws) const {
  const auto h = static_cast<Eigen::Index>(config_.hidden_dim);
  const size_t src_len = source.size();
  const size_t n_steps = target.size();  // target already ends with <eos>

  std::vector<nn::GruStepCache<double>> enc_caches;
  const Matrix<double> enc_states = encode(source, &enc_caches);

  // Decoder forward with teacher forcing, keeping per-step intermediates.
  struct StepCache {
    nn::GruStepCache<double> gru;
    Vector<double> attn, context, o, probs;
    int prev_token = 0;
  };
  std::vector<StepCache> steps(n_steps);

  Vector<double> state = enc_states.col(static_cast<Eigen::Index>(src_len - 1));
  double loss = 0.0;
  int prev = Seq2SeqVocab::kBos;
  for (size_t t = 0; t < n_steps; ++t) {
    StepCache& step = steps[t];
    step.prev_token = prev;
    const Vector<double> x = embed_tgt_.row(prev).transpose();
    const Vector<double> s = nn::gru_forward(decoder_, x, state, &step.gru);
    step.attn = nn::softmax(Vector<double>(enc_states.transpose() * s));
    step.context = enc_states * step.attn;
    Vector<double> cat(2 * h);
    cat << s, step.context;
    step.o = (combine_w_ * cat + combine_b_).array().tanh().matrix();
    const Vector<double> logits = out_w_ * step.o + out_b_;
    loss += nn::cross_entropy(logits, target[t]);
    step.probs = nn::softmax(logits);
    state = s;
    prev = target[t];
  }
  const double mean_loss = loss / static_cast<double>(n_steps);
  if (ws == nullptr) return mean_loss;

  // Backward.
  Matrix<double> d_enc_states =
      Matrix<double>::Zero(h, static_cast<Eigen::Index>(src_len));
  Vector<double> d_state_carry = Vector<double>::Zero(h);
  const double scale = 1.0 / static_cast<double>(n_steps);

  for (size_t t = n_steps; t-- > 0;) {
    const StepCache& step = steps[t];
    const Vector<double>& s = step.gru.h;

    Vector<double> dlogits = step.probs * scale;
    dlogits(target[t]) -= scale;

    ws->g_out_w += dlogits * step.o.transpose();
    ws->g_out_b += dlogits;
    const Vector<double> d_o = out_w_.transpose() * dlogits;
    const Vector<double> d_pre =
        (d_o.array() * (1.0 - step.o.array().square())).matrix();
    Vector<double> cat(2 * h);
    cat << s, step.context;
    ws->g_combine_w += d_pre * cat.transpose();
    ws->g_combine_b += d_pre;
    const Vector<double> d_cat = combine_w_.transpose() * d_pre;
    Vector<double> d_s = d_cat.head(h);
    const Vector<double> d_context = d_cat.tail(h);

    // context = enc_states * attn
    d_enc_states += d_context * step.attn.transpose();
    const Vector<double> d_attn = enc_states.transpose() * d_context;
    // attn = softmax(scores)
    const double inner = (step.attn.array() * d_attn.array()).sum();
    const Vector<double> d_scores =
        (step.attn.array() * (d_attn.array() - inner)).matrix();
    // scores_j = enc_states.col(j) . s
    d_enc_states += s * d_scores.transpose();
    d_s += enc_states * d_scores;

    d_s += d_state_carry;

    Vector<double> dx, dh_prev;
    nn::gru_backward(decoder_, step.gru, d_s, ws->g_dec, dx, dh_prev);
    ws->g_embed_tgt.row(step.prev_token) += dx.transpose();
    d_state_carry = dh_prev;
  }

  // Decoder initial state was the encoder's final hidden state.
  d_enc_states.col(static_cast<Eigen::Index>(src_len - 1)) += d_state_carry;

  Vector<double> carry = Vector<double>::Zero(h);
  for (size_t s_idx = src_len; s_idx-- > 0;) {
    const Vector<double> dh =
        d_enc_states.col(static_cast<Eigen::Index>(s_idx)) + carry;
    Vector<double> dx, dh_prev;
    nn::gru_backward(encoder_, enc_caches[s_idx], dh, ws->g_enc, dx, dh_prev);
    ws->g_embed_src.row(source[s_idx]) += dx.transpose();
    carry = dh_prev;
  }

  return mean_loss;
}

void Seq2SeqModel::train_epochs(std::span<const TextPair> pairs,
                                const Seq2SeqConfig& config) {
  // Pre-encode all pairs. Empty sources fall back to a lone <unk>.
  std::vector<std::vector<int>> sources(pairs.size());
  std::vector<std::vector<int>> targets(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    sources[i] = vocab_.encode(
        pairs[i].first, static_cast<size_t>(config.max_source_tokens));
    if (sources[i].empty()) sources[i].push_back(Seq2SeqVocab::kUnk);
    targets[i] = vocab_.encode(
        pairs[i].second, static_cast<size_t>(config.max_target_tokens));
    targets[i].push_back(Seq2SeqVocab::kEos);
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  auto order = shuffled_indices(pairs.size(), rng);
  size_t n_val = static_cast<size_t>(std::floor(
      config.val_fraction * static_cast<double>(pairs.size())));
  if (pairs.size() < 5) n_val = 0;
  std::vector<size_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<size_t> train_idx(order.begin() + n_val, order.end());
  if (train_idx.empty()) throw DataError("seq2seq: no training pairs left");

  struct OptSlot {
    Matrix<double>* param;
    Matrix<double>* grad;
    nn::AdamState<Matrix<double>> state;
  };
  struct OptSlotV {
    Vector<double>* param;
    Vector<double>* grad;
    nn::AdamState<Vector<double>> state;
  };

  Workspace ws;
  ws.zero(*this);
  std::vector<OptSlot> mats = {
      {&embed_src_, &ws.g_embed_src, {}},   {&embed_tgt_, &ws.g_embed_tgt, {}},
      {&encoder_.Wz, &ws.g_enc.Wz, {}},     {&encoder_.Uz, &ws.g_enc.Uz, {}},
      {&encoder_.Wr, &ws.g_enc.Wr, {}},     {&encoder_.Ur, &ws.g_enc.Ur, {}},
      {&encoder_.Wn, &ws.g_enc.Wn, {}},     {&encoder_.Un, &ws.g_enc.Un, {}},
      {&decoder_.Wz, &ws.g_dec.Wz, {}},     {&decoder_.Uz, &ws.g_dec.Uz, {}},
      {&decoder_.Wr, &ws.g_dec.Wr, {}},     {&decoder_.Ur, &ws.g_dec.Ur, {}},
      {&decoder_.Wn, &ws.g_dec.Wn, {}},     {&decoder_.Un, &ws.g_dec.Un, {}},
      {&combine_w_, &ws.g_combine_w, {}},   {&out_w_, &ws.g_out_w, {}},
  };
  std::vector<OptSlotV> vecs = {
      {&encoder_.bz, &ws.g_enc.bz, {}}, {&encoder_.br, &ws.g_enc.br, {}},
      {&encoder_.bn, &ws.g_enc.bn, {}}, {&decoder_.bz, &ws.g_dec.bz, {}},
      {&decoder_.br, &ws.g_dec.br, {}}, {&decoder_.bn, &ws.g_dec.bn, {}},
      {&combine_b_, &ws.g_combine_b, {}}, {&out_b_, &ws.g_out_b, {}},
  };
  nn::AdamConfig<double> adam;
  adam.lr = config.lr;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto epoch_order = train_idx;
    for (size_t i = epoch_order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(bounded_rand(rng, i));
      std::swap(epoch_order[i - 1], epoch_order[j]);
    }
    double epoch_loss = 0.0;
    for (size_t i : epoch_order) {
      ws.zero(*this);
      epoch_loss += pair_loss_and_grads(sources[i], targets[i], &ws);
      if (config.grad_clip > 0) {
        const double norm = std::sqrt(ws.squared_norm());
        if (norm > config.grad_clip) ws.scale(config.grad_clip / norm);
      }
      for (auto& slot : mats) {
        nn::adam_step(*slot.param, *slot.grad, slot.state, adam);
      }
      for (auto& slot : vecs) {
        nn::adam_step(*slot.param, *slot.grad, slot.state, adam);
      }
    }
    manifest_.train_loss.push_back(
        epoch_loss / static_cast<double>(epoch_order.size()));
    if (n_val > 0) {
      double val_loss = 0.0;
      for (size_t i : val_idx) {
        val_loss += pair_loss_and_grads(sources[i], targets[i], nullptr);
      }
      manifest_.val_loss.push_back(val_loss /
                                   static_cast<double>(val_idx.size()));
    }
  }
}

Seq2SeqModel Seq2SeqModel::train(std::span<const TextPair> pairs,
                                 const Seq2SeqConfig& config,
                                 std::span<const std::string> extra_vocab_texts) {
  if (pairs.empty()) throw DataError("seq2seq: no training pairs");
  Seq2SeqModel model;
  model.config_ = config;
  model.vocab_ = Seq2SeqVocab::build(pairs, extra_vocab_texts);

  std::mt19937_64 rng(config.seed);
  model.init_params(rng);

  model.manifest_.data_hash = pairs_hash(pairs);
  model.manifest_.seed = config.seed;
  model.manifest_.epochs = config.epochs;
  model.manifest_.embed_dim = config.embed_dim;
  model.manifest_.hidden_dim = config.hidden_dim;
  model.manifest_.max_source_tokens = config.max_source_tokens;
  model.manifest_.max_target_tokens = config.max_target_tokens;
  model.manifest_.vocab_size = model.vocab_.size();
  model.manifest_.init_weights_hash = model.weights_hash();

  model.train_epochs(pairs, config);
  model.manifest_.final_weights_hash = model.weights_hash();
  return model;
}

Seq2SeqModel Seq2SeqModel::fine_tune(std::span<const TextPair> pairs,
                                     const Seq2SeqConfig& config) const {
  if (pairs.empty()) throw DataError("seq2seq fine-tune: no training pairs");
  Seq2SeqModel model = *this;
  model.config_ = config;
  // Keep the vocabulary: stage-2 targets must live in the stage-1 space.
  model.manifest_ = Seq2SeqManifest{};
  model.manifest_.data_hash = pairs_hash(pairs);
  model.manifest_.seed = config.seed;
  model.manifest_.epochs = config.epochs;
  model.manifest_.embed_dim = config.embed_dim;
  model.manifest_.hidden_dim = config.hidden_dim;
  model.manifest_.max_source_tokens = config.max_source_tokens;
  model.manifest_.max_target_tokens = config.max_target_tokens;
  model.manifest_.vocab_size = model.vocab_.size();
  model.manifest_.parent_weights_hash = manifest_.final_weights_hash;
  model.manifest_.init_weights_hash = model.weights_hash();

  model.train_epochs(pairs, config);
  model.manifest_.final_weights_hash = model.weights_hash();
  return model;
}

std::vector<int> Seq2SeqModel::greedy_decode(
    const std::vector<int>& source) const {
  const Matrix<double> enc_states = encode(source, nullptr);
  Vector<double> state =
      enc_states.col(static_cast<Eigen::Index>(source.size()) - 1);
  std::vector<int> output;
  int prev = Seq2SeqVocab::kBos;
  for (int step = 0; step < config_.max_target_tokens; ++step) {
    Vector<double> next_state;
    Vector<double> logits = decode_step(enc_states, state, prev, &next_state);
    logits(Seq2SeqVocab::kUnk) = kNegInf;
    logits(Seq2SeqVocab::kBos) = kNegInf;
    Eigen::Index arg = 0;
    logits.maxCoeff(&arg);
    if (arg == Seq2SeqVocab::kEos) break;
    output.push_back(static_cast<int>(arg));
    state = next_state;
    prev = static_cast<int>(arg);
  }
  return output;
}

std::vector<int> Seq2SeqModel::beam_decode(const std::vector<int>& source,
                                           int beam_width) const {
  struct Beam {
    std::vector<int> tokens;
    double logp = 0.0;
    Vector<double> state;
    int prev = Seq2SeqVocab::kBos;
    bool done = false;
  };
  const Matrix<double> enc_states = encode(source, nullptr);
  Beam root;
  root.state = enc_states.col(static_cast<Eigen::Index>(source.size()) - 1);
  std::vector<Beam> beams = {root};

  for (int step = 0; step < config_.max_target_tokens; ++step) {
    bool all_done = true;
    std::vector<Beam> candidates;
    for (const Beam& beam : beams) {
      if (beam.done) {
        candidates.push_back(beam);
        continue;
      }
      all_done = false;
      Vector<double> next_state;
      Vector<double> logits =
          decode_step(enc_states, beam.state, beam.prev, &next_state);
      logits(Seq2SeqVocab::kUnk) = kNegInf;
      logits(Seq2SeqVocab::kBos) = kNegInf;
      const double peak = logits.maxCoeff();
      const double lse =
          peak + std::log((logits.array() - peak).exp().sum());
      const Vector<double> logprobs = (logits.array() - lse).matrix();
      // Stable top-k by (logprob desc, token id asc).
      std::vector<int> ids(static_cast<size_t>(logits.size()));
      for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
      const size_t k =
          std::min(static_cast<size_t>(beam_width), ids.size());
      std::partial_sort(ids.begin(), ids.begin() + static_cast<long>(k),
                        ids.end(), [&](int a, int b) {
                          if (logprobs(a) != logprobs(b)) {
                            return logprobs(a) > logprobs(b);
                          }
                          return a < b;
                        });
      for (size_t i = 0; i < k; ++i) {
        Beam next = beam;
        next.logp += logprobs(ids[i]);
        if (ids[i] == Seq2SeqVocab::kEos) {
          next.done = true;
        } else {
          next.tokens.push_back(ids[i]);
          next.state = next_state;
          next.prev = ids[i];
        }
        candidates.push_back(std::move(next));
      }
    }
    if (all_done) break;
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Beam& a, const Beam& b) { return a.logp > b.logp; });
    if (candidates.size() > static_cast<size_t>(beam_width)) {
      candidates.resize(static_cast<size_t>(beam_width));
    }
    beams = std::move(candidates);
  }
  return beams.front().tokens;
}

std::string Seq2SeqModel::generate(const std::string& source) const {
  std::vector<int> ids = vocab_.encode(
      source, static_cast<size_t>(config_.max_source_tokens));
  if (ids.empty()) ids.push_back(Seq2SeqVocab::kUnk);
  const std::vector<int> output = config_.beam_width > 1
                                      ? beam_decode(ids, config_.beam_width)
                                      : greedy_decode(ids);
  return vocab_.decode(output);
}

std::array<double, kNumEmotions> Seq2SeqModel::label_scores(
    const std::string& source) const {
  std::vector<int> ids = vocab_.encode(
      source, static_cast<size_t>(config_.max_source_tokens));
  if (ids.empty()) ids.push_back(Seq2SeqVocab::kUnk);
  const Matrix<double> enc_states = encode(ids, nullptr);
  const Vector<double> state =
      enc_states.col(static_cast<Eigen::Index>(ids.size()) - 1);
  const Vector<double> logits =
      decode_step(enc_states, state, Seq2SeqVocab::kBos, nullptr);

  std::array<double, kNumEmotions> scores{};
  std::vector<std::pair<size_t, double>> present;
  for (size_t i = 0; i < static_cast<size_t>(kNumEmotions); ++i) {
    const std::string token =
        to_lower(to_string(static_cast<Emotion>(static_cast<int>(i))));
    if (auto id = vocab_.id_of(token)) {
      present.emplace_back(i, logits(*id));
    }
  }
  if (present.empty()) {
    throw DataError("seq2seq: no emotion label token in vocabulary");
  }
  double peak = present.front().second;
  for (const auto& [idx, logit] : present) peak = std::max(peak, logit);
  double total = 0.0;
  for (auto& [idx, logit] : present) {
    logit = std::exp(logit - peak);
    total += logit;
  }
  for (const auto& [idx, value] : present) scores[idx] = value / total;
  return scores;
}

std::string Seq2SeqModel::weights_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto add = [&h](const Matrix<double>& m) {
    hash_block(h, m.data(), static_cast<size_t>(m.size()));
  };
  auto addv = [&h](const Vector<double>& v) {
    hash_block(h, v.data(), static_cast<size_t>(v.size()));
  };
  add(embed_src_);
  add(embed_tgt_);
  for (const auto* p : {&encoder_, &decoder_}) {
    add(p->Wz);
    add(p->Uz);
    add(p->Wr);
    add(p->Ur);
    add(p->Wn);
    add(p->Un);
    addv(p->bz);
    addv(p->br);
    addv(p->bn);
  }
  add(combine_w_);
  addv(combine_b_);
  add(out_w_);
  addv(out_b_);
  return hex64(h);
}

void Seq2SeqModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file: " + path);
  out.write(kModelMagic, 8);
  ordered_json header;
  header["manifest"] = ordered_json::parse(manifest_.to_json());
  header["config"] = {
      {"seed", config_.seed},
      {"epochs", config_.epochs},
      {"lr", config_.lr},
      {"embed_dim", config_.embed_dim},
      {"hidden_dim", config_.hidden_dim},
      {"max_source_tokens", config_.max_source_tokens},
      {"max_target_tokens", config_.max_target_tokens},
      {"beam_width", config_.beam_width},
      {"val_fraction", config_.val_fraction},
      {"grad_clip", config_.grad_clip},
  };
  header["vocab"] = vocab_.tokens();
  const std::string header_text = header.dump();
  const std::uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(),
            static_cast<std::streamsize>(header_text.size()));

  write_block(out, embed_src_);
  write_block(out, embed_tgt_);
  for (const auto* p : {&encoder_, &decoder_}) {
    write_block(out, p->Wz);
    write_block(out, p->Uz);
    write_block(out, p->Wr);
    write_block(out, p->Ur);
    write_block(out, p->Wn);
    write_block(out, p->Un);
    write_block(out, Matrix<double>(p->bz));
    write_block(out, Matrix<double>(p->br));
    write_block(out, Matrix<double>(p->bn));
  }
  write_block(out, combine_w_);
  write_block(out, Matrix<double>(combine_b_));
  write_block(out, out_w_);
  write_block(out, Matrix<double>(out_b_));
  if (!out) throw DataError("short write: " + path);
}

Seq2SeqModel Seq2SeqModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string_view(magic, 8) != std::string_view(kModelMagic, 8)) {
    throw DataError("not a seq2seq model file: " + path);
  }
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  const auto header = ordered_json::parse(header_text);

  Seq2SeqModel model;
  model.manifest_ = Seq2SeqManifest::from_json(header.at("manifest").dump());
  const auto& cfg = header.at("config");
  model.config_.seed = cfg.at("seed").get<std::uint64_t>();
  model.config_.epochs = cfg.at("epochs").get<int>();
  model.config_.lr = cfg.at("lr").get<double>();
  model.config_.embed_dim = cfg.at("embed_dim").get<int>();
  model.config_.hidden_dim = cfg.at("hidden_dim").get<int>();
  model.config_.max_source_tokens = cfg.at("max_source_tokens").get<int>();
  model.config_.max_target_tokens = cfg.at("max_target_tokens").get<int>();
  model.config_.beam_width = cfg.at("beam_width").get<int>();
  model.config_.val_fraction = cfg.at("val_fraction").get<double>();
  model.config_.grad_clip = cfg.at("grad_clip").get<double>();
  model.vocab_ = Seq2SeqVocab::from_tokens(
      header.at("vocab").get<std::vector<std::string>>());

  model.embed_src_ = read_block(in);
  model.embed_tgt_ = read_block(in);
  for (auto* p : {&model.encoder_, &model.decoder_}) {
    p->Wz = read_block(in);
    p->Uz = read_block(in);
    p->Wr = read_block(in);
    p->Ur = read_block(in);
    p->Wn = read_block(in);
    p->Un = read_block(in);
    p->bz = read_block(in);
    p->br = read_block(in);
    p->bn = read_block(in);
  }
  model.combine_w_ = read_block(in);
  model.combine_b_ = read_block(in);
  model.out_w_ = read_block(in);
  model.out_b_ = read_block(in);
  if (!in) throw DataError("truncated model file: " + path);
  return model;
}

Seq2SeqModel train_seq2seq(std::span<const TextPair> pairs,
                           const Seq2SeqConfig& config) {
  return Seq2SeqModel::train(pairs, config);
}

std::string generate_seq2seq(const Seq2SeqModel& model,
                             const std::string& source) {
  return model.generate(source);
}

std::string pairs_hash(std::span<const TextPair> pairs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [source, target] : pairs) {
    h = fnv1a64(source, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(target, h);
    h = fnv1a64("\x1e", h);
  }
  return hex64(h);
}

}  // namespace remo
