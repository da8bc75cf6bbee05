// src/evaluation.cc

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

#include "remo/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "remo/common.hpp"

namespace remo {

namespace {

using nlohmann::ordered_json;

void require_equal_lengths(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": length mismatch (" +
                    std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::array<double, kNumEmotions> smooth_and_renormalize(
    const std::array<double, kNumEmotions>& probs, double epsilon) {
  std::array<double, kNumEmotions> out{};
  double total = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    out[i] = probs[i] + epsilon;
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

// Exact two-sided binomial p-value for n = b + c < 25. Every term is a
// dyadic rational with denominator 2^n, so the double sum is exact.
double exact_binomial_p(long b, long c) {
  const long n = b + c;
  const long m = std::min(b, c);
  double tail = 0.0;
  double coeff = 1.0;  // C(n, 0)
  for (long k = 0; k <= m; ++k) {
    if (k > 0) {
      coeff = coeff * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    tail += coeff;
  }
  const double p = 2.0 * tail * std::pow(0.5, static_cast<double>(n));
  return std::min(1.0, p);
}

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

double exact_match_accuracy(std::span<const Emotion> truths,
                            std::span<const Emotion> top1s) {
  require_equal_lengths(truths.size(), top1s.size(), "exact_match_accuracy");
  if (truths.empty()) throw DataError("exact_match_accuracy: no items");
  size_t correct = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == top1s[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truths.size());
}

double top2_accuracy(std::span<const Emotion> truths,
                     std::span<const std::array<Emotion, 2>> top2s) {
  require_equal_lengths(truths.size(), top2s.size(), "top2_accuracy");
  if (truths.empty()) throw DataError("top2_accuracy: no items");
  size_t hits = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == top2s[i][0] || truths[i] == top2s[i][1]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

double kl_divergence(const EmotionDistribution& p,
                     const EmotionDistribution& q, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("kl_divergence: epsilon must be positive");
  }
  const auto ps = smooth_and_renormalize(p.probs(), epsilon);
  const auto qs = smooth_and_renormalize(q.probs(), epsilon);
  double divergence = 0.0;
  for (size_t i = 0; i < ps.size(); ++i) {
    divergence += ps[i] * std::log(ps[i] / qs[i]);
  }
  return divergence;
}

AverageKl average_kl(std::span<const NewsItem> items,
                     std::span<const std::vector<Emotion>> generated_labels,
                     double epsilon, KlDirection direction) {
  require_equal_lengths(items.size(), generated_labels.size(), "average_kl");
  AverageKl result;
  double total = 0.0;
  for (size_t i = 0; i < items.size(); ++i) {
    if (generated_labels[i].empty()) {
      ++result.n_excluded;
      continue;
    }
    std::array<double, kNumEmotions> counts{};
    for (Emotion label : generated_labels[i]) {
      counts[static_cast<size_t>(label)] += 1.0;
    }
    const auto generated = EmotionDistribution::from_counts(counts);
    const auto human = emotion_distribution(items[i]);
    total += direction == KlDirection::HumanFirst
                 ? kl_divergence(human, generated, epsilon)
                 : kl_divergence(generated, human, epsilon);
    ++result.n_used;
  }
  if (result.n_used == 0) {
    throw DataError("average_kl: no item carried generated labels");
  }
  result.value = total / static_cast<double>(result.n_used);
  return result;
}

PairedOutcomes PairedOutcomes::from_predictions(
    std::span<const Emotion> truths, std::span<const Emotion> model_a,
    std::span<const Emotion> model_b) {
  require_equal_lengths(truths.size(), model_a.size(), "paired outcomes");
  require_equal_lengths(truths.size(), model_b.size(), "paired outcomes");
  PairedOutcomes outcomes;
  outcomes.pairs.reserve(truths.size());
  for (size_t i = 0; i < truths.size(); ++i) {
    outcomes.pairs.emplace_back(truths[i] == model_a[i],
                                truths[i] == model_b[i]);
  }
  return outcomes;
}

McNemarResult mcnemar_from_counts(long b, long c) {
  if (b < 0 || c < 0) {
    throw std::invalid_argument("mcnemar: discordant counts must be >= 0");
  }
  McNemarResult result;
  result.b = b;
  result.c = c;
  const long n = b + c;
  if (n == 0) {
    result.p_value = 1.0;
    result.degenerate = true;
    result.exact = true;
    return result;
  }
  if (n < 25) {
    result.exact = true;
    result.p_value = exact_binomial_p(b, c);
  } else {
    result.exact = false;
    const double diff = std::abs(static_cast<double>(b - c)) - 1.0;
    const double statistic = diff * diff / static_cast<double>(n);
    // Chi-square survival with 1 df.
    result.p_value = std::erfc(std::sqrt(statistic / 2.0));
  }
  return result;
}

McNemarResult mcnemar_test(const PairedOutcomes& outcomes) {
  long b = 0;
  long c = 0;
  for (const auto& [a_correct, b_correct] : outcomes.pairs) {
    if (a_correct && !b_correct) ++b;
    if (!a_correct && b_correct) ++c;
  }
  return mcnemar_from_counts(b, c);
}

ConfusionMatrix confusion_matrix(std::span<const Emotion> truths,
                                 std::span<const Emotion> top1s) {
  require_equal_lengths(truths.size(), top1s.size(), "confusion_matrix");
  ConfusionMatrix matrix{};
  for (size_t i = 0; i < truths.size(); ++i) {
    ++matrix[static_cast<size_t>(truths[i])][static_cast<size_t>(top1s[i])];
  }
  return matrix;
}

std::string confusion_to_csv(const ConfusionMatrix& matrix) {
  std::ostringstream out;
  out << "truth\\prediction";
  for (Emotion e : all_emotions()) out << ',' << to_string(e);
  out << '\n';
  for (size_t row = 0; row < kNumEmotions; ++row) {
    out << to_string(static_cast<Emotion>(row));
    for (size_t col = 0; col < kNumEmotions; ++col) {
      out << ',' << matrix[row][col];
    }
    out << '\n';
  }
  return out.str();
}

namespace {

ordered_json confusion_to_json(const ConfusionMatrix& matrix) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : matrix) {
    ordered_json cols = ordered_json::array();
    for (long v : row) cols.push_back(v);
    rows.push_back(cols);
  }
  return rows;
}

ConfusionMatrix confusion_from_json(const ordered_json& rows) {
  ConfusionMatrix matrix{};
  for (size_t r = 0; r < kNumEmotions; ++r) {
    for (size_t c = 0; c < kNumEmotions; ++c) {
      matrix[r][c] = rows.at(r).at(c).get<long>();
    }
  }
  return matrix;
}

}  // namespace

std::string EvalReport::to_json() const {
  ordered_json doc;
  doc["version"] = version;
  doc["pipeline"] = pipeline;
  doc["config_hash"] = config_hash;
  doc["test_set_hash"] = test_set_hash;
  doc["n_items"] = n_items;
  doc["n_excluded"] = n_excluded;
  doc["n_invalid_label"] = n_invalid_label;
  doc["exact_match"] = exact_match;
  doc["top2"] = top2;
  if (avg_kl) doc["avg_kl"] = *avg_kl;
  doc["confusion"] = confusion_to_json(confusion);
  doc["seeds"] = seeds;
  doc["runs"] = runs;
  doc["exact_match_mean"] = exact_match_mean;
  doc["exact_match_std"] = exact_match_std;
  doc["top2_mean"] = top2_mean;
  doc["top2_std"] = top2_std;
  return doc.dump();
}

EvalReport EvalReport::from_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  EvalReport report;
  report.version = doc.at("version").get<int>();
  report.pipeline = doc.at("pipeline").get<std::string>();
  report.config_hash = doc.at("config_hash").get<std::string>();
  report.test_set_hash = doc.at("test_set_hash").get<std::string>();
  report.n_items = doc.at("n_items").get<size_t>();
  report.n_excluded = doc.at("n_excluded").get<size_t>();
  report.n_invalid_label = doc.at("n_invalid_label").get<size_t>();
  report.exact_match = doc.at("exact_match").get<double>();
  report.top2 = doc.at("top2").get<double>();
  if (doc.contains("avg_kl")) report.avg_kl = doc.at("avg_kl").get<double>();
  report.confusion = confusion_from_json(doc.at("confusion"));
  report.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  report.runs = doc.at("runs").get<int>();
  report.exact_match_mean = doc.at("exact_match_mean").get<double>();
  report.exact_match_std = doc.at("exact_match_std").get<double>();
  report.top2_mean = doc.at("top2_mean").get<double>();
  report.top2_std = doc.at("top2_std").get<double>();
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "pipeline: " << pipeline << "  (runs: " << runs << ")\n";
  out << "  items: " << n_items << "  excluded: " << n_excluded
      << "  invalid-label: " << n_invalid_label << '\n';
  out << "  exact match: " << exact_match;
  if (runs > 1) out << "  (mean " << exact_match_mean << " +/- " << exact_match_std << ")";
  out << '\n';
  out << "  top-2:       " << top2;
  if (runs > 1) out << "  (mean " << top2_mean << " +/- " << top2_std << ")";
  out << '\n';
  if (avg_kl) out << "  avg KL:      " << *avg_kl << '\n';
  return out.str();
}

EvalReport make_report(const std::string& pipeline,
                       std::span<const Emotion> truths,
                       std::span<const Emotion> top1s,
                       std::span<const std::array<Emotion, 2>> top2s,
                       size_t n_excluded, size_t n_invalid_label,
                       std::uint64_t seed) {
  require_equal_lengths(truths.size(), top1s.size(), "make_report");
  require_equal_lengths(truths.size(), top2s.size(), "make_report");
  EvalReport report;
  report.pipeline = pipeline;
  report.n_items = truths.size();
  report.n_excluded = n_excluded;
  report.n_invalid_label = n_invalid_label;
  const double denom =
      static_cast<double>(truths.size() + n_invalid_label);
  if (denom <= 0.0) throw DataError("make_report: nothing to score");
  size_t exact = 0;
  size_t within2 = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == top1s[i]) ++exact;
    if (truths[i] == top2s[i][0] || truths[i] == top2s[i][1]) ++within2;
  }
  report.exact_match = static_cast<double>(exact) / denom;
  report.top2 = static_cast<double>(within2) / denom;
  if (report.exact_match > report.top2) {
    throw DataError("metric invariant violated: exact > top2");
  }
  report.confusion = confusion_matrix(truths, top1s);
  report.seeds = {seed};
  report.runs = 1;
  report.exact_match_mean = report.exact_match;
  report.top2_mean = report.top2;
  return report;
}

EvalReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("aggregate_runs: no reports");
  EvalReport aggregate = reports.front();
  std::vector<double> exacts, top2s, kls;
  aggregate.seeds.clear();
  aggregate.confusion = ConfusionMatrix{};
  aggregate.runs = 0;
  aggregate.n_excluded = 0;
  aggregate.n_invalid_label = 0;
  for (const auto& report : reports) {
    if (report.pipeline != aggregate.pipeline) {
      throw DataError("aggregate_runs: mixed pipelines ('" +
                      aggregate.pipeline + "' vs '" + report.pipeline + "')");
    }
    if (report.test_set_hash != aggregate.test_set_hash) {
      throw DataError("aggregate_runs: heterogeneous test sets");
    }
    exacts.push_back(report.exact_match);
    top2s.push_back(report.top2);
    if (report.avg_kl) kls.push_back(*report.avg_kl);
    aggregate.seeds.insert(aggregate.seeds.end(), report.seeds.begin(),
                           report.seeds.end());
    aggregate.runs += report.runs;
    aggregate.n_excluded += report.n_excluded;
    aggregate.n_invalid_label += report.n_invalid_label;
    for (size_t r = 0; r < kNumEmotions; ++r) {
      for (size_t c = 0; c < kNumEmotions; ++c) {
        aggregate.confusion[r][c] += report.confusion[r][c];
      }
    }
  }
  aggregate.exact_match_mean = mean_of(exacts);
  aggregate.exact_match_std = sample_std(exacts, aggregate.exact_match_mean);
  aggregate.top2_mean = mean_of(top2s);
  aggregate.top2_std = sample_std(top2s, aggregate.top2_mean);
  aggregate.exact_match = aggregate.exact_match_mean;
  aggregate.top2 = aggregate.top2_mean;
  if (!kls.empty()) aggregate.avg_kl = mean_of(kls);
  return aggregate;
}

}  // namespace remo
