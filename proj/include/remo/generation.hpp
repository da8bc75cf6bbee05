// include/remo/generation.hpp

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

#ifndef REMO_GENERATION_HPP_
#define REMO_GENERATION_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "remo/common.hpp"
#include "remo/prompting.hpp"

namespace remo {

enum class GeneratorKind {
  LlmService,
  LocalSeq2Seq,
  Mock,
};

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view token);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Mock;
  std::string model_id = "mock";
  double temperature = 0.0;
  std::uint64_t seed = 0;
  double rate_per_sec = 0.0;  // 0 disables rate limiting
  int max_attempts = 5;       // bounded exponential backoff
  int expected_lines = 10;    // 0 skips line parsing (raw text backends)
  std::string fixtures_path;  // mock: fixture table file
  std::string model_path;     // local_seq2seq: trained model file
  std::string endpoint_env = "REMO_LLM_ENDPOINT";
  std::string api_key_env = "REMO_LLM_API_KEY";

  std::string summary() const;  // "kind:model_id"
};

// One generation with provenance; persisted as a JSONL cache line.
struct GenerationRecord {
  std::string item_id;
  std::string prompt_hash;
  std::string raw_response;
  std::vector<GeneratedLine> parsed;
  bool parse_failed = false;
  std::string backend;
  std::string timestamp;

  std::string to_json() const;
  static GenerationRecord from_json(const std::string& line);
};

std::string prompt_hash(std::string_view prompt);

// Injectable time source so rate-limit and backoff behavior is testable on
// a simulated clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;  // seconds, monotonic
  virtual void sleep_for(double seconds) = 0;
};

class SystemClock : public Clock {
 public:
  double now() override;
  void sleep_for(double seconds) override;
};

class SimulatedClock : public Clock {
 public:
  double now() override { return now_; }
  void sleep_for(double seconds) override {
    if (seconds > 0) now_ += seconds;
  }

 private:
  double now_ = 0.0;
};

// Slot pacing: the i-th acquisition (0-based) completes no earlier than
// (i + 1) / rate after the limiter's first use.
class RateLimiter {
 public:
  explicit RateLimiter(double rate_per_sec);
  void acquire(Clock& clock);

 private:
  double interval_;
  double next_slot_ = -1.0;
  std::mutex mutex_;
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string id() const = 0;
};

// Fixture-table backend; the whole downstream pipeline is deterministic
// with it. Requires a fixture for every prompt it sees.
class MockBackend : public GeneratorBackend {
 public:
  MockBackend() = default;
  static MockBackend from_file(const std::string& path);

  void add_fixture(const std::string& prompt, const std::string& response);
  void add_fixture_by_hash(const std::string& hash,
                           const std::string& response);

  std::string complete(const std::string& prompt) override;
  std::string id() const override { return "mock"; }
  int calls() const { return calls_; }

 private:
  std::unordered_map<std::string, std::string> fixtures_;
  int calls_ = 0;
};

// HTTP chat-completion-style client. Endpoint URL and credential come from
// environment variables named in the spec; the credential is never logged.
class HttpChatBackend : public GeneratorBackend {
 public:
  explicit HttpChatBackend(const GeneratorSpec& spec,
                           std::ostream* log = nullptr);
  std::string complete(const std::string& prompt) override;
  std::string id() const override;

 private:
  std::string endpoint_;
  std::string api_key_;
  std::string model_id_;
  double temperature_;
  std::uint64_t seed_;
  std::ostream* log_;
};

// Append-only JSONL record store keyed by prompt hash. Single serialized
// writer, concurrent readers.
class GenerationCache {
 public:
  GenerationCache() = default;                    // in-memory only
  explicit GenerationCache(const std::string& path);  // persistent

  std::optional<GenerationRecord> lookup(const std::string& hash) const;
  void append(const GenerationRecord& record);
  size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unordered_map<std::string, GenerationRecord> records_;
  mutable std::mutex mutex_;
};

// Cached, rate-limited, retrying front end over a backend. At most one
// backend call ever happens per prompt hash per cache lifetime.
class Generator {
 public:
  Generator(GeneratorSpec spec, std::shared_ptr<GeneratorBackend> backend,
            std::shared_ptr<GenerationCache> cache = nullptr,
            std::shared_ptr<Clock> clock = nullptr);

  GenerationRecord generate(const std::string& prompt,
                            const std::string& item_id = "");

  const GeneratorSpec& spec() const { return spec_; }
  std::uint64_t backend_calls() const { return backend_calls_; }
  std::uint64_t cache_hits() const { return cache_hits_; }

 private:
  GeneratorSpec spec_;
  std::shared_ptr<GeneratorBackend> backend_;
  std::shared_ptr<GenerationCache> cache_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;
  std::uint64_t backend_calls_ = 0;
  std::uint64_t cache_hits_ = 0;
};

}  // namespace remo

#endif  // REMO_GENERATION_HPP_
