// src/generation.cc

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

#include "remo/generation.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace remo {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kBackoffBaseSeconds = 0.5;

std::string require_env(const std::string& name, const char* purpose) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError(std::string("environment variable ") + name +
                      " is not set (" + purpose + ")");
  }
  return value;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::LlmService: return "llm_service";
    case GeneratorKind::LocalSeq2Seq: return "local_seq2seq";
    case GeneratorKind::Mock: return "mock";
  }
  return "mock";
}

GeneratorKind parse_generator_kind(std::string_view token) {
  if (token == "llm_service") return GeneratorKind::LlmService;
  if (token == "local_seq2seq") return GeneratorKind::LocalSeq2Seq;
  if (token == "mock") return GeneratorKind::Mock;
  throw ConfigError("unknown generator kind: '" + std::string(token) + "'");
}

std::string GeneratorSpec::summary() const {
  return std::string(to_string(kind)) + ":" + model_id;
}

std::string prompt_hash(std::string_view prompt) {
  return content_hash(prompt);
}

std::string GenerationRecord::to_json() const {
  ordered_json doc;
  doc["item_id"] = item_id;
  doc["prompt_hash"] = prompt_hash;
  doc["backend"] = backend;
  doc["timestamp"] = timestamp;
  doc["parse_failed"] = parse_failed;
  ordered_json lines = ordered_json::array();
  for (const auto& line : parsed) {
    ordered_json entry;
    entry["explanation"] = line.explanation;
    entry["emotion"] = std::string(to_string(line.emotion));
    lines.push_back(entry);
  }
  doc["parsed"] = lines;
  doc["raw_response"] = raw_response;
  return doc.dump();
}

GenerationRecord GenerationRecord::from_json(const std::string& line) {
  const auto doc = ordered_json::parse(line);
  GenerationRecord record;
  record.item_id = doc.at("item_id").get<std::string>();
  record.prompt_hash = doc.at("prompt_hash").get<std::string>();
  record.backend = doc.at("backend").get<std::string>();
  record.timestamp = doc.at("timestamp").get<std::string>();
  record.parse_failed = doc.at("parse_failed").get<bool>();
  for (const auto& entry : doc.at("parsed")) {
    GeneratedLine parsed_line;
    parsed_line.explanation = entry.at("explanation").get<std::string>();
    parsed_line.emotion =
        parse_emotion_or_throw(entry.at("emotion").get<std::string>());
    record.parsed.push_back(std::move(parsed_line));
  }
  record.raw_response = doc.at("raw_response").get<std::string>();
  return record;
}

double SystemClock::now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_for(double seconds) {
  if (seconds > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
}

RateLimiter::RateLimiter(double rate_per_sec)
    : interval_(rate_per_sec > 0 ? 1.0 / rate_per_sec : 0.0) {}

void RateLimiter::acquire(Clock& clock) {
  if (interval_ <= 0) return;
  double wait = 0.0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const double now = clock.now();
    const double base = next_slot_ < now ? now : next_slot_;
    next_slot_ = base + interval_;
    wait = next_slot_ - now;
  }
  clock.sleep_for(wait);
}

MockBackend MockBackend::from_file(const std::string& path) {
  MockBackend backend;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock fixture file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& err) {
      throw ConfigError("fixture file " + path + " line " +
                        std::to_string(line_no) + ": " + err.what());
    }
    const std::string response = doc.at("response").get<std::string>();
    if (doc.contains("prompt")) {
      backend.add_fixture(doc.at("prompt").get<std::string>(), response);
    } else if (doc.contains("prompt_hash")) {
      backend.add_fixture_by_hash(doc.at("prompt_hash").get<std::string>(),
                                  response);
    } else {
      throw ConfigError("fixture file " + path + " line " +
                        std::to_string(line_no) +
                        ": needs 'prompt' or 'prompt_hash'");
    }
  }
  return backend;
}

void MockBackend::add_fixture(const std::string& prompt,
                              const std::string& response) {
  fixtures_[prompt_hash(prompt)] = response;
}

void MockBackend::add_fixture_by_hash(const std::string& hash,
                                      const std::string& response) {
  fixtures_[hash] = response;
}

std::string MockBackend::complete(const std::string& prompt) {
  ++calls_;
  const auto found = fixtures_.find(prompt_hash(prompt));
  if (found == fixtures_.end()) {
    throw BackendError(
        "mock backend has no fixture for prompt hash " + prompt_hash(prompt),
        /*transient=*/false);
  }
  return found->second;
}

HttpChatBackend::HttpChatBackend(const GeneratorSpec& spec, std::ostream* log)
    : model_id_(spec.model_id),
      temperature_(spec.temperature),
      seed_(spec.seed),
      log_(log) {
  endpoint_ = require_env(spec.endpoint_env, "LLM service endpoint URL");
  api_key_ = require_env(spec.api_key_env, "LLM service credential");
}

std::string HttpChatBackend::id() const {
  return "llm_service:" + model_id_;
}

std::string HttpChatBackend::complete(const std::string& prompt) {
  // Split "http://host:port/path" into client base and request path.
  const size_t scheme = endpoint_.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("endpoint URL must include a scheme: " + endpoint_);
  }
  const size_t path_pos = endpoint_.find('/', scheme + 3);
  const std::string base =
      path_pos == std::string::npos ? endpoint_ : endpoint_.substr(0, path_pos);
  const std::string path =
      path_pos == std::string::npos ? "/" : endpoint_.substr(path_pos);

  json body;
  body["model"] = model_id_;
  body["messages"] = json::array(
      {json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = temperature_;
  if (seed_ != 0) body["seed"] = seed_;

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  if (log_) {
    *log_ << "[llm] POST " << base << path << " model=" << model_id_
          << " prompt_bytes=" << prompt.size()
          << " (Authorization: Bearer <redacted>)\n";
  }
  auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw BackendError("llm_service transport failure: " +
                           httplib::to_string(result.error()),
                       /*transient=*/true);
  }
  if (log_) {
    *log_ << "[llm] status=" << result->status
          << " response_bytes=" << result->body.size() << '\n';
  }
  if (result->status == 429 || result->status >= 500) {
    throw BackendError(
        "llm_service returned status " + std::to_string(result->status),
        /*transient=*/true);
  }
  if (result->status != 200) {
    throw BackendError(
        "llm_service returned status " + std::to_string(result->status) +
            ": " + result->body.substr(0, 256),
        /*transient=*/false);
  }
  json doc;
  try {
    doc = json::parse(result->body);
  } catch (const json::parse_error&) {
    throw BackendError("llm_service returned non-JSON body",
                       /*transient=*/false);
  }
  try {
    return doc.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception&) {
    throw BackendError(
        "llm_service response missing choices[0].message.content",
        /*transient=*/false);
  }
}

GenerationCache::GenerationCache(const std::string& path) : path_(path) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    GenerationRecord record = GenerationRecord::from_json(line);
    // Records are immutable once persisted: first entry wins.
    records_.emplace(record.prompt_hash, std::move(record));
  }
}

std::optional<GenerationRecord> GenerationCache::lookup(
    const std::string& hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto found = records_.find(hash);
  if (found == records_.end()) return std::nullopt;
  return found->second;
}

void GenerationCache::append(const GenerationRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (records_.count(record.prompt_hash)) return;
  records_.emplace(record.prompt_hash, record);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw DataError("cannot append to generation cache: " + path_);
    out << record.to_json() << '\n';
  }
}

size_t GenerationCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return records_.size();
}

Generator::Generator(GeneratorSpec spec,
                     std::shared_ptr<GeneratorBackend> backend,
                     std::shared_ptr<GenerationCache> cache,
                     std::shared_ptr<Clock> clock)
    : spec_(std::move(spec)),
      backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<GenerationCache>()),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      limiter_(spec_.rate_per_sec) {
  if (!backend_) throw ConfigError("generator needs a backend");
}

GenerationRecord Generator::generate(const std::string& prompt,
                                     const std::string& item_id) {
  const std::string hash = prompt_hash(prompt);
  if (auto cached = cache_->lookup(hash)) {
    ++cache_hits_;
    return *cached;
  }

  limiter_.acquire(*clock_);

  std::string raw;
  const int attempts = spec_.max_attempts > 0 ? spec_.max_attempts : 1;
  for (int attempt = 1;; ++attempt) {
    try {
      raw = backend_->complete(prompt);
      break;
    } catch (const BackendError& err) {
      if (!err.transient() || attempt >= attempts) {
        if (err.transient()) {
          throw BackendError(std::string(err.what()) + " (after " +
                                 std::to_string(attempt) + " attempts)",
                             true);
        }
        throw;
      }
      clock_->sleep_for(kBackoffBaseSeconds *
                        std::pow(2.0, static_cast<double>(attempt - 1)));
    }
  }
  ++backend_calls_;

  GenerationRecord record;
  record.item_id = item_id;
  record.prompt_hash = hash;
  record.raw_response = raw;
  record.backend = backend_->id();
  record.timestamp = utc_timestamp();
  if (spec_.expected_lines > 0) {
    const ParsedGeneration parsed =
        parse_generation(raw, spec_.expected_lines);
    record.parsed = parsed.lines;
    record.parse_failed = !parsed.ok();
  }
  cache_->append(record);
  return record;
}

}  // namespace remo
