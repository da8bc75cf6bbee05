// include/remo/common.hpp

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

#ifndef REMO_COMMON_HPP_
#define REMO_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace remo {

// Error taxonomy mirrored by the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (bad config file, missing env var).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data (parse errors, integrity violations).
class DataError : public Error {
 public:
  using Error::Error;
};

// Generator backend failure. `transient` marks retry-worthy transport
// failures as opposed to permanent ones (bad request, missing fixture).
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool transient)
      : Error(what), transient_(transient) {}
  bool transient() const { return transient_; }

 private:
  bool transient_;
};

// 64-bit FNV-1a. Used for cache keys and content/manifest hashes; not
// cryptographic, which is fine for desk-scale provenance checks.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

inline std::string content_hash(std::string_view data) {
  return hex64(fnv1a64(data));
}

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

// Lowercase alphanumeric word runs; apostrophes are kept inside words so
// contractions survive ("it's" -> "it's").
std::vector<std::string> tokenize(std::string_view text);

size_t token_count(std::string_view text);

// Unbiased draw in [0, n). Rejection-sampled so the stream depends only on
// the mt19937_64 sequence, not on stdlib distribution internals.
std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string utc_timestamp();

}  // namespace remo

#endif  // REMO_COMMON_HPP_
