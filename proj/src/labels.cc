// src/labels.cc

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

#include "remo/labels.hpp"

#include "remo/common.hpp"

namespace remo {

namespace {

constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "Amusement", "Awe",     "Contentment", "Excitement",
    "Fear",      "Sadness", "Anger",       "Disgust"};

constexpr std::array<std::string_view, kNumFrames> kFrameNames = {
    "2nd Amendment",
    "Gun Control/Regulation",
    "Politics",
    "Mental Health",
    "School/Public Space Safety",
    "Race/Ethnicity",
    "Public Opinion",
    "Society/Culture",
    "Economic Consequences"};

}  // namespace

std::string_view to_string(Emotion emotion) {
  return kEmotionNames[static_cast<size_t>(emotion)];
}

std::optional<Emotion> parse_emotion(std::string_view token) {
  for (size_t i = 0; i < kEmotionNames.size(); ++i) {
    if (token == kEmotionNames[i]) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

std::optional<Emotion> normalize_emotion_token(std::string_view token) {
  std::string_view body = trim(token);
  while (!body.empty() &&
         (body.back() == '.' || body.back() == ',' || body.back() == '!')) {
    body.remove_suffix(1);
  }
  body = trim(body);
  if (body.empty()) return std::nullopt;
  const std::string lowered = to_lower(body);
  for (size_t i = 0; i < kEmotionNames.size(); ++i) {
    if (lowered == to_lower(kEmotionNames[i])) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

Emotion parse_emotion_or_throw(std::string_view token) {
  if (auto emotion = parse_emotion(token)) return *emotion;
  throw DataError("unknown emotion token: '" + std::string(token) + "'");
}

std::string_view to_string(Frame frame) {
  return kFrameNames[static_cast<size_t>(frame)];
}

std::optional<Frame> parse_frame(std::string_view token) {
  for (size_t i = 0; i < kFrameNames.size(); ++i) {
    if (token == kFrameNames[i]) return static_cast<Frame>(i);
  }
  return std::nullopt;
}

Frame parse_frame_or_throw(std::string_view token) {
  if (auto frame = parse_frame(token)) return *frame;
  throw DataError("unknown frame token: '" + std::string(token) + "'");
}

}  // namespace remo
