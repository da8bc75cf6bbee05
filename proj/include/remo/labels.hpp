// include/remo/labels.hpp

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

#ifndef REMO_LABELS_HPP_
#define REMO_LABELS_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace remo {

// Closed 8-way emotion taxonomy. Enumerator order is the canonical order
// used everywhere ties must break deterministically.
enum class Emotion : int {
  Amusement = 0,
  Awe,
  Contentment,
  Excitement,
  Fear,
  Sadness,
  Anger,
  Disgust,
};

inline constexpr int kNumEmotions = 8;

constexpr std::array<Emotion, kNumEmotions> all_emotions() {
  return {Emotion::Amusement, Emotion::Awe,     Emotion::Contentment,
          Emotion::Excitement, Emotion::Fear,   Emotion::Sadness,
          Emotion::Anger,      Emotion::Disgust};
}

std::string_view to_string(Emotion emotion);

// Exact canonical spelling only ("Fear", not "fear").
std::optional<Emotion> parse_emotion(std::string_view token);

// Lenient form used on generated text: trims whitespace, drops any
// trailing '.'/','/'!' and matches case-insensitively. Anything outside the
// closed set stays unparsed.
std::optional<Emotion> normalize_emotion_token(std::string_view token);

Emotion parse_emotion_or_throw(std::string_view token);

// The 9 news-framing categories attached to each headline.
enum class Frame : int {
  SecondAmendment = 0,
  GunControlRegulation,
  Politics,
  MentalHealth,
  SchoolPublicSpaceSafety,
  RaceEthnicity,
  PublicOpinion,
  SocietyCulture,
  EconomicConsequences,
};

inline constexpr int kNumFrames = 9;

constexpr std::array<Frame, kNumFrames> all_frames() {
  return {Frame::SecondAmendment,
          Frame::GunControlRegulation,
          Frame::Politics,
          Frame::MentalHealth,
          Frame::SchoolPublicSpaceSafety,
          Frame::RaceEthnicity,
          Frame::PublicOpinion,
          Frame::SocietyCulture,
          Frame::EconomicConsequences};
}

std::string_view to_string(Frame frame);
std::optional<Frame> parse_frame(std::string_view token);
Frame parse_frame_or_throw(std::string_view token);

}  // namespace remo

#endif  // REMO_LABELS_HPP_
