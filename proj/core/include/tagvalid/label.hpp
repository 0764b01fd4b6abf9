// Copyright 2026 The tagvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace tagvalid {

// The two mutually exclusive tags. Ties anywhere in the library resolve to
// kVocals, the majority class.
enum class Label { kVocals = 0, kNonVocals = 1 };

inline constexpr Label kTieLabel = Label::kVocals;

std::string_view to_string(Label label);
Label parse_label(std::string_view text);
inline int label_index(Label label) { return static_cast<int>(label); }
inline Label other(Label label) { return label == Label::kVocals ? Label::kNonVocals : Label::kVocals; }

}  // namespace tagvalid
