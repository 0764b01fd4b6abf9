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

#include "tagvalid/label.hpp"

#include "tagvalid/error.hpp"

namespace tagvalid {

std::string_view to_string(Label label) {
  return label == Label::kVocals ? "Vocals" : "NonVocals";
}

Label parse_label(std::string_view text) {
  if (text == "Vocals" || text == "vocals") return Label::kVocals;
  if (text == "NonVocals" || text == "nonvocals" || text == "Non-Vocals") return Label::kNonVocals;
  throw Error(ErrorKind::kFormat, "unknown label '" + std::string(text) + "'");
}

}  // namespace tagvalid
