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

#include "tagvalid/error.hpp"

namespace tagvalid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kDesign: return "design";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerateTraining: return "degenerate-training";
    case ErrorKind::kData: return "data";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kFold: return "fold";
    case ErrorKind::kLoad: return "load";
    case ErrorKind::kUndefined: return "undefined-ratio";
    case ErrorKind::kDependency: return "dependency";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace tagvalid
