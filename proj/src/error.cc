// Copyright (c) 2026 The ctc-interleave Authors. All Rights Reserved.
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

#include "ctctts/error.h"

namespace ctctts {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidLabelIndex: return "InvalidLabelIndex";
    case ErrorKind::kInfeasibleAlignment: return "InfeasibleAlignment";
    case ErrorKind::kEmptyAlignment: return "EmptyAlignment";
    case ErrorKind::kRatioMismatch: return "RatioMismatch";
    case ErrorKind::kDuplicateEntry: return "DuplicateEntry";
    case ErrorKind::kUnknownPhoneme: return "UnknownPhoneme";
    case ErrorKind::kUnknownWord: return "UnknownWord";
    case ErrorKind::kLexiconAlignmentMismatch: return "LexiconAlignmentMismatch";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kEmptyUtterance: return "EmptyUtterance";
    case ErrorKind::kTextOverflow: return "TextOverflow";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kRunawayBlock: return "RunawayBlock";
    case ErrorKind::kTraceMismatch: return "TraceMismatch";
    case ErrorKind::kExhausted: return "Exhausted";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kUnknownContext: return "UnknownContext";
    case ErrorKind::kDecoderContract: return "DecoderContract";
    case ErrorKind::kFormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace ctctts
