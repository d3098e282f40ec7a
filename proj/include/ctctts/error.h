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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctctts {

enum class ErrorKind {
  kInvalidLabelIndex,
  kInfeasibleAlignment,
  kEmptyAlignment,
  kRatioMismatch,
  kDuplicateEntry,
  kUnknownPhoneme,
  kUnknownWord,
  kLexiconAlignmentMismatch,
  kInvalidConfig,
  kEmptyUtterance,
  kTextOverflow,
  kParseError,
  kRunawayBlock,
  kTraceMismatch,
  kExhausted,
  kEmptyCorpus,
  kUnknownContext,
  kDecoderContract,
  kFormatError,
};

// Stable name of an error kind, e.g. "InfeasibleAlignment".
std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type. what() starts with
// the kind name so diagnostics are greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ctctts
