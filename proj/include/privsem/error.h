// Copyright 2026 The Privsem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVSEM_ERROR_H_
#define PRIVSEM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace privsem {

enum class ErrorCode {
  kNegativeMass,
  kMassNotOne,
  kShapeMismatch,
  kTooLarge,
  kMixedRepresentation,
  kUnknownVariable,
  kOverlappingSubsets,
  kSourceMismatch,
  kNameCollision,
  kInvalidArgument,
  kNonRationalInput,
  kBijectionMismatch,
  kEpsilonOutOfRange,
  kDegeneratePrivateData,
  kAlphaOutOfRange,
  kSymbolCollision,
  kNoValidSeparation,
  kInconsistentMechanism,
  kMissingNumericLabels,
  kMissingSplitVariables,
  kDegenerateComponent,
  kComponentEpsilonOutOfRange,
  kGridTooLarge,
  kParseError,
  kValidationError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace privsem

#endif  // PRIVSEM_ERROR_H_
