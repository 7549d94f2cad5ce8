// Copyright 2026 The RSPAP Authors
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

#ifndef RSPAP_ERROR_H_
#define RSPAP_ERROR_H_

#include <stdexcept>
#include <string>

namespace rspap {

enum class ErrorCode {
  kParameter,   // invalid argument to an operation
  kInput,       // unusable input data (e.g. an empty entry list)
  kFormat,      // malformed file content
  kIo,          // unreadable / unwritable file
  kDomain,      // not a probability distribution
  kSupport,     // p(x) > 0 where q(x) == 0
  kDegenerate,  // empty dataset, zero attackability, ...
  kState,       // operation called on an object in the wrong state
  kCapacity,    // exhaustive search larger than its budget
  kEvaluation,  // property function failed for a specific role set
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library. Callers that need to branch on the
// failure class inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Parameter, input and format errors are the caller's fault; the CLI maps
  // them to the validation exit status.
  bool IsValidationError() const {
    return code_ == ErrorCode::kParameter || code_ == ErrorCode::kInput ||
           code_ == ErrorCode::kFormat;
  }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kInput: return "input error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kSupport: return "support error";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kState: return "state error";
    case ErrorCode::kCapacity: return "capacity error";
    case ErrorCode::kEvaluation: return "evaluation error";
  }
  return "error";
}

}  // namespace rspap

#endif  // RSPAP_ERROR_H_
