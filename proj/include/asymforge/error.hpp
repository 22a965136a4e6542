// Copyright 2026 The asymforge Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asymforge {

enum class ErrorCode {
    NotSquare,
    NotHermitian,
    ConvergenceFailure,
    NegativeEigenvalueBeyondTolerance,
    TraceNotOne,
    NotPSD,
    InvalidRank,
    DimMismatch,
    NotUnitary,
    AllOutcomesBelowFloor,
    TrivialObservable,
    InvalidShotCount,
    InvalidArgument,
    ParseError,
    FileNotFound,
    UnknownBoundId,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NegativeEigenvalueBeyondTolerance: return "NegativeEigenvalueBeyondTolerance";
        case ErrorCode::TraceNotOne: return "TraceNotOne";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::InvalidRank: return "InvalidRank";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::AllOutcomesBelowFloor: return "AllOutcomesBelowFloor";
        case ErrorCode::TrivialObservable: return "TrivialObservable";
        case ErrorCode::InvalidShotCount: return "InvalidShotCount";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::UnknownBoundId: return "UnknownBoundId";
    }
    return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
constexpr bool is_numerical_failure(ErrorCode code) {
    return code == ErrorCode::ConvergenceFailure ||
           code == ErrorCode::NegativeEigenvalueBeyondTolerance ||
           code == ErrorCode::AllOutcomesBelowFloor;
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace asymforge
