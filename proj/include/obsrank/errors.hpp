// Copyright 2026 The obsrank Authors
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

namespace obsrank {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in different rings (modulus or truncation order differ).
class MismatchError : public Error {
public:
    using Error::Error;
};

/// A division by a non-unit happened while working at a specialization
/// point. The point was unlucky; callers resample.
class ZeroDivisorError : public Error {
public:
    using Error::Error;
};

/// Syntax or declaration error in an expression or a model file.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column, const std::string& source = "")
        : Error(format(message, line, column, source)), message_(message), line_(line), column_(column) {}

    const std::string& message() const noexcept { return message_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, int line, int column, const std::string& source) {
        const std::string where = "line " + std::to_string(line) + ", column " + std::to_string(column);
        return (source.empty() ? where : source + ": " + where) + ": " + message;
    }

    std::string message_;
    int line_;
    int column_;
};

/// A non-rational construct reached code that only handles rational functions.
class RationalityError : public Error {
public:
    using Error::Error;
};

/// A wall-clock deadline expired.
class TimeoutError : public Error {
public:
    using Error::Error;
};

/// The symbolic expression budget was exhausted.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

/// Every attempt of the retry budget hit an unlucky specialization.
class RetryExhaustedError : public Error {
public:
    using Error::Error;
};

/// Two random specializations produced different classifications.
class InconsistentResultError : public Error {
public:
    using Error::Error;
};

} // namespace obsrank
