// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentinel::wat {

class ParseError : public std::runtime_error
{
public:
    ParseError(size_t line, size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_{line},
        column_{column}
    {}

    size_t line() const noexcept { return line_; }
    size_t column() const noexcept { return column_; }

private:
    size_t line_;
    size_t column_;
};

/// A `$name` reference with no matching definition.
class UnresolvedName : public ParseError
{
public:
    using ParseError::ParseError;
};

class EncodeError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error
{
public:
    DecodeError(size_t offset, const std::string& reason)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + reason),
        offset_{offset},
        reason_{reason}
    {}

    size_t offset() const noexcept { return offset_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    size_t offset_;
    std::string reason_;
};

}  // namespace sentinel::wat
