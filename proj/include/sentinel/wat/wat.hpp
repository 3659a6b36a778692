// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/wat/ast.hpp"
#include "sentinel/wat/errors.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel::wat {

/// Parses the supported WAT subset (see docs/wat-subset.md). Symbolic `$names` are
/// resolved to indices; duplicate names are rejected.
Module parse_wat(std::string_view text);

/// Encodes `module` in the binary format. Deterministic; throws EncodeError for
/// modules outside the subset (more than one memory, unknown signature).
Bytes encode_module(const Module& module);

/// Decodes a binary module. Throws DecodeError carrying the byte offset of the problem.
Module decode_module(std::span<const uint8_t> bytes);

/// Sets FuncDef::export_name to the first function export naming each function.
void normalize_export_names(Module& module);

enum class Rule {
    MemMaxExceeded,
    MemMinExceeded,
    LimitsMinAboveMax,
    MultipleMemories,
    IndexOutOfBounds,
    StartSignature,
    DuplicateExport,
    ConstExprInvalid,
    TypeMismatch,
    LaneOutOfRange,
    AlignmentTooLarge,
    MemoryRequired,
};

std::string_view rule_id(Rule rule) noexcept;

struct Violation {
    Rule rule;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const noexcept { return violations.empty(); }
    bool has(Rule rule) const noexcept;
};

/// Static validation. Violations are data; this never throws.
ValidationReport validate_module(const Module& module);

inline constexpr uint32_t max_memory_pages = 65536;

}  // namespace sentinel::wat
