// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/adapters/runtime.hpp"
#include "sentinel/corpus/corpus.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sentinel::oracle {

using adapters::RunResult;

enum class VerdictKind { Pass, Fail, Crash, Timeout, Skip, Undecided };

std::string_view to_string(VerdictKind k) noexcept;
std::optional<VerdictKind> verdict_kind_from_string(std::string_view s) noexcept;

struct Verdict {
    VerdictKind kind = VerdictKind::Pass;
    std::string rule;      // oracle that decided: "expected_stdout", "determinism", "signal", ...
    std::string detail;
    std::string expected;  // excerpts, may be empty
    std::string actual;
    std::vector<size_t> evidence;  // indices of the judged RunResults

    bool is_bug() const noexcept
    {
        return kind == VerdictKind::Fail || kind == VerdictKind::Crash || kind == VerdictKind::Timeout;
    }

    static Verdict pass(std::string rule = {}, std::string detail = {});
    static Verdict skip(std::string reason);
};

/// Runs the case's single-run oracles over its repeats: signal, timeout, determinism,
/// trap, error, valid, invalid, stdout, values, filesystem state, memory trend.
/// `value_pattern` is the runtime's result regex (one capture group), may be empty.
Verdict judge_single(const std::vector<RunResult>& results, const corpus::TestCase& tc,
                     const corpus::SandboxHandle& sandbox, const std::string& value_pattern = {});

/// Strict-majority vote over trimmed stdout of clean exits. Keys are participant names.
std::map<std::string, Verdict> judge_differential(const std::map<std::string, RunResult>& results,
                                                  const corpus::TestCase& tc);

/// Linear trend of peak memory over repeats.
Verdict judge_leak(const std::vector<RunResult>& results, const corpus::TestCase& tc);

/// True when the case has an oracle that states the correct behaviour outright.
bool has_concrete_oracle(const corpus::TestCase& tc);

/// Final verdict from the single-run verdict and an optional differential one.
Verdict combine(const Verdict& single, const std::optional<Verdict>& differential, const corpus::TestCase& tc);

/// Printed-result comparison. Returns an empty string on a match, else the mismatch.
std::string match_values(const std::string& printed, const std::vector<eval::Value>& expected,
                         const std::string& value_pattern = {});

/// Reads one printed value of type `type`: decimal, 0x hex, "0x4:i64", nan, inf;
/// v128 as 32 hex digits or an unsigned 128-bit decimal.
std::optional<eval::Value> parse_printed(std::string_view token, wat::ValType type);

/// CRLF to LF, then trims surrounding whitespace.
std::string normalize_output(std::string_view text);

/// First `limit` bytes, with a marker when cut.
std::string excerpt(std::string_view text, size_t limit = 200);

}  // namespace sentinel::oracle
