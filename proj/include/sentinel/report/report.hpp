// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/adapters/runtime.hpp"
#include "sentinel/corpus/category.hpp"
#include "sentinel/oracle/oracle.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sentinel::report {

using corpus::Category;
using oracle::Verdict;
using oracle::VerdictKind;

inline constexpr std::string_view harness_version = "0.1.0";
inline constexpr std::string_view schema_id = "sentinel-report/1";

/// One judged (case, runtime, mode).
struct VerdictRecord {
    std::string case_id;
    Category category = Category::A2;
    std::string runtime;
    std::string mode;
    Verdict verdict;
};

struct FixHint {
    Category category;
    std::vector<std::string> strategies;  // most frequent first
};

/// Static strategy table, one entry per taxonomy leaf.
const FixHint& fix_hint(Category c);

struct Cell {
    size_t bugs = 0;      // deduplicated Fail/Crash/Timeout records
    size_t timeouts = 0;  // part of `bugs`
    size_t passes = 0;
    size_t skips = 0;
    size_t undecided = 0;

    bool empty() const noexcept { return bugs + passes + skips + undecided == 0; }
    /// Every verdict Pass or Skip, at least one Pass.
    bool pass_mark() const noexcept { return bugs == 0 && undecided == 0 && passes > 0; }
    /// "✓", a count ("2", "3 [1 timeout]"), "?", "skip" or "-".
    std::string display() const;
    bool operator==(const Cell&) const = default;
};

/// A bug record after merging modes with identical outcome.
struct FailureRecord {
    std::string case_id;
    Category category = Category::A2;
    std::string runtime;
    std::vector<std::string> modes;
    VerdictKind kind = VerdictKind::Fail;
    std::string rule;
    std::string detail;
    std::string expected;
    std::string actual;
    bool operator==(const FailureRecord&) const = default;
};

struct UndecidedRecord {
    std::string case_id;
    Category category = Category::A2;
    std::string runtime;
    std::vector<std::string> modes;
    std::string detail;
    bool operator==(const UndecidedRecord&) const = default;
};

struct RuntimeInfo {
    std::string name;
    std::string version;
    bool operator==(const RuntimeInfo&) const = default;
};

struct Metadata {
    std::string harness_version{report::harness_version};
    std::string os;
    std::string timestamp;
    std::vector<std::string> modes;
    std::vector<RuntimeInfo> runtimes;  // column order
    bool operator==(const Metadata&) const = default;
};

struct ReportMatrix {
    Metadata metadata;
    std::vector<std::string> columns;
    std::vector<Category> rows;  // the detector-backed categories, matrix order
    std::map<Category, std::map<std::string, Cell>> cells;
    std::vector<FailureRecord> failures;    // includes categories outside the matrix rows
    std::vector<UndecidedRecord> undecided;
    std::map<std::string, size_t> totals;  // verdict kind name -> raw count

    const Cell& cell(Category row, const std::string& column) const;
    bool has_bugs() const noexcept { return !failures.empty(); }
    bool operator==(const ReportMatrix&) const = default;
};

/// Host description for the metadata header ("Linux 6.1 x86_64").
std::string host_os();
/// Current UTC time, ISO 8601.
std::string utc_timestamp();

ReportMatrix aggregate(const std::vector<VerdictRecord>& verdicts, Metadata metadata = {});

std::string render_markdown(const ReportMatrix& m);
std::string render_json(const ReportMatrix& m);

class ReportFormatError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Reads a document produced by render_json. Throws ReportFormatError.
ReportMatrix matrix_from_json(const std::string& text);

/// 0 when no Fail, Crash or Timeout; 1 otherwise.
int exit_status(const ReportMatrix& m) noexcept;

/// The command-line interface. Returns the process exit status.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sentinel::report
