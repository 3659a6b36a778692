// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/corpus/category.hpp"
#include "sentinel/eval/value.hpp"
#include "sentinel/wat/ast.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sentinel::corpus {

enum class Feature { Simd, Wasi, StartSection };

std::string_view to_string(Feature f) noexcept;
std::optional<Feature> feature_from_string(std::string_view s) noexcept;

struct Invoke {
    std::string export_name;
    std::vector<eval::Value> args;
    bool operator==(const Invoke&) const = default;
};

/// One fixture entry; no content means an empty directory.
struct FixtureEntry {
    std::string path;
    std::optional<std::string> content;
    bool operator==(const FixtureEntry&) const = default;
};

/// `host` is relative to the sandbox root ("." is the root itself).
struct Preopen {
    std::string host;
    std::string guest;
    bool operator==(const Preopen&) const = default;
};

struct FixtureSpec {
    std::vector<FixtureEntry> tree;
    std::vector<Preopen> preopens;
    std::optional<std::string> stdin_data;
    std::vector<std::pair<std::string, std::string>> env;
    bool operator==(const FixtureSpec&) const = default;
};

struct PathAssertion {
    enum class Kind { Exists, Absent, EntryCount };
    Kind kind = Kind::Exists;
    std::string path;
    size_t count = 0;  // EntryCount only
    bool operator==(const PathAssertion&) const = default;
};

namespace oracle_kind {
/// Trimmed stdout must equal `text`.
struct ExpectedStdout {
    std::string text;
    bool operator==(const ExpectedStdout&) const = default;
};
/// Stdout lines rendered from returned values.
struct ExpectedValues {
    std::vector<eval::Value> values;
    bool operator==(const ExpectedValues&) const = default;
};
struct ExpectTrap {
    std::string substring;
    bool operator==(const ExpectTrap&) const = default;
};
struct ExpectError {
    std::string substring;
    bool operator==(const ExpectError&) const = default;
};
struct ExpectValid {
    bool operator==(const ExpectValid&) const = default;
};
/// `rule` is a validator rule id such as "MEM_MAX_EXCEEDED".
struct ExpectInvalid {
    std::string rule;
    bool operator==(const ExpectInvalid&) const = default;
};
struct FilesystemState {
    std::vector<PathAssertion> assertions;
    bool operator==(const FilesystemState&) const = default;
};
struct Determinism {
    bool operator==(const Determinism&) const = default;
};
struct Differential {
    bool operator==(const Differential&) const = default;
};
/// Peak memory trend across repeats.
struct MemoryLeak {
    double threshold_mib = 1.0;
    bool operator==(const MemoryLeak&) const = default;
};
}  // namespace oracle_kind

using OracleSpec = std::variant<oracle_kind::ExpectedStdout, oracle_kind::ExpectedValues, oracle_kind::ExpectTrap,
                                oracle_kind::ExpectError, oracle_kind::ExpectValid, oracle_kind::ExpectInvalid,
                                oracle_kind::FilesystemState, oracle_kind::Determinism, oracle_kind::Differential,
                                oracle_kind::MemoryLeak>;

std::string_view oracle_name(const OracleSpec& o) noexcept;

struct TestCase {
    std::string id;
    Category category = Category::A2;
    std::string wat;                           // empty when `binary` is set
    std::optional<std::filesystem::path> binary;
    std::optional<Invoke> invoke;
    std::set<Feature> features;
    FixtureSpec fixture;
    std::vector<OracleSpec> oracles;
    unsigned repeats = 1;
    std::optional<std::chrono::milliseconds> timeout;
    std::string note;

    template <typename T>
    const T* find_oracle() const
    {
        for (const auto& o : oracles)
            if (const auto* p = std::get_if<T>(&o))
                return p;
        return nullptr;
    }

    bool expects_invalid() const { return find_oracle<oracle_kind::ExpectInvalid>() != nullptr; }

    /// Parses `wat` or reads `binary`.
    wat::Module module() const;

    /// Encoded module: parsed and encoded, or the fixture bytes verbatim.
    wat::Bytes module_bytes() const;
};

/// "i32:-1", "i64:4", "f32:1.5", "f64:nan", "v128:0x<32 hex>", "v128:i32x4 1 2 3 4".
eval::Value parse_typed_value(std::string_view text);
std::string format_typed_value(const eval::Value& v);

/// Argument text passed on a runtime command line (plain decimal).
std::string cli_argument(const eval::Value& v);

}  // namespace sentinel::corpus
