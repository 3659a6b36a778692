// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/corpus/test_case.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sentinel::corpus {

class ManifestError : public std::runtime_error
{
public:
    ManifestError(std::string field, std::string reason)
      : std::runtime_error(field + ": " + reason), field_{std::move(field)}, reason_{std::move(reason)}
    {}
    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

class DuplicateCaseId : public std::runtime_error
{
public:
    explicit DuplicateCaseId(const std::string& id) : std::runtime_error("duplicate case id \"" + id + "\""), id_{id} {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class IoError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

class SandboxEscape : public std::runtime_error
{
public:
    explicit SandboxEscape(const std::string& path)
      : std::runtime_error("path \"" + path + "\" escapes the sandbox"), path_{path}
    {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// The shipped detector cases.
std::vector<TestCase> builtin_corpus();

/// Reads a JSON manifest. Relative binary and fixture source paths resolve against
/// the manifest's directory. An empty file yields no cases.
std::vector<TestCase> load_manifest(const std::filesystem::path& path);

/// Appends `extra` to `base`; throws DuplicateCaseId on an id clash.
std::vector<TestCase> merge_cases(std::vector<TestCase> base, const std::vector<TestCase>& extra);

/// `count` files named "f000..." (each name `name_length` chars) inside `dir`.
std::vector<FixtureEntry> counted_files(const std::string& dir, size_t count, size_t name_length);

/// Lexically normalizes a fixture path; throws SandboxEscape for absolute or ".." paths.
std::filesystem::path checked_relative(const std::string& path);

struct ResolvedPreopen {
    std::filesystem::path host;  // absolute
    std::string guest;
};

/// A materialized fixture. Removes its tree on destruction unless released.
class SandboxHandle
{
public:
    SandboxHandle() = default;
    SandboxHandle(std::filesystem::path root, std::vector<ResolvedPreopen> preopens);
    SandboxHandle(SandboxHandle&& other) noexcept;
    SandboxHandle& operator=(SandboxHandle&& other) noexcept;
    SandboxHandle(const SandboxHandle&) = delete;
    SandboxHandle& operator=(const SandboxHandle&) = delete;
    ~SandboxHandle();

    const std::filesystem::path& root() const noexcept { return root_; }
    const std::vector<ResolvedPreopen>& preopens() const noexcept { return preopens_; }

    /// Evaluates path assertions; returns one message per failed assertion.
    std::vector<std::string> check(const std::vector<PathAssertion>& assertions) const;

    void cleanup();
    /// Keeps the tree on disk (for repro).
    void release() noexcept { root_.clear(); }

private:
    std::filesystem::path root_;
    std::vector<ResolvedPreopen> preopens_;
};

/// Builds the case's fixture tree under `root` (created if missing, must be empty).
SandboxHandle materialize_fixture(const TestCase& tc, const std::filesystem::path& root);

struct VerificationFailure {
    std::string case_id;
    std::string stage;  // parse, encode, decode, roundtrip, validate, eval, manifest
    std::string detail;
};

struct VerificationReport {
    size_t checked = 0;
    std::vector<VerificationFailure> failures;
    bool ok() const noexcept { return failures.empty(); }
};

/// Static self-check: assemble, round-trip, validate per tag, compare expectations
/// against the reference evaluator.
VerificationReport verify_corpus(const std::vector<TestCase>& cases);

/// Categories that have no case, in matrix order.
std::vector<Category> missing_categories(const std::vector<TestCase>& cases);

}  // namespace sentinel::corpus
