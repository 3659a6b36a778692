// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/adapters/process.hpp"
#include "sentinel/corpus/corpus.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sentinel::adapters {

enum class ExecutionMode { Interpreter, Jit, Aot };

std::string_view to_string(ExecutionMode m) noexcept;
std::optional<ExecutionMode> mode_from_string(std::string_view s) noexcept;

class ConfigError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A command template: one entry per argv token.
///
/// Token placeholders: {module} {artifact} {invoke} {args}. A token that mentions
/// {invoke} is dropped when the case has no invoke; {args} must stand alone and
/// expands to one token per argument.
/// Group tokens expand to zero or more tokens: {preopen:FMT} once per preopen with
/// {host} and {guest}; {env:FMT} once per variable with {name} and {value};
/// {invoke:FMT} only when an export is invoked. FMT is split on spaces.
using CommandTemplate = std::vector<std::string>;

/// Throws ConfigError on an unknown placeholder or malformed group.
void check_template(const CommandTemplate& t, bool allow_artifact);

bool template_has_group(const CommandTemplate& t, std::string_view group);
bool template_mentions(const CommandTemplate& t, std::string_view placeholder);

struct TemplateContext {
    std::string module;
    std::string artifact;
    std::optional<std::string> invoke;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> preopens;  // host, guest
    std::vector<std::pair<std::string, std::string>> env;
};

std::vector<std::string> expand_template(const CommandTemplate& t, const TemplateContext& ctx);

struct PrecompileStep {
    std::string binary;  // empty: the runtime's own binary
    CommandTemplate args;
};

/// Settings for one runtime as written in the config file.
struct RuntimeEntry {
    std::string name;
    std::string binary;
    std::vector<std::string> version_args{"--version"};
    std::map<ExecutionMode, CommandTemplate> templates;
    std::map<ExecutionMode, PrecompileStep> precompile;
    std::map<corpus::Feature, bool> features;  // static capability overrides
    std::string value_pattern;                 // regex with one group isolating printed results
};

struct RuntimeConfig {
    std::vector<RuntimeEntry> runtimes;
    std::chrono::milliseconds timeout{10000};
};

/// Parses runtimes.json text. Throws ConfigError.
RuntimeConfig parse_runtime_config(const std::string& json_text);
RuntimeConfig load_runtime_config(const std::filesystem::path& path);

/// SENTINEL_RUNTIMES if set, else `fallback`.
std::filesystem::path config_path(const std::filesystem::path& fallback);

/// Discovered runtime, ready to execute.
struct RuntimeSpec {
    std::string name;
    std::filesystem::path binary;
    std::string version;
    std::set<ExecutionMode> modes;
    std::map<ExecutionMode, CommandTemplate> templates;
    std::map<ExecutionMode, PrecompileStep> precompile;
    std::map<corpus::Feature, bool> features;
    std::string value_pattern;
};

struct Discovery {
    std::vector<RuntimeSpec> specs;
    std::vector<std::string> warnings;
};

/// Extracts "0.38.0" from "wasmtime-cli 0.38.0"; falls back to a date or the first line.
std::string parse_version(const std::string& probe_output);

/// Keeps runtimes whose binary exists and answers the version probe; others become warnings.
Discovery discover_runtimes(const RuntimeConfig& config);

struct RunResult {
    std::string stdout_data;
    std::string stderr_data;
    std::optional<int> exit_code;
    std::optional<int> signal;
    bool timed_out = false;
    std::chrono::milliseconds duration{0};
    std::optional<uint64_t> peak_memory;
    std::vector<std::string> command;
    bool precompile_failed = false;  // this result is the AoT compile step

    bool exited_cleanly() const noexcept { return exit_code && *exit_code == 0; }
};

/// Runs the case once. Module bytes go to a sibling of the sandbox root ("<root>.bin").
RunResult execute(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                  const corpus::SandboxHandle& sandbox, std::chrono::milliseconds timeout);

struct RepeatedRun {
    std::vector<RunResult> results;  // one per repeat, in order
    corpus::SandboxHandle last;      // sandbox of the final repeat, for filesystem checks
};

/// Runs the case max(1, tc.repeats) times, each in a fresh sandbox "<stem>-<i>".
RepeatedRun execute_repeats(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                            const std::filesystem::path& stem, std::chrono::milliseconds timeout);

/// Same, for already encoded module bytes (probes and repro).
RunResult execute_bytes(const RuntimeSpec& spec, ExecutionMode mode, const wat::Bytes& module,
                        const std::optional<corpus::Invoke>& invoke, const corpus::FixtureSpec& fixture,
                        const corpus::SandboxHandle& sandbox, std::chrono::milliseconds timeout);

/// The argv `execute` would run, with placeholder paths.
std::vector<std::string> describe_command(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                                          const corpus::SandboxHandle& sandbox);

/// Feature probing with a per (runtime, feature) cache.
class FeatureProber
{
public:
    explicit FeatureProber(std::filesystem::path scratch = {},
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

    bool supported(const RuntimeSpec& spec, corpus::Feature flag);
    size_t probes_run() const;

private:
    bool probe(const RuntimeSpec& spec, corpus::Feature flag);

    std::filesystem::path scratch_;
    std::chrono::milliseconds timeout_;
    mutable std::mutex mu_;
    std::map<std::pair<std::string, corpus::Feature>, bool> cache_;
    size_t probes_ = 0;
};

inline bool probe_support(FeatureProber& prober, const RuntimeSpec& spec, corpus::Feature flag)
{
    return prober.supported(spec, flag);
}

struct PlannedRun {
    const corpus::TestCase* tc = nullptr;
    const RuntimeSpec* runtime = nullptr;
    ExecutionMode mode = ExecutionMode::Jit;
    std::optional<std::string> skip_reason;
};

struct ExecutionPlan {
    std::vector<PlannedRun> runs;
};

/// Cross product of cases, runtimes and their modes (filtered by `modes` when non-empty);
/// pairs lacking a probed feature or template capability are marked Skip.
ExecutionPlan make_plan(const std::vector<corpus::TestCase>& cases, const std::vector<RuntimeSpec>& runtimes,
                        const std::set<ExecutionMode>& modes, FeatureProber& prober);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn);

}  // namespace sentinel::adapters
