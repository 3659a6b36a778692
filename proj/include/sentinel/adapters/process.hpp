// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sentinel::adapters {

/// The executable could not be started.
class SpawnError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ProcessRequest {
    std::vector<std::string> argv;  // argv[0] is the executable path
    std::filesystem::path cwd;
    std::optional<std::string> stdin_data;
    std::vector<std::pair<std::string, std::string>> extra_env;
    std::chrono::milliseconds timeout{10000};
};

/// Raw termination record. Exactly one of exit_code, signal, timed_out classifies it.
struct ProcessOutcome {
    std::string out;
    std::string err;
    std::optional<int> exit_code;
    std::optional<int> signal;
    bool timed_out = false;
    std::chrono::milliseconds duration{0};
    std::optional<uint64_t> peak_memory;  // bytes
    int pgid = 0;
};

/// Runs a child in its own process group, feeding stdin and capturing both streams.
/// On timeout the whole group receives SIGKILL. Never throws for nonzero exit,
/// signals or timeouts; throws SpawnError if the executable cannot be run.
ProcessOutcome run_process(const ProcessRequest& req);

/// Resolves a bare command name through PATH. Empty when not found.
std::filesystem::path find_executable(const std::string& name);

}  // namespace sentinel::adapters
