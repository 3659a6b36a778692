// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

// Drives the sentinel binary end to end. The engine is the wasmtime python
// binding behind a small CLI shim; skipped when the binding is missing.

#include "temp_dir.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using sentinel::testing::TempDir;

namespace {

struct Proc {
    int status;
    std::string out;
};

Proc sh(const std::string& cmd)
{
    Proc p{-1, {}};
    FILE* f = ::popen(cmd.c_str(), "r");
    if (f == nullptr)
        return p;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0)
        p.out.append(buf.data(), n);
    const int st = ::pclose(f);
    p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return p;
}

std::string q(const std::string& s)
{
    std::string r = "'";
    for (char c : s)
        r += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return r + "'";
}

bool engine_available()
{
    return sh(q(SENTINEL_PYTHON) + " -c 'import wasmtime' 2>/dev/null").status == 0;
}

class EndToEnd : public ::testing::Test {
protected:
    void SetUp() override
    {
        if (!engine_available())
            GTEST_SKIP() << "python wasmtime binding not installed";
        const std::string shim = std::string(SENTINEL_TEST_SUPPORT_DIR) + "/pywasmtime_cli.py";
        nlohmann::json cfg = {
            {"runtimes",
             {{"wasmtime",
               {{"binary", shim},
                {"version_args", {"--version"}},
                {"modes", {"jit"}},
                {"templates",
                 {{"jit", "{preopen:--dir {host}::{guest}} {env:--env {name}={value}} {invoke:--invoke {invoke}} "
                          "{module} {args}"}}}}}}}};
        std::ofstream(tmp_.path() / "rt.json") << cfg.dump(2);
    }

    std::string cli(const std::string& args) const
    {
        return q(SENTINEL_CLI_PATH) + " " + args + " --config " + q((tmp_.path() / "rt.json").string());
    }

    TempDir tmp_{"e2e"};
};

}  // namespace

TEST_F(EndToEnd, BuiltinCorpusOnReferenceEngine)
{
    const auto report = tmp_.path() / "report.json";
    const auto p = sh(cli("run --format json --jobs 4 --output " + q(report.string())) + " 2>/dev/null");
    ASSERT_TRUE(p.status == 0 || p.status == 1) << p.status;
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("exit_status"), p.status);
    EXPECT_EQ(j.at("matrix").size(), 19u);
    ASSERT_EQ(j.at("metadata").at("runtimes").size(), 1u);
    EXPECT_EQ(j.at("metadata").at("runtimes").at(0).at("version"), "49.0.0");
    const unsigned passes = j.at("totals").value("pass", 0u);
    EXPECT_GE(passes, 38u) << j.at("failures").dump(2);
    // the binding has no v128 results and no wasi_unstable; nothing else may fail
    for (const auto& f : j.at("failures"))
    {
        const auto id = f.at("case").get<std::string>();
        EXPECT_TRUE(id == "A7.v128-result" || id == "B2.dual-wasi-import") << f.dump(2);
    }
    // every detector row got exercised
    for (const auto& row : j.at("matrix"))
        EXPECT_NE(row.at("cells").at("wasmtime").at("display"), "-") << row.at("category");

    const auto md = sh(q(SENTINEL_CLI_PATH) + " report " + q(report.string()));
    EXPECT_EQ(md.status, p.status);
    EXPECT_NE(md.out.find("| [B.1] "), std::string::npos);
}

TEST_F(EndToEnd, ReproducesRotationCaseVerbosely)
{
    const auto p = sh(cli("repro A2.rotr-zero-amount --runtime wasmtime") + " 2>&1");
    EXPECT_EQ(p.status, 0) << p.out;
    EXPECT_NE(p.out.find("verdict: pass"), std::string::npos) << p.out;
}

TEST(Export, WritesModulesAndFixtures)
{
    TempDir tmp("export");
    const auto p = sh(q(SENTINEL_CLI_PATH) + " export " + q(tmp.path().string()));
    ASSERT_EQ(p.status, 0);
    EXPECT_NE(p.out.find("exported 42 cases"), std::string::npos) << p.out;
    EXPECT_TRUE(fs::exists(tmp.path() / "A2.rotr-zero-amount" / "module.wasm"));
    EXPECT_TRUE(fs::exists(tmp.path() / "A2.rotr-zero-amount" / "module.wat"));
    // bytes match the shipped fixture tree
    const auto shipped = fs::path(SENTINEL_SOURCE_DIR) / "corpus" / "fixtures";
    for (const auto& e : fs::recursive_directory_iterator(tmp.path()))
    {
        if (!e.is_regular_file())
            continue;
        const auto rel = fs::relative(e.path(), tmp.path());
        std::ifstream a(e.path(), std::ios::binary), b(shipped / rel, std::ios::binary);
        ASSERT_TRUE(b.good()) << rel;
        EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}))
            << rel;
    }
}
