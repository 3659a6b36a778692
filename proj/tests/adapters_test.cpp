// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "temp_dir.hpp"

#include "sentinel/adapters/process.hpp"
#include "sentinel/adapters/runtime.hpp"
#include "sentinel/corpus/corpus.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <thread>

#include <unistd.h>

using namespace sentinel::adapters;
using namespace std::chrono_literals;
using sentinel::corpus::Feature;
using sentinel::corpus::TestCase;
using sentinel::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const std::string stub = std::string(SENTINEL_TEST_SUPPORT_DIR) + "/stub_runtime.py";
const std::string pywasmtime = std::string(SENTINEL_TEST_SUPPORT_DIR) + "/pywasmtime_cli.py";

RuntimeSpec stub_spec(const std::string& behaviour, ExecutionMode mode = ExecutionMode::Jit)
{
    RuntimeSpec s;
    s.name = "stub";
    s.binary = stub;
    s.version = "1.2.3";
    s.modes = {mode};
    s.templates[mode] = {behaviour, "{module}", "{args}"};
    return s;
}

TestCase simple_case(const std::string& wat = "(module (func (export \"_start\")))")
{
    TestCase tc;
    tc.id = "T.simple";
    tc.wat = wat;
    tc.oracles = {sentinel::corpus::oracle_kind::ExpectValid{}};
    return tc;
}

// A pid is gone once /proc has no entry or it is an unreaped zombie.
bool alive(pid_t pid)
{
    std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
    if (!stat)
        return false;
    std::string line;
    std::getline(stat, line);
    const auto close = line.rfind(')');
    return close != std::string::npos && line.size() > close + 2 && line[close + 2] != 'Z';
}

bool group_empty(int pgid)
{
    for (const auto& e : fs::directory_iterator("/proc"))
    {
        const auto name = e.path().filename().string();
        if (name.find_first_not_of("0123456789") != std::string::npos)
            continue;
        const pid_t pid = std::stoi(name);
        if (::getpgid(pid) == pgid && alive(pid))
            return false;
    }
    return true;
}

bool python_wasmtime_available()
{
    ProcessRequest req;
    req.argv = {SENTINEL_PYTHON, "-c", "import wasmtime"};
    req.cwd = fs::temp_directory_path();
    req.timeout = 30s;
    try
    {
        return run_process(req).exit_code == 0;
    }
    catch (const SpawnError&)
    {
        return false;
    }
}

}  // namespace

TEST(Templates, ExpandPlaceholdersAndGroups)
{
    CommandTemplate t = {"run", "{preopen:--dir {host}::{guest}}", "{env:--env {name}={value}}",
                         "{invoke:--invoke {invoke}}", "{module}", "{args}"};
    EXPECT_NO_THROW(check_template(t, false));
    TemplateContext ctx;
    ctx.module = "/w/m.wasm";
    ctx.invoke = "rotr";
    ctx.args = {"4", "0"};
    ctx.preopens = {{"/s/a", "/a"}, {"/s/b", "/b"}};
    ctx.env = {{"K", "V"}};
    EXPECT_EQ(expand_template(t, ctx),
              (std::vector<std::string>{"run", "--dir", "/s/a::/a", "--dir", "/s/b::/b", "--env", "K=V", "--invoke",
                                        "rotr", "/w/m.wasm", "4", "0"}));
    ctx.invoke.reset();
    ctx.args.clear();
    ctx.preopens.clear();
    ctx.env.clear();
    EXPECT_EQ(expand_template(t, ctx), (std::vector<std::string>{"run", "/w/m.wasm"}));
    EXPECT_TRUE(template_has_group(t, "preopen"));
    EXPECT_FALSE(template_has_group({"{module}"}, "preopen"));
    EXPECT_TRUE(template_mentions(t, "invoke"));
}

TEST(Templates, RejectsUnknownPlaceholders)
{
    EXPECT_THROW(check_template({"{modulee}"}, false), ConfigError);
    EXPECT_THROW(check_template({"{artifact}"}, false), ConfigError);
    EXPECT_NO_THROW(check_template({"{artifact}"}, true));
    EXPECT_THROW(check_template({"{preopen:--dir {nope}}"}, false), ConfigError);
    EXPECT_THROW(check_template({"{preopen:--dir {host}"}, false), ConfigError);
    try
    {
        parse_runtime_config(R"({"runtimes": {"x": {"binary": "x", "templates": {"jit": "run {modulee}"}}}})");
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e)
    {
        EXPECT_NE(std::string(e.what()).find("unknown placeholder"), std::string::npos) << e.what();
    }
}

TEST(Config, ParsesShippedDefaults)
{
    const auto cfg = load_runtime_config(fs::path(SENTINEL_SOURCE_DIR) / "config" / "runtimes.json");
    std::vector<std::string> names;
    for (const auto& r : cfg.runtimes)
        names.push_back(r.name);
    EXPECT_EQ(names, (std::vector<std::string>{"wasmer", "wasmtime", "wamr", "wasm3", "wasmedge"}));
    EXPECT_EQ(cfg.timeout, 10000ms);
    for (const auto& r : cfg.runtimes)
    {
        EXPECT_FALSE(r.templates.empty()) << r.name;
        if (r.templates.count(ExecutionMode::Aot))
        {
            EXPECT_TRUE(r.precompile.count(ExecutionMode::Aot)) << r.name;
        }
    }
    EXPECT_THROW(parse_runtime_config("{}"), ConfigError);
    EXPECT_THROW(parse_runtime_config(R"({"runtimes": {"x": {"binary": "x", "modes": ["jit"], "templates": {"aot": "{module}"}}}})"),
                 ConfigError);
    EXPECT_THROW(parse_runtime_config(R"({"runtimes": {"x": {"binary": "x", "templates": {"jit": "{module}"}, "result_regex": "("}}})"),
                 ConfigError);
}

TEST(Config, EnvironmentOverridesPath)
{
    ::setenv("SENTINEL_RUNTIMES", "/tmp/elsewhere.json", 1);
    EXPECT_EQ(config_path("/x/default.json"), fs::path("/tmp/elsewhere.json"));
    ::unsetenv("SENTINEL_RUNTIMES");
    EXPECT_EQ(config_path("/x/default.json"), fs::path("/x/default.json"));
}

TEST(Discovery, VersionParsing)
{
    EXPECT_EQ(parse_version("wasmtime-cli 0.38.0"), "0.38.0");
    EXPECT_EQ(parse_version("wasmer 2.3.0\n"), "2.3.0");
    EXPECT_EQ(parse_version("iwasm 05-18-2022"), "05-18-2022");
    EXPECT_EQ(parse_version("Wasm3 v0.5.0 on x86_64"), "0.5.0");
    EXPECT_EQ(parse_version("wasmedge version 0.9.1-rc.2"), "0.9.1-rc.2");
    EXPECT_EQ(parse_version("custom build\nmore"), "custom build");
}

TEST(Discovery, MissingRuntimesBecomeWarnings)
{
    nlohmann::json cfg;
    const std::vector<std::pair<std::string, std::string>> runtimes = {
        {"wasmer", "/nonexistent/wasmer"}, {"wasmtime", stub}, {"wamr", "definitely-not-on-path-iwasm"},
        {"wasm3", stub}, {"wasmedge", "/nonexistent/wasmedge"}};
    for (const auto& [name, bin] : runtimes)
        cfg["runtimes"][name] = {{"binary", bin}, {"templates", {{"jit", "echo {module}"}}}};
    const auto d = discover_runtimes(parse_runtime_config(cfg.dump()));
    ASSERT_EQ(d.specs.size(), 2u);
    EXPECT_EQ(d.warnings.size(), 3u);
    EXPECT_EQ(d.specs[0].name, "wasmtime");
    EXPECT_EQ(d.specs[1].name, "wasm3");
    EXPECT_EQ(d.specs[0].version, "1.2.3");
    EXPECT_TRUE(d.specs[0].binary.is_absolute());
    EXPECT_EQ(d.specs[0].modes, std::set<ExecutionMode>{ExecutionMode::Jit});
}

TEST(Discovery, FailingVersionProbeIsAWarning)
{
    nlohmann::json cfg;
    cfg["runtimes"]["wasmtime"] = {{"binary", stub}, {"version_args", {"exit", "3"}}, {"templates", {{"jit", "{module}"}}}};
    const auto d = discover_runtimes(parse_runtime_config(cfg.dump()));
    EXPECT_TRUE(d.specs.empty());
    ASSERT_EQ(d.warnings.size(), 1u);
}

TEST(Execute, EveryTerminationIsClassified)
{
    TempDir tmp("exec");
    const auto tc = simple_case();
    {
        auto sb = sentinel::corpus::materialize_fixture(tc, tmp.path() / "a");
        const auto r = execute(stub_spec("exit"), ExecutionMode::Jit, [&] {
            auto c = tc;
            c.invoke = sentinel::corpus::Invoke{"_start", {}};
            return c;
        }(), sb, 10s);
        // "exit" consumes the module path as its status: the stub then fails to parse it
        EXPECT_TRUE(r.exit_code.has_value());
        EXPECT_FALSE(r.signal);
        EXPECT_FALSE(r.timed_out);
    }
    {
        auto spec = stub_spec("exit");
        spec.templates[ExecutionMode::Jit] = {"exit", "7", "{module}"};
        auto sb = sentinel::corpus::materialize_fixture(tc, tmp.path() / "b");
        const auto r = execute(spec, ExecutionMode::Jit, tc, sb, 10s);
        EXPECT_EQ(r.exit_code, 7);
        EXPECT_FALSE(r.signal);
        EXPECT_NE(r.stderr_data.find("stub failing with 7"), std::string::npos);
        EXPECT_FALSE(r.exited_cleanly());
    }
    {
        auto sb = sentinel::corpus::materialize_fixture(tc, tmp.path() / "c");
        const auto r = execute(stub_spec("signal"), ExecutionMode::Jit, tc, sb, 10s);
        EXPECT_EQ(r.signal, SIGSEGV);
        EXPECT_FALSE(r.exit_code);
        EXPECT_FALSE(r.timed_out);
    }
    {
        auto sb = sentinel::corpus::materialize_fixture(tc, tmp.path() / "d");
        const auto r = execute(stub_spec("hang"), ExecutionMode::Jit, tc, sb, 1500ms);
        EXPECT_TRUE(r.timed_out);
        EXPECT_FALSE(r.exit_code);
        EXPECT_FALSE(r.signal);
        std::ifstream pidfile(sb.root() / "child.pid");
        pid_t child = 0;
        pidfile >> child;
        ASSERT_GT(child, 0);
        EXPECT_FALSE(alive(child)) << "grandchild " << child << " survived the timeout kill";
    }
    {
        auto sb = sentinel::corpus::materialize_fixture(tc, tmp.path() / "e");
        auto c = tc;
        c.invoke = sentinel::corpus::Invoke{"f", {sentinel::eval::Value::i32(4), sentinel::eval::Value::i64(0)}};
        const auto r = execute(stub_spec("echo"), ExecutionMode::Jit, c, sb, 10s);
        ASSERT_EQ(r.exit_code, 0);
        EXPECT_TRUE(r.exited_cleanly());
        EXPECT_NE(r.stdout_data.find("module.wasm 4 0"), std::string::npos) << r.stdout_data;
        EXPECT_NE(r.stdout_data.find("module bytes: " + std::to_string(c.module_bytes().size())), std::string::npos);
        EXPECT_EQ(r.command.front(), stub);
        // module bytes live beside the sandbox and are gone afterwards
        EXPECT_FALSE(fs::exists(sb.root().string() + ".bin"));
    }
}

TEST(Execute, TimeoutKillsTheWholeGroup)
{
    TempDir tmp("pgkill");
    ProcessRequest req;
    req.argv = {stub, "hang", "x"};
    req.cwd = tmp.path();
    req.timeout = 1000ms;
    const auto out = run_process(req);
    EXPECT_TRUE(out.timed_out);
    ASSERT_GT(out.pgid, 0);
    EXPECT_TRUE(group_empty(out.pgid));
    EXPECT_THROW(run_process({{"/nonexistent/binary"}, tmp.path(), {}, {}, 1000ms}), SpawnError);
}

TEST(Execute, TwoSecondTimeoutDuration)
{
    TempDir tmp("timeout");
    auto sb = sentinel::corpus::materialize_fixture(simple_case(), tmp.path() / "s");
    const auto r = execute(stub_spec("hang"), ExecutionMode::Jit, simple_case(), sb, 2000ms);
    EXPECT_TRUE(r.timed_out);
    EXPECT_GE(r.duration.count(), 2000);
    EXPECT_LE(r.duration.count(), 4000);
}

TEST(Execute, RepeatsGiveIndependentResults)
{
    TempDir tmp("repeat");
    auto tc = simple_case();
    tc.repeats = 5;
    const auto rr = execute_repeats(stub_spec("echo"), ExecutionMode::Jit, tc, tmp.path() / "r", 10s);
    ASSERT_EQ(rr.results.size(), 5u);
    std::set<std::string> commands;
    for (const auto& r : rr.results)
    {
        EXPECT_EQ(r.exit_code, 0);
        commands.insert(r.stdout_data);
    }
    EXPECT_EQ(commands.size(), 5u);  // each run saw its own sandbox path
    EXPECT_EQ(rr.last.root(), fs::absolute(tmp.path() / "r-4"));
}

TEST(Execute, StdinCwdAndEnvironment)
{
    TempDir tmp("stdin");
    ProcessRequest req;
    req.argv = {"/bin/sh", "-c", "cat; pwd; printf %s \"$SENTINEL_X\""};
    req.cwd = tmp.path();
    req.stdin_data = "fed\n";
    req.extra_env = {{"SENTINEL_X", "y"}};
    const auto out = run_process(req);
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_EQ(out.out, "fed\n" + fs::canonical(tmp.path()).string() + "\ny");
    EXPECT_TRUE(out.peak_memory.has_value());
}

TEST(Execute, AotPrecompileStep)
{
    TempDir tmp("aot");
    auto spec = stub_spec("echo", ExecutionMode::Aot);
    spec.templates[ExecutionMode::Aot] = {"echo", "{artifact}"};
    spec.precompile[ExecutionMode::Aot] = {"", {"compile", "{module}", "{artifact}"}};
    auto sb = sentinel::corpus::materialize_fixture(simple_case(), tmp.path() / "s");
    const auto r = execute(spec, ExecutionMode::Aot, simple_case(), sb, 10s);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_FALSE(r.precompile_failed);
    EXPECT_NE(r.stdout_data.find("module.aot"), std::string::npos);

    spec.precompile[ExecutionMode::Aot] = {"", {"exit", "9", "{module}", "{artifact}"}};
    auto sb2 = sentinel::corpus::materialize_fixture(simple_case(), tmp.path() / "t");
    const auto f = execute(spec, ExecutionMode::Aot, simple_case(), sb2, 10s);
    EXPECT_TRUE(f.precompile_failed);
    EXPECT_EQ(f.exit_code, 9);
}

TEST(Execute, UnreachableOnARealEngine)
{
    if (!python_wasmtime_available())
        GTEST_SKIP() << "python wasmtime package not installed";
    nlohmann::json cfg;
    cfg["runtimes"]["wasmtime"] = {
        {"binary", pywasmtime},
        {"templates", {{"jit", "{preopen:--dir {host}::{guest}} {env:--env {name}={value}} {invoke:--invoke {invoke}} {module} {args}"}}}};
    const auto d = discover_runtimes(parse_runtime_config(cfg.dump()));
    ASSERT_EQ(d.specs.size(), 1u);
    const auto cases = sentinel::corpus::builtin_corpus();
    const auto it = std::find_if(cases.begin(), cases.end(), [](const TestCase& t) { return t.id == "C5.unreachable"; });
    ASSERT_NE(it, cases.end());
    TempDir tmp("c5");
    auto sb = sentinel::corpus::materialize_fixture(*it, tmp.path() / "s");
    const auto r = execute(d.specs[0], ExecutionMode::Jit, *it, sb, 30s);
    ASSERT_TRUE(r.exit_code.has_value());
    EXPECT_NE(*r.exit_code, 0);
    EXPECT_NE(r.stderr_data.find("unreachable"), std::string::npos) << r.stderr_data;
}

TEST(Probes, SimdRejectedByRuntime)
{
    TempDir tmp("probe");
    FeatureProber prober(tmp.path(), 10s);
    const auto rejecting = stub_spec("nosimd");
    EXPECT_FALSE(prober.supported(rejecting, Feature::Simd));
    EXPECT_FALSE(prober.supported(rejecting, Feature::Simd));
    EXPECT_EQ(prober.probes_run(), 1u);  // cached
    auto accepting = stub_spec("print");
    accepting.name = "stub2";
    accepting.templates[ExecutionMode::Jit] = {"print", "ok", "{module}"};
    EXPECT_TRUE(prober.supported(accepting, Feature::Simd));
    EXPECT_TRUE(prober.supported(accepting, Feature::StartSection));

    auto declared = rejecting;
    declared.name = "stub3";
    declared.features[Feature::Simd] = true;
    EXPECT_TRUE(prober.supported(declared, Feature::Simd));
}

TEST(Probes, WasiNeedsAPreopenGroup)
{
    TempDir tmp("probe-wasi");
    FeatureProber prober(tmp.path(), 10s);
    auto spec = stub_spec("print");
    spec.templates[ExecutionMode::Jit] = {"print", "0", "{module}"};
    EXPECT_FALSE(prober.supported(spec, Feature::Wasi));
}

TEST(Probes, WasiOnARealEngine)
{
    if (!python_wasmtime_available())
        GTEST_SKIP() << "python wasmtime package not installed";
    TempDir tmp("probe-real");
    FeatureProber prober(tmp.path(), 30s);
    RuntimeSpec spec;
    spec.name = "pyw";
    spec.binary = pywasmtime;
    spec.modes = {ExecutionMode::Jit};
    spec.templates[ExecutionMode::Jit] = {"{preopen:--dir {host}::{guest}}", "{invoke:--invoke {invoke}}", "{module}",
                                          "{args}"};
    EXPECT_TRUE(prober.supported(spec, Feature::Wasi));
    EXPECT_TRUE(prober.supported(spec, Feature::Simd));
}

TEST(Plan, SkipsUnsupportedPairs)
{
    TempDir tmp("plan");
    FeatureProber prober(tmp.path(), 10s);
    auto simd_case = simple_case();
    simd_case.id = "T.simd";
    simd_case.features = {Feature::Simd};
    auto invoke_case = simple_case();
    invoke_case.id = "T.invoke";
    invoke_case.invoke = sentinel::corpus::Invoke{"_start", {}};
    const std::vector<TestCase> cases = {simd_case, invoke_case};

    auto rejecting = stub_spec("nosimd");
    rejecting.name = "a";
    auto two_modes = stub_spec("print");
    two_modes.name = "b";
    two_modes.modes = {ExecutionMode::Interpreter, ExecutionMode::Jit};
    two_modes.templates[ExecutionMode::Jit] = {"print", "ok", "{invoke:--invoke {invoke}}", "{module}"};
    two_modes.templates[ExecutionMode::Interpreter] = {"print", "ok", "{invoke:--invoke {invoke}}", "{module}"};
    const std::vector<RuntimeSpec> specs = {rejecting, two_modes};

    const auto plan = make_plan(cases, specs, {}, prober);
    ASSERT_EQ(plan.runs.size(), 6u);
    std::map<std::string, std::optional<std::string>> by;
    for (const auto& r : plan.runs)
        by[r.tc->id + "/" + r.runtime->name + "/" + std::string(to_string(r.mode))] = r.skip_reason;
    EXPECT_EQ(by.at("T.simd/a/jit"), "simd not supported");
    EXPECT_FALSE(by.at("T.simd/b/jit"));
    EXPECT_FALSE(by.at("T.simd/b/interpreter"));
    EXPECT_EQ(by.at("T.invoke/a/jit"), "template cannot invoke exports");
    EXPECT_FALSE(by.at("T.invoke/b/jit"));

    const auto jit_only = make_plan(cases, specs, {ExecutionMode::Jit}, prober);
    EXPECT_EQ(jit_only.runs.size(), 4u);
}

TEST(Parallel, RunsEveryIndexAndPropagatesErrors)
{
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 8, [&](size_t i) { hits[i] += 1; });
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
    EXPECT_THROW(parallel_for(10, 4, [](size_t i) {
                     if (i == 5)
                         throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}
