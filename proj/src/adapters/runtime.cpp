// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/adapters/runtime.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace sentinel::adapters {

namespace fs = std::filesystem;
using json = nlohmann::json;
using corpus::Feature;

std::string_view to_string(ExecutionMode m) noexcept
{
    switch (m)
    {
    case ExecutionMode::Interpreter:
        return "interpreter";
    case ExecutionMode::Jit:
        return "jit";
    case ExecutionMode::Aot:
        return "aot";
    }
    return "?";
}

std::optional<ExecutionMode> mode_from_string(std::string_view s) noexcept
{
    std::string low;
    for (char c : s)
        low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "interpreter" || low == "interp")
        return ExecutionMode::Interpreter;
    if (low == "jit")
        return ExecutionMode::Jit;
    if (low == "aot")
        return ExecutionMode::Aot;
    return std::nullopt;
}

namespace {

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// "{name:FMT}" covering the whole token.
struct Group {
    std::string name;
    std::string fmt;
};

std::optional<Group> as_group(const std::string& token)
{
    if (token.size() < 3 || token.front() != '{')
        return std::nullopt;
    size_t i = 1;
    while (i < token.size() && ident_char(token[i]))
        ++i;
    if (i == 1 || i >= token.size() || token[i] != ':')
        return std::nullopt;
    int depth = 0;
    for (size_t k = 0; k < token.size(); ++k)
    {
        if (token[k] == '{')
            ++depth;
        else if (token[k] == '}' && --depth == 0 && k + 1 != token.size())
            throw ConfigError("malformed group \"" + token + "\": trailing text after closing brace");
    }
    if (depth != 0 || token.back() != '}')
        throw ConfigError("malformed group \"" + token + "\": unbalanced braces");
    return Group{token.substr(1, i - 1), token.substr(i + 1, token.size() - i - 2)};
}

// Plain placeholders in a token, in order of appearance.
std::vector<std::string> placeholders(const std::string& token)
{
    std::vector<std::string> out;
    size_t pos = 0;
    while ((pos = token.find_first_of("{}", pos)) != std::string::npos)
    {
        if (token[pos] == '}')
            throw ConfigError("unbalanced brace in \"" + token + "\"");
        const auto close = token.find_first_of("{}", pos + 1);
        if (close == std::string::npos || token[close] != '}')
            throw ConfigError("unbalanced brace in \"" + token + "\"");
        out.push_back(token.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }
    return out;
}

std::vector<std::string> split_spaces(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

std::string substitute(std::string token, const std::vector<std::pair<std::string, std::string>>& vars)
{
    for (const auto& [name, value] : vars)
    {
        const std::string key = "{" + name + "}";
        size_t pos = 0;
        while ((pos = token.find(key, pos)) != std::string::npos)
        {
            token.replace(pos, key.size(), value);
            pos += value.size();
        }
    }
    return token;
}

const std::vector<std::string>& group_vars(const std::string& group)
{
    static const std::vector<std::string> preopen{"host", "guest"};
    static const std::vector<std::string> env{"name", "value"};
    static const std::vector<std::string> invoke{"invoke"};
    static const std::vector<std::string> none;
    if (group == "preopen")
        return preopen;
    if (group == "env")
        return env;
    if (group == "invoke")
        return invoke;
    return none;
}

// Splits on spaces outside braces.
CommandTemplate tokenize(const std::string& text)
{
    CommandTemplate out;
    std::string cur;
    int depth = 0;
    for (char c : text)
    {
        if (c == '{')
            ++depth;
        else if (c == '}')
            --depth;
        if (std::isspace(static_cast<unsigned char>(c)) && depth == 0)
        {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

CommandTemplate template_from_json(const json& j, const std::string& where)
{
    if (j.is_string())
        return tokenize(j.get<std::string>());
    if (j.is_array())
    {
        CommandTemplate t;
        for (const auto& tok : j)
        {
            if (!tok.is_string())
                throw ConfigError(where + ": template tokens must be strings");
            t.push_back(tok.get<std::string>());
        }
        return t;
    }
    throw ConfigError(where + ": template must be a string or an array of strings");
}

}  // namespace

void check_template(const CommandTemplate& t, bool allow_artifact)
{
    for (const auto& token : t)
    {
        if (const auto g = as_group(token))
        {
            const auto& allowed = group_vars(g->name);
            if (allowed.empty())
                throw ConfigError("unknown placeholder group {" + g->name + ":...} in \"" + token + "\"");
            if (split_spaces(g->fmt).empty())
                throw ConfigError("empty group format in \"" + token + "\"");
            for (const auto& p : placeholders(g->fmt))
                if (std::find(allowed.begin(), allowed.end(), p) == allowed.end())
                    throw ConfigError("unknown placeholder {" + p + "} in \"" + token + "\"");
            continue;
        }
        for (const auto& p : placeholders(token))
        {
            if (p == "module" || p == "invoke")
                continue;
            if (p == "artifact" && allow_artifact)
                continue;
            if (p == "args")
            {
                if (token != "{args}")
                    throw ConfigError("{args} must be a whole token, got \"" + token + "\"");
                continue;
            }
            throw ConfigError("unknown placeholder {" + p + "} in \"" + token + "\"");
        }
    }
}

bool template_has_group(const CommandTemplate& t, std::string_view group)
{
    for (const auto& token : t)
        if (const auto g = as_group(token); g && g->name == group)
            return true;
    return false;
}

bool template_mentions(const CommandTemplate& t, std::string_view placeholder)
{
    const std::string plain = "{" + std::string(placeholder) + "}";
    const std::string group = "{" + std::string(placeholder) + ":";
    for (const auto& token : t)
        if (token.find(plain) != std::string::npos || token.rfind(group, 0) == 0)
            return true;
    return false;
}

std::vector<std::string> expand_template(const CommandTemplate& t, const TemplateContext& ctx)
{
    std::vector<std::string> out;
    const auto add_fmt = [&](const std::string& fmt, const std::vector<std::pair<std::string, std::string>>& vars) {
        for (const auto& part : split_spaces(fmt))
            out.push_back(substitute(part, vars));
    };
    for (const auto& token : t)
    {
        if (const auto g = as_group(token))
        {
            if (g->name == "preopen")
                for (const auto& [host, guest] : ctx.preopens)
                    add_fmt(g->fmt, {{"host", host}, {"guest", guest}});
            else if (g->name == "env")
                for (const auto& [name, value] : ctx.env)
                    add_fmt(g->fmt, {{"name", name}, {"value", value}});
            else if (g->name == "invoke" && ctx.invoke)
                add_fmt(g->fmt, {{"invoke", *ctx.invoke}});
            continue;
        }
        if (token == "{args}")
        {
            out.insert(out.end(), ctx.args.begin(), ctx.args.end());
            continue;
        }
        if (token.find("{invoke}") != std::string::npos && !ctx.invoke)
            continue;
        out.push_back(substitute(token, {{"module", ctx.module},
                                         {"artifact", ctx.artifact},
                                         {"invoke", ctx.invoke.value_or("")}}));
    }
    return out;
}

RuntimeConfig parse_runtime_config(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("runtimes config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("runtimes") || !doc["runtimes"].is_object())
        throw ConfigError("runtimes config needs a \"runtimes\" object");

    RuntimeConfig cfg;
    if (doc.contains("timeout_ms"))
    {
        if (!doc["timeout_ms"].is_number_unsigned() || doc["timeout_ms"].get<long long>() <= 0)
            throw ConfigError("timeout_ms must be a positive integer");
        cfg.timeout = std::chrono::milliseconds(doc["timeout_ms"].get<long long>());
    }

    for (const auto& [name, r] : doc["runtimes"].items())
    {
        const std::string where = "runtimes." + name;
        if (!r.is_object())
            throw ConfigError(where + " must be an object");
        RuntimeEntry e;
        e.name = name;
        if (!r.contains("binary") || !r["binary"].is_string() || r["binary"].get<std::string>().empty())
            throw ConfigError(where + ".binary is required");
        e.binary = r["binary"].get<std::string>();
        if (r.contains("version_args"))
            e.version_args = r["version_args"].get<std::vector<std::string>>();
        if (!r.contains("templates") || !r["templates"].is_object() || r["templates"].empty())
            throw ConfigError(where + ".templates must map at least one mode to a command template");
        for (const auto& [mode_name, tj] : r["templates"].items())
        {
            const auto mode = mode_from_string(mode_name);
            if (!mode)
                throw ConfigError(where + ".templates: unknown mode \"" + mode_name + "\"");
            e.templates[*mode] = template_from_json(tj, where + ".templates." + mode_name);
        }
        if (r.contains("modes"))
        {
            // Optional subset of the templated modes.
            std::map<ExecutionMode, CommandTemplate> kept;
            for (const auto& m : r["modes"])
            {
                const auto mode = m.is_string() ? mode_from_string(m.get<std::string>()) : std::nullopt;
                if (!mode)
                    throw ConfigError(where + ".modes: unknown mode " + m.dump());
                if (!e.templates.count(*mode))
                    throw ConfigError(where + ".modes: mode \"" + std::string(to_string(*mode)) + "\" has no template");
                kept[*mode] = e.templates[*mode];
            }
            e.templates = std::move(kept);
        }
        if (r.contains("aot_precompile"))
        {
            const auto& p = r["aot_precompile"];
            if (!p.is_object() || !p.contains("args"))
                throw ConfigError(where + ".aot_precompile needs \"args\"");
            PrecompileStep step;
            step.binary = p.value("binary", "");
            step.args = template_from_json(p["args"], where + ".aot_precompile.args");
            check_template(step.args, true);
            if (!template_mentions(step.args, "artifact"))
                throw ConfigError(where + ".aot_precompile.args must write {artifact}");
            e.precompile[ExecutionMode::Aot] = std::move(step);
        }
        for (const auto& [mode, t] : e.templates)
        {
            check_template(t, e.precompile.count(mode) != 0);
            if (mode == ExecutionMode::Aot && !e.precompile.count(mode) && template_mentions(t, "artifact"))
                throw ConfigError(where + ": aot template uses {artifact} without aot_precompile");
        }
        if (e.precompile.count(ExecutionMode::Aot) && !e.templates.count(ExecutionMode::Aot))
            throw ConfigError(where + ": aot_precompile given but no aot template");
        if (r.contains("features"))
            for (const auto& [fname, fv] : r["features"].items())
            {
                const auto f = corpus::feature_from_string(fname);
                if (!f || !fv.is_boolean())
                    throw ConfigError(where + ".features: bad entry \"" + fname + "\"");
                e.features[*f] = fv.get<bool>();
            }
        if (r.contains("result_regex"))
        {
            e.value_pattern = r["result_regex"].get<std::string>();
            try
            {
                std::regex probe(e.value_pattern);
                if (probe.mark_count() < 1)
                    throw ConfigError(where + ".result_regex needs one capture group");
            }
            catch (const std::regex_error& ex)
            {
                throw ConfigError(where + ".result_regex: " + ex.what());
            }
        }
        cfg.runtimes.push_back(std::move(e));
    }
    // Familiar runtimes first, in matrix column order.
    static const std::vector<std::string> order{"wasmer", "wasmtime", "wamr", "wasm3", "wasmedge"};
    const auto rank = [](const std::string& n) {
        return std::find(order.begin(), order.end(), n) - order.begin();
    };
    std::stable_sort(cfg.runtimes.begin(), cfg.runtimes.end(),
                     [&](const RuntimeEntry& a, const RuntimeEntry& b) { return rank(a.name) < rank(b.name); });
    return cfg;
}

RuntimeConfig load_runtime_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read runtimes config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_runtime_config(ss.str());
}

fs::path config_path(const fs::path& fallback)
{
    if (const char* env = std::getenv("SENTINEL_RUNTIMES"); env != nullptr && *env != '\0')
        return env;
    return fallback;
}

std::string parse_version(const std::string& probe_output)
{
    static const std::regex semver(R"((\d+\.\d+\.\d+(?:-[0-9A-Za-z.\-]+)?))");
    static const std::regex date(R"((\d{2}-\d{2}-\d{4}|\d{4}-\d{2}-\d{2}))");
    std::smatch m;
    if (std::regex_search(probe_output, m, semver))
        return m[1];
    if (std::regex_search(probe_output, m, date))
        return m[1];
    std::string line = probe_output.substr(0, probe_output.find('\n'));
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
        line.pop_back();
    return line.empty() ? "unknown" : line;
}

Discovery discover_runtimes(const RuntimeConfig& config)
{
    Discovery d;
    for (const auto& e : config.runtimes)
    {
        for (const auto& [mode, t] : e.templates)
            check_template(t, e.precompile.count(mode) != 0);

        const fs::path bin = find_executable(e.binary);
        if (bin.empty())
        {
            d.warnings.push_back(e.name + ": binary \"" + e.binary + "\" not found");
            continue;
        }
        ProcessRequest req;
        req.argv.push_back(bin.string());
        req.argv.insert(req.argv.end(), e.version_args.begin(), e.version_args.end());
        req.timeout = std::chrono::milliseconds(5000);
        ProcessOutcome out;
        try
        {
            out = run_process(req);
        }
        catch (const SpawnError& ex)
        {
            d.warnings.push_back(e.name + ": " + ex.what());
            continue;
        }
        const std::string text = out.out + out.err;
        if (out.exit_code != 0 || text.find_first_not_of(" \t\r\n") == std::string::npos)
        {
            d.warnings.push_back(e.name + ": version probe failed for " + bin.string());
            continue;
        }
        RuntimeSpec s;
        s.name = e.name;
        s.binary = bin;
        s.version = parse_version(text);
        for (const auto& [mode, t] : e.templates)
            s.modes.insert(mode);
        s.templates = e.templates;
        s.precompile = e.precompile;
        s.features = e.features;
        s.value_pattern = e.value_pattern;
        d.specs.push_back(std::move(s));
    }
    return d;
}

namespace {

RunResult from_outcome(ProcessOutcome&& o, std::vector<std::string> argv)
{
    RunResult r;
    r.stdout_data = std::move(o.out);
    r.stderr_data = std::move(o.err);
    r.exit_code = o.exit_code;
    r.signal = o.signal;
    r.timed_out = o.timed_out;
    r.duration = o.duration;
    r.peak_memory = o.peak_memory;
    r.command = std::move(argv);
    return r;
}

struct BinDir {
    fs::path path;
    ~BinDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path bin_dir_for(const corpus::SandboxHandle& sandbox)
{
    if (sandbox.root().empty())
        throw corpus::IoError("sandbox is not materialized");
    return fs::path(sandbox.root().string() + ".bin");
}

TemplateContext context_for(const fs::path& bin, const std::optional<corpus::Invoke>& invoke,
                            const corpus::FixtureSpec& fixture, const corpus::SandboxHandle& sandbox)
{
    TemplateContext ctx;
    ctx.module = (bin / "module.wasm").string();
    ctx.artifact = (bin / "module.aot").string();
    if (invoke)
    {
        ctx.invoke = invoke->export_name;
        for (const auto& a : invoke->args)
            ctx.args.push_back(corpus::cli_argument(a));
    }
    for (const auto& p : sandbox.preopens())
        ctx.preopens.emplace_back(p.host.string(), p.guest);
    ctx.env = fixture.env;
    return ctx;
}

const CommandTemplate& template_for(const RuntimeSpec& spec, ExecutionMode mode)
{
    const auto it = spec.templates.find(mode);
    if (it == spec.templates.end() || !spec.modes.count(mode))
        throw ConfigError(spec.name + " has no " + std::string(to_string(mode)) + " mode");
    return it->second;
}

}  // namespace

RunResult execute_bytes(const RuntimeSpec& spec, ExecutionMode mode, const wat::Bytes& module,
                        const std::optional<corpus::Invoke>& invoke, const corpus::FixtureSpec& fixture,
                        const corpus::SandboxHandle& sandbox, std::chrono::milliseconds timeout)
{
    const CommandTemplate& tmpl = template_for(spec, mode);
    BinDir bin{bin_dir_for(sandbox)};
    fs::create_directories(bin.path);
    const TemplateContext ctx = context_for(bin.path, invoke, fixture, sandbox);
    {
        std::ofstream out(ctx.module, std::ios::binary);
        out.write(reinterpret_cast<const char*>(module.data()), static_cast<std::streamsize>(module.size()));
        if (!out)
            throw corpus::IoError("cannot write " + ctx.module);
    }

    if (const auto pc = spec.precompile.find(mode); pc != spec.precompile.end())
    {
        ProcessRequest req;
        req.argv.push_back(pc->second.binary.empty() ? spec.binary.string()
                                                     : [&] {
                                                           const auto p = find_executable(pc->second.binary);
                                                           if (p.empty())
                                                               throw SpawnError("precompiler \"" + pc->second.binary +
                                                                                "\" not found");
                                                           return p.string();
                                                       }());
        const auto args = expand_template(pc->second.args, ctx);
        req.argv.insert(req.argv.end(), args.begin(), args.end());
        req.cwd = sandbox.root();
        req.timeout = timeout;
        auto argv = req.argv;
        ProcessOutcome o = run_process(req);
        if (o.timed_out || o.signal || !o.exit_code || *o.exit_code != 0 || !fs::exists(ctx.artifact))
        {
            RunResult r = from_outcome(std::move(o), std::move(argv));
            r.precompile_failed = true;
            return r;
        }
    }

    ProcessRequest req;
    req.argv.push_back(spec.binary.string());
    const auto args = expand_template(tmpl, ctx);
    req.argv.insert(req.argv.end(), args.begin(), args.end());
    req.cwd = sandbox.root();
    req.stdin_data = fixture.stdin_data;
    req.timeout = timeout;
    auto argv = req.argv;
    return from_outcome(run_process(req), std::move(argv));
}

RunResult execute(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                  const corpus::SandboxHandle& sandbox, std::chrono::milliseconds timeout)
{
    return execute_bytes(spec, mode, tc.module_bytes(), tc.invoke, tc.fixture, sandbox, timeout);
}

RepeatedRun execute_repeats(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                            const fs::path& stem, std::chrono::milliseconds timeout)
{
    RepeatedRun out;
    const auto bytes = tc.module_bytes();
    const unsigned n = std::max(1u, tc.repeats);
    for (unsigned rep = 0; rep < n; ++rep)
    {
        out.last = corpus::materialize_fixture(tc, stem.string() + "-" + std::to_string(rep));
        out.results.push_back(execute_bytes(spec, mode, bytes, tc.invoke, tc.fixture, out.last, timeout));
    }
    return out;
}

std::vector<std::string> describe_command(const RuntimeSpec& spec, ExecutionMode mode, const corpus::TestCase& tc,
                                          const corpus::SandboxHandle& sandbox)
{
    const fs::path bin = bin_dir_for(sandbox);
    const TemplateContext ctx = context_for(bin, tc.invoke, tc.fixture, sandbox);
    std::vector<std::string> argv;
    if (const auto pc = spec.precompile.find(mode); pc != spec.precompile.end())
    {
        argv.push_back(pc->second.binary.empty() ? spec.binary.string() : pc->second.binary);
        const auto a = expand_template(pc->second.args, ctx);
        argv.insert(argv.end(), a.begin(), a.end());
        argv.push_back("&&");
    }
    argv.push_back(spec.binary.string());
    const auto a = expand_template(template_for(spec, mode), ctx);
    argv.insert(argv.end(), a.begin(), a.end());
    return argv;
}

// ---- feature probes ----

namespace {

constexpr std::string_view simd_probe = R"((module
  (func (export "_start")
    i32.const 7 i32x4.splat i32x4.extract_lane 2 drop))
)";

constexpr std::string_view start_probe = R"((module
  (func $init)
  (start $init)
  (func (export "_start")))
)";

constexpr std::string_view wasi_probe = R"((module
  (import "wasi_snapshot_preview1" "fd_prestat_get" (func $prestat (param i32 i32) (result i32)))
  (import "wasi_snapshot_preview1" "proc_exit" (func $exit (param i32)))
  (memory 1)
  (export "memory" (memory 0))
  (func (export "_start")
    i32.const 3 i32.const 64 call $prestat call $exit))
)";

std::optional<ExecutionMode> probe_mode(const RuntimeSpec& spec)
{
    for (auto m : {ExecutionMode::Jit, ExecutionMode::Interpreter, ExecutionMode::Aot})
        if (spec.modes.count(m))
            return m;
    return std::nullopt;
}

}  // namespace

FeatureProber::FeatureProber(fs::path scratch, std::chrono::milliseconds timeout)
  : scratch_{scratch.empty() ? fs::temp_directory_path() / ("sentinel-probe-" + std::to_string(::getpid()))
                             : std::move(scratch)},
    timeout_{timeout}
{}

bool FeatureProber::supported(const RuntimeSpec& spec, Feature flag)
{
    const auto key = std::make_pair(spec.name, flag);
    {
        std::lock_guard lock(mu_);
        if (const auto it = cache_.find(key); it != cache_.end())
            return it->second;
    }
    bool ok = false;
    if (const auto it = spec.features.find(flag); it != spec.features.end())
        ok = it->second;
    else
        ok = probe(spec, flag);
    std::lock_guard lock(mu_);
    cache_.emplace(key, ok);
    return cache_.at(key);
}

size_t FeatureProber::probes_run() const
{
    std::lock_guard lock(mu_);
    return probes_;
}

bool FeatureProber::probe(const RuntimeSpec& spec, Feature flag)
{
    const auto mode = probe_mode(spec);
    if (!mode)
        return false;
    if (flag == Feature::Wasi && !template_has_group(spec.templates.at(*mode), "preopen"))
        return false;

    corpus::TestCase tc;
    tc.id = "probe." + std::string(corpus::to_string(flag));
    switch (flag)
    {
    case Feature::Simd:
        tc.wat = simd_probe;
        break;
    case Feature::StartSection:
        tc.wat = start_probe;
        break;
    case Feature::Wasi:
        tc.wat = wasi_probe;
        tc.fixture.tree.push_back({"probe/x.txt", "x"});
        tc.fixture.preopens.push_back({"probe", "/probe"});
        break;
    }

    static std::atomic<unsigned> serial{0};
    {
        std::lock_guard lock(mu_);
        ++probes_;
    }
    const fs::path root = scratch_ / (spec.name + "-" + std::string(corpus::to_string(flag)) + "-" +
                                      std::to_string(serial.fetch_add(1)));
    try
    {
        auto sandbox = corpus::materialize_fixture(tc, root);
        const RunResult r = execute(spec, *mode, tc, sandbox, timeout_);
        return r.exited_cleanly() && !r.precompile_failed;
    }
    catch (const std::exception&)
    {
        return false;
    }
}

ExecutionPlan make_plan(const std::vector<corpus::TestCase>& cases, const std::vector<RuntimeSpec>& runtimes,
                        const std::set<ExecutionMode>& modes, FeatureProber& prober)
{
    ExecutionPlan plan;
    for (const auto& tc : cases)
        for (const auto& rt : runtimes)
            for (const auto mode : rt.modes)
            {
                if (!modes.empty() && !modes.count(mode))
                    continue;
                PlannedRun run{&tc, &rt, mode, std::nullopt};
                const auto& t = rt.templates.at(mode);
                for (const auto f : tc.features)
                    if (!run.skip_reason && !prober.supported(rt, f))
                        run.skip_reason = std::string(corpus::to_string(f)) + " not supported";
                if (!run.skip_reason && tc.invoke && !template_mentions(t, "invoke"))
                    run.skip_reason = "template cannot invoke exports";
                if (!run.skip_reason && !tc.fixture.preopens.empty() && !template_has_group(t, "preopen"))
                    run.skip_reason = "template cannot map directories";
                if (!run.skip_reason && !tc.fixture.env.empty() && !template_has_group(t, "env"))
                    run.skip_reason = "template cannot pass environment";
                plan.runs.push_back(run);
            }
    return plan;
}

void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn)
{
    const size_t workers = std::max<size_t>(1, std::min<size_t>(jobs == 0 ? 1 : jobs, n));
    if (n == 0)
        return;
    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    const auto work = [&] {
        while (true)
        {
            const size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(err_mu);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

}  // namespace sentinel::adapters
