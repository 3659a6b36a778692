// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/report/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#ifndef SENTINEL_DEFAULT_CONFIG
#define SENTINEL_DEFAULT_CONFIG "config/runtimes.json"
#endif

namespace sentinel::report {

namespace fs = std::filesystem;
using adapters::ExecutionMode;
using adapters::RunResult;
using adapters::RuntimeSpec;
using corpus::TestCase;

namespace {

/// Bad flags or unusable inputs; exit status 2.
class UsageError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

constexpr std::string_view synopsis = R"(usage: sentinel <command> [options]

commands:
  list      [--category C]... [--manifest PATH]...
  validate  [--manifest PATH]...
  run       [--runtime NAME]... [--mode M]... [--category C]... [--case ID]...
            [--timeout SECS] [--jobs N] [--config PATH] [--manifest PATH]...
            [--output PATH] [--format markdown|json] [--verbose]
  report    FILE [--format markdown|json] [--output PATH]
  repro     CASE --runtime NAME [--mode M] [--config PATH] [--manifest PATH]...
            [--timeout SECS] [--keep]
  export    DIR [--manifest PATH]...

exit status: 0 no bugs, 1 bugs found, 2 usage, configuration or harness error
)";

std::vector<TestCase> load_cases(const std::vector<std::string>& manifests)
{
    std::vector<TestCase> cases = corpus::builtin_corpus();
    for (const auto& m : manifests)
        cases = corpus::merge_cases(std::move(cases), corpus::load_manifest(m));
    return cases;
}

std::vector<TestCase> filter_cases(std::vector<TestCase> cases, const std::vector<std::string>& categories,
                                   const std::vector<std::string>& ids)
{
    std::set<corpus::Category> cats;
    for (const auto& c : categories)
    {
        const auto cat = corpus::category_from_code(c);
        if (!cat)
            throw UsageError("unknown category \"" + c + "\"");
        cats.insert(*cat);
    }
    for (const auto& id : ids)
        if (std::none_of(cases.begin(), cases.end(), [&](const TestCase& t) { return t.id == id; }))
            throw UsageError("unknown case \"" + id + "\"");
    std::vector<TestCase> out;
    for (auto& tc : cases)
    {
        if (!cats.empty() && !cats.count(tc.category))
            continue;
        if (!ids.empty() && std::find(ids.begin(), ids.end(), tc.id) == ids.end())
            continue;
        out.push_back(std::move(tc));
    }
    return out;
}

std::set<ExecutionMode> parse_modes(const std::vector<std::string>& names)
{
    std::set<ExecutionMode> out;
    for (const auto& n : names)
    {
        const auto m = adapters::mode_from_string(n);
        if (!m)
            throw UsageError("unknown mode \"" + n + "\" (interpreter, jit, aot)");
        out.insert(*m);
    }
    return out;
}

adapters::RuntimeConfig read_config(const std::string& flag)
{
    const fs::path path = flag.empty() ? adapters::config_path(SENTINEL_DEFAULT_CONFIG) : fs::path(flag);
    return adapters::load_runtime_config(path);
}

adapters::Discovery discover(const adapters::RuntimeConfig& cfg, const std::vector<std::string>& names,
                             std::ostream& err)
{
    for (const auto& n : names)
        if (std::none_of(cfg.runtimes.begin(), cfg.runtimes.end(),
                         [&](const adapters::RuntimeEntry& e) { return e.name == n; }))
            throw UsageError("runtime \"" + n + "\" is not configured");
    adapters::RuntimeConfig selected = cfg;
    if (!names.empty())
        std::erase_if(selected.runtimes, [&](const adapters::RuntimeEntry& e) {
            return std::find(names.begin(), names.end(), e.name) == names.end();
        });
    auto d = adapters::discover_runtimes(selected);
    for (const auto& w : d.warnings)
        err << "warning: " << w << "\n";
    return d;
}

fs::path make_workdir(std::string_view tag)
{
    std::string tmpl = (fs::temp_directory_path() / ("sentinel-" + std::string(tag) + "-XXXXXX")).string();
    if (::mkdtemp(tmpl.data()) == nullptr)
        throw corpus::IoError("cannot create a work directory under " + fs::temp_directory_path().string());
    return tmpl;
}

std::chrono::milliseconds timeout_for(const TestCase& tc, std::optional<double> flag,
                                      std::chrono::milliseconds config_default)
{
    if (tc.timeout)
        return *tc.timeout;
    if (flag)
        return std::chrono::milliseconds(static_cast<long long>(*flag * 1000.0));
    return config_default;
}

std::string shell_quote(const std::string& s)
{
    if (!s.empty() && s.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_./:=,+@%") ==
                          std::string::npos)
        return s;
    std::string q = "'";
    for (char c : s)
        q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

std::string command_line(const std::vector<std::string>& argv)
{
    std::string s;
    for (const auto& a : argv)
        s += (s.empty() ? "" : " ") + (a == "&&" ? a : shell_quote(a));
    return s;
}

std::string status_line(const RunResult& r)
{
    std::string s = r.timed_out ? "timed out" : r.signal ? "signal " + std::to_string(*r.signal)
                                                         : "exit " + std::to_string(r.exit_code.value_or(-1));
    if (r.precompile_failed)
        s += " (aot precompile failed)";
    return s + ", " + std::to_string(r.duration.count()) + " ms";
}

void write_output(const std::string& doc, const std::string& path, std::ostream& out, std::ostream& err)
{
    if (path.empty())
    {
        out << doc;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    f << doc;
    if (!f)
        throw corpus::IoError("cannot write " + path);
    err << "report written to " << path << "\n";
}

std::string pick_format(const std::string& format, const std::string& output)
{
    if (!format.empty())
        return format;
    return output.size() >= 5 && output.ends_with(".json") ? "json" : "markdown";
}

// ---- commands ----

int cmd_list(const std::vector<std::string>& categories, const std::vector<std::string>& manifests,
             std::ostream& out)
{
    for (const auto& tc : filter_cases(load_cases(manifests), categories, {}))
    {
        std::vector<std::string> feats, oracles;
        for (const auto f : tc.features)
            feats.emplace_back(corpus::to_string(f));
        for (const auto& o : tc.oracles)
            oracles.emplace_back(corpus::oracle_name(o));
        std::string f, o;
        for (const auto& x : feats)
            f += (f.empty() ? "" : ",") + x;
        for (const auto& x : oracles)
            o += (o.empty() ? "" : ",") + x;
        out << tc.id << "\t" << corpus::to_string(tc.category) << "\t" << (f.empty() ? "-" : f) << "\t" << o << "\n";
    }
    return 0;
}

int cmd_validate(const std::vector<std::string>& manifests, std::ostream& out, std::ostream& err)
{
    const auto cases = load_cases(manifests);
    const auto report = corpus::verify_corpus(cases);
    for (const auto& f : report.failures)
        err << f.case_id << ": " << f.stage << ": " << f.detail << "\n";
    const auto missing = corpus::missing_categories(cases);
    for (const auto c : missing)
        err << "category " << corpus::to_string(c) << " has no case\n";
    out << "checked " << report.checked << " cases: " << report.failures.size() << " failure(s), "
        << missing.size() << " uncovered categor" << (missing.size() == 1 ? "y" : "ies") << "\n";
    return report.ok() && missing.empty() ? 0 : 1;
}

struct RunOptions {
    std::vector<std::string> runtimes, modes, categories, cases, manifests;
    std::optional<double> timeout;
    unsigned jobs = 1;
    std::string config, output, format;
    bool verbose = false;
};

struct RunSlot {
    std::vector<RunResult> results;
    oracle::Verdict single;
    std::string harness_error;
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    const auto cases = filter_cases(load_cases(opt.manifests), opt.categories, opt.cases);
    const auto modes = parse_modes(opt.modes);
    const auto cfg = read_config(opt.config);
    auto discovery = discover(cfg, opt.runtimes, err);
    if (discovery.specs.empty())
    {
        err << "error: no runtimes discovered\n";
        return 2;
    }
    const auto& specs = discovery.specs;

    const fs::path work = make_workdir("run");
    struct WorkCleanup {
        fs::path p;
        ~WorkCleanup()
        {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } cleanup{work};

    adapters::FeatureProber prober(work / "probes", cfg.timeout);
    const auto plan = adapters::make_plan(cases, specs, modes, prober);

    std::vector<RunSlot> slots(plan.runs.size());
    std::mutex log_mu;
    adapters::parallel_for(plan.runs.size(), opt.jobs, [&](size_t i) {
        const auto& run = plan.runs[i];
        RunSlot& slot = slots[i];
        if (run.skip_reason)
        {
            slot.single = oracle::Verdict::skip(*run.skip_reason);
            return;
        }
        const TestCase& tc = *run.tc;
        try
        {
            auto rr = adapters::execute_repeats(*run.runtime, run.mode, tc, work / ("r" + std::to_string(i)),
                                                timeout_for(tc, opt.timeout, cfg.timeout));
            slot.results = std::move(rr.results);
            slot.single = oracle::judge_single(slot.results, tc, rr.last, run.runtime->value_pattern);
        }
        catch (const std::exception& e)
        {
            slot.harness_error = tc.id + " on " + run.runtime->name + ": " + e.what();
        }
        if (opt.verbose)
        {
            std::lock_guard lock(log_mu);
            err << tc.id << " " << run.runtime->name << "/" << adapters::to_string(run.mode) << ": "
                << (slot.harness_error.empty() ? std::string(oracle::to_string(slot.single.kind)) : "error") << "\n";
        }
    });

    // Cross-runtime vote, per case.
    std::vector<VerdictRecord> records;
    std::vector<std::string> harness_errors;
    for (const auto& tc : cases)
    {
        std::vector<size_t> idx;
        for (size_t i = 0; i < plan.runs.size(); ++i)
            if (plan.runs[i].tc == &tc)
                idx.push_back(i);
        std::map<std::string, oracle::Verdict> diff;
        if (tc.find_oracle<corpus::oracle_kind::Differential>() != nullptr)
        {
            std::map<std::string, RunResult> firsts;
            for (const auto i : idx)
                if (!plan.runs[i].skip_reason && slots[i].harness_error.empty() && !slots[i].results.empty())
                    firsts.emplace(plan.runs[i].runtime->name + ":" + std::string(adapters::to_string(plan.runs[i].mode)),
                                   slots[i].results.front());
            if (firsts.size() >= 2)
                diff = oracle::judge_differential(firsts, tc);
        }
        for (const auto i : idx)
        {
            const auto& run = plan.runs[i];
            if (!slots[i].harness_error.empty())
            {
                harness_errors.push_back(slots[i].harness_error);
                continue;
            }
            const std::string key = run.runtime->name + ":" + std::string(adapters::to_string(run.mode));
            std::optional<oracle::Verdict> d;
            if (const auto it = diff.find(key); it != diff.end())
                d = it->second;
            records.push_back({tc.id, tc.category, run.runtime->name, std::string(adapters::to_string(run.mode)),
                               oracle::combine(slots[i].single, d, tc)});
        }
    }

    Metadata meta;
    meta.os = host_os();
    meta.timestamp = utc_timestamp();
    std::set<ExecutionMode> used;
    for (const auto& s : specs)
        for (const auto m : s.modes)
            if (modes.empty() || modes.count(m))
                used.insert(m);
    for (const auto m : used)
        meta.modes.emplace_back(adapters::to_string(m));
    for (const auto& s : specs)
        meta.runtimes.push_back({s.name, s.version});
    const ReportMatrix matrix = aggregate(records, meta);

    const std::string format = pick_format(opt.format, opt.output);
    write_output(format == "json" ? render_json(matrix) : render_markdown(matrix), opt.output, out, err);

    for (const auto& e : harness_errors)
        err << "error: " << e << "\n";
    if (!harness_errors.empty())
        return 2;
    return exit_status(matrix);
}

int cmd_report(const std::string& file, const std::string& format, const std::string& output, std::ostream& out,
               std::ostream& err)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw UsageError("cannot read " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    const ReportMatrix m = matrix_from_json(ss.str());
    const std::string f = pick_format(format, output);
    write_output(f == "json" ? render_json(m) : render_markdown(m), output, out, err);
    return exit_status(m);
}

struct ReproOptions {
    std::string case_id, runtime, mode, config;
    std::vector<std::string> manifests;
    std::optional<double> timeout;
    bool keep = false;
};

int cmd_repro(const ReproOptions& opt, std::ostream& out, std::ostream& err)
{
    const auto cases = filter_cases(load_cases(opt.manifests), {}, {opt.case_id});
    const TestCase& tc = cases.front();
    const auto cfg = read_config(opt.config);
    auto discovery = discover(cfg, {opt.runtime}, err);
    if (discovery.specs.empty())
    {
        err << "error: runtime \"" << opt.runtime << "\" not discovered\n";
        return 2;
    }
    const RuntimeSpec& spec = discovery.specs.front();
    ExecutionMode mode = *spec.modes.begin();
    if (!opt.mode.empty())
    {
        mode = *parse_modes({opt.mode}).begin();
        if (!spec.modes.count(mode))
            throw UsageError(spec.name + " has no " + opt.mode + " mode");
    }

    const fs::path work = make_workdir("repro");
    out << "case: " << tc.id << " [" << corpus::to_string(tc.category) << "] "
        << corpus::info(tc.category).name << "\n";
    out << "runtime: " << spec.name << " " << spec.version << " (" << adapters::to_string(mode) << ")\n";
    if (!tc.note.empty())
        out << "note: " << tc.note << "\n";

    std::vector<RunResult> results;
    corpus::SandboxHandle last;
    const auto timeout = timeout_for(tc, opt.timeout, cfg.timeout);
    for (unsigned rep = 0; rep < std::max(1u, tc.repeats); ++rep)
    {
        last = corpus::materialize_fixture(tc, work / ("r" + std::to_string(rep)));
        if (rep == 0)
        {
            out << "sandbox: " << last.root().string() << "\n";
            out << "command: " << command_line(adapters::describe_command(spec, mode, tc, last)) << "\n";
            if (tc.fixture.stdin_data)
                out << "stdin: " << tc.fixture.stdin_data->size() << " bytes\n";
        }
        results.push_back(adapters::execute(spec, mode, tc, last, timeout));
        const RunResult& r = results.back();
        out << "--- run " << rep + 1 << ": " << status_line(r) << "\n";
        if (!r.stdout_data.empty())
            out << "stdout:\n" << r.stdout_data << (r.stdout_data.ends_with('\n') ? "" : "\n");
        if (!r.stderr_data.empty())
            out << "stderr:\n" << r.stderr_data << (r.stderr_data.ends_with('\n') ? "" : "\n");
    }
    const oracle::Verdict v = oracle::judge_single(results, tc, last, spec.value_pattern);
    out << "verdict: " << oracle::to_string(v.kind) << (v.rule.empty() ? "" : " (" + v.rule + ")")
        << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    if (v.is_bug())
        out << "fix hints: " << fix_hint(tc.category).strategies.front() << "\n";

    if (opt.keep)
    {
        // Leave the module next to the sandbox so the printed command can be replayed.
        const fs::path bin = last.root().string() + ".bin";
        fs::create_directories(bin);
        const auto bytes = tc.module_bytes();
        std::ofstream(bin / "module.wasm", std::ios::binary)
            .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out << "kept: " << work.string() << "\n";
        last.release();
    }
    else
    {
        last.cleanup();
        std::error_code ec;
        fs::remove_all(work, ec);
    }
    return v.is_bug() ? 1 : 0;
}

int cmd_export(const std::string& dir, const std::vector<std::string>& manifests, std::ostream& out)
{
    const auto cases = load_cases(manifests);
    const auto write = [](const fs::path& p, const auto& bytes) {
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f)
            throw corpus::IoError("cannot write " + p.string());
    };
    for (const auto& tc : cases)
    {
        const fs::path root = fs::path(dir) / tc.id;
        if (!tc.wat.empty())
            write(root / "module.wat", tc.wat);
        write(root / "module.wasm", tc.module_bytes());
        // generated trees (empty files) are recreated from the case itself
        for (const auto& e : tc.fixture.tree)
            if (e.content && !e.content->empty())
                write(root / "files" / corpus::checked_relative(e.path), *e.content);
    }
    out << "exported " << cases.size() << " cases to " << dir << "\n";
    return 0;
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"sentinel: differential bug detection for WebAssembly runtimes", "sentinel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(harness_version));

    std::vector<std::string> categories, manifests;

    auto* list = app.add_subcommand("list", "List corpus cases");
    list->add_option("--category", categories, "Only these categories (e.g. B.1)");
    list->add_option("--manifest", manifests, "Extra manifest files");

    auto* validate = app.add_subcommand("validate", "Self-check the corpus without runtimes");
    validate->add_option("--manifest", manifests, "Extra manifest files");

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Run the corpus against installed runtimes");
    run->add_option("--runtime", ro.runtimes, "Runtime names from the config");
    run->add_option("--mode", ro.modes, "interpreter, jit or aot");
    run->add_option("--category", ro.categories, "Only these categories");
    run->add_option("--case", ro.cases, "Only these case ids");
    run->add_option("--timeout", ro.timeout, "Seconds per execution")->check(CLI::PositiveNumber);
    run->add_option("--jobs", ro.jobs, "Parallel executions")->check(CLI::Range(1u, 1024u));
    run->add_option("--config", ro.config, "runtimes.json (default: $SENTINEL_RUNTIMES or the shipped one)");
    run->add_option("--manifest", ro.manifests, "Extra manifest files");
    run->add_option("--output", ro.output, "Write the report here");
    run->add_option("--format", ro.format, "markdown or json")->check(CLI::IsMember({"markdown", "json"}));
    run->add_flag("--verbose,-v", ro.verbose, "One line per execution on stderr");

    std::string report_file, report_format, report_output;
    auto* rep = app.add_subcommand("report", "Re-render a saved json report");
    rep->add_option("file", report_file, "report.json")->required();
    rep->add_option("--format", report_format, "markdown or json")->check(CLI::IsMember({"markdown", "json"}));
    rep->add_option("--output", report_output, "Write here instead of stdout");

    ReproOptions po;
    auto* repro = app.add_subcommand("repro", "Replay one case on one runtime, verbosely");
    repro->add_option("case", po.case_id, "Case id")->required();
    repro->add_option("--runtime", po.runtime, "Runtime name")->required();
    repro->add_option("--mode", po.mode, "interpreter, jit or aot");
    repro->add_option("--config", po.config, "runtimes.json");
    repro->add_option("--manifest", po.manifests, "Extra manifest files");
    repro->add_option("--timeout", po.timeout, "Seconds per execution")->check(CLI::PositiveNumber);
    repro->add_flag("--keep", po.keep, "Keep the sandbox and module on disk");

    std::string export_dir;
    auto* exp = app.add_subcommand("export", "Write each case's module and fixture files under DIR/<case-id>/");
    exp->add_option("dir", export_dir, "Target directory")->required();
    exp->add_option("--manifest", manifests, "Extra manifest files");

    try
    {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    }
    catch (const CLI::CallForHelp&)
    {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return 0;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    }
    catch (const CLI::CallForVersion&)
    {
        out << "sentinel " << harness_version << "\n";
        return 0;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << "\n\n" << synopsis;
        return 2;
    }

    try
    {
        if (list->parsed())
            return cmd_list(categories, manifests, out);
        if (validate->parsed())
            return cmd_validate(manifests, out, err);
        if (run->parsed())
            return cmd_run(ro, out, err);
        if (rep->parsed())
            return cmd_report(report_file, report_format, report_output, out, err);
        if (repro->parsed())
            return cmd_repro(po, out, err);
        if (exp->parsed())
            return cmd_export(export_dir, manifests, out);
    }
    catch (const UsageError& e)
    {
        err << "error: " << e.what() << "\n\n" << synopsis;
        return 2;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << synopsis;
    return 2;
}

}  // namespace sentinel::report
