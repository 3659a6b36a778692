// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// gating criterion fails; the pinned-runtime integration check only reports.

#include "module_gen.hpp"
#include "temp_dir.hpp"

#include "sentinel/adapters/process.hpp"
#include "sentinel/adapters/runtime.hpp"
#include "sentinel/corpus/corpus.hpp"
#include "sentinel/eval/evaluator.hpp"
#include "sentinel/oracle/oracle.hpp"
#include "sentinel/report/report.hpp"
#include "sentinel/wat/leb128.hpp"
#include "sentinel/wat/wat.hpp"

#include <json.hpp>

#include <bit>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace sentinel;
using Clock = std::chrono::steady_clock;
using adapters::RunResult;
using eval::Value;
using oracle::VerdictKind;

namespace {

struct Failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Failed(what);
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_s(double s)
{
    std::ostringstream o;
    o.precision(2);
    o << std::fixed << s << "s";
    return o.str();
}

// --- 1 -----------------------------------------------------------------------

std::string corpus_coverage()
{
    const auto t0 = Clock::now();
    const auto cases = corpus::builtin_corpus();
    const auto rep = corpus::verify_corpus(cases);
    const double took = seconds_since(t0);
    require(rep.ok(), rep.failures.empty() ? "verification failed"
                                           : rep.failures[0].case_id + ": " + rep.failures[0].stage + " " +
                                                 rep.failures[0].detail);
    require(corpus::missing_categories(cases).empty(), "uncovered detector category");
    std::map<corpus::Category, size_t> per;
    for (const auto& tc : cases)
        ++per[tc.category];
    const auto det = corpus::detector_categories();
    require(per.size() == det.size() && det.size() == 19, "categories are not exactly the 19 detector rows");
    for (const auto c : det)
        require(per[c] >= 1, "no case for " + std::string(corpus::to_string(c)));
    require(took < 10.0, "validation took " + fmt_s(took));
    return std::to_string(cases.size()) + " cases, 19 categories, " + fmt_s(took);
}

// --- 2 -----------------------------------------------------------------------

std::vector<uint8_t> ref_uleb(uint64_t v)
{
    std::vector<uint8_t> out;
    do
    {
        uint8_t b = v & 0x7F;
        v >>= 7;
        out.push_back(v ? (b | 0x80) : b);
    } while (v);
    return out;
}

std::string round_trip()
{
    for (const uint64_t v : {0ull, 127ull, 128ull, 624485ull, 4294967295ull, 18446744073709551615ull})
    {
        std::vector<uint8_t> b;
        wat::leb128::write_unsigned(b, v);
        require(b == ref_uleb(v), "encoding of " + std::to_string(v));
        const auto d = wat::leb128::read_unsigned(b, 64);
        require(d && d->value == v && d->length == b.size(), "decoding of " + std::to_string(v));
    }
    std::vector<uint8_t> b;
    wat::leb128::write_unsigned(b, 624485);
    require(b == std::vector<uint8_t>{0xE5, 0x8E, 0x26}, "624485 is not E5 8E 26");

    std::mt19937_64 rng(20260518);
    size_t n = 0;
    for (; n < 1000; ++n)
    {
        const auto m = testing::random_module(rng);
        const auto bytes = wat::encode_module(m);
        require(wat::decode_module(bytes) == m, "module " + std::to_string(n) + " differs after round trip");
    }
    return std::to_string(n) + " modules, 6 varints";
}

// --- 3 -----------------------------------------------------------------------

wat::Module binop(const std::string& t, const std::string& op)
{
    return wat::parse_wat("(module (func (export \"f\") (param " + t + " " + t + ") (result " + t +
                          ") local.get 0 local.get 1 " + op + "))");
}

Value one(const wat::Module& m, Value a, Value b)
{
    const Value args[] = {a, b};
    const auto out = eval::eval_func(m, "f", args);
    require(!out.trap && out.results.size() == 1, "unexpected trap");
    return out.results[0];
}

std::optional<eval::TrapKind> trap_of(const wat::Module& m, Value a, Value b)
{
    const Value args[] = {a, b};
    return eval::eval_func(m, "f", args).trap;
}

std::string evaluator_goldens()
{
    const auto t0 = Clock::now();
    const auto rotr32 = binop("i32", "i32.rotr");
    const auto rotl32 = binop("i32", "i32.rotl");
    const auto rotr64 = binop("i64", "i64.rotr");
    require(one(rotr32, Value::i32(4), Value::i32(0)).as_u32() == 4, "rotr(4, 0) != 4");
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10000; ++i)
    {
        const auto x = static_cast<uint32_t>(rng());
        const auto k = static_cast<uint32_t>(rng());
        require(one(rotr32, Value::i32(x), Value::i32(k)).as_u32() == std::rotr(x, static_cast<int>(k % 32)),
                "i32.rotr disagrees with std::rotr");
        require(one(rotl32, Value::i32(x), Value::i32(k)).as_u32() == std::rotl(x, static_cast<int>(k % 32)),
                "i32.rotl disagrees with std::rotl");
        const uint64_t y = rng();
        require(static_cast<uint64_t>(one(rotr64, Value::i64(y), Value::i64(k)).as_i64()) ==
                    std::rotr(y, static_cast<int>(k % 64)),
                "i64.rotr disagrees with std::rotr");
    }

    const auto cs32 = binop("f32", "f32.copysign");
    const auto cs64 = binop("f64", "f64.copysign");
    for (int i = 0; i < 2000; ++i)
    {
        const auto a = static_cast<uint32_t>(rng()), b = static_cast<uint32_t>(rng());
        require(one(cs32, Value::f32_bits(a), Value::f32_bits(b)).f32_bits() == ((a & 0x7FFFFFFFu) | (b & 0x80000000u)),
                "f32.copysign bits");
        const uint64_t c = rng(), d = rng();
        require(one(cs64, Value::f64_bits(c), Value::f64_bits(d)).f64_bits() ==
                    ((c & ~(1ull << 63)) | (d & (1ull << 63))),
                "f64.copysign bits");
    }

    const auto fdiv = binop("f64", "f64.div");
    require(one(fdiv, Value::f64(1.0), Value::f64(-0.0)).f64_bits() == 0xFFF0000000000000ull, "1/-0 != -inf");
    require(one(fdiv, Value::f64(0.0), Value::f64(0.0)).is_nan(), "0/0 not nan");
    require(one(fdiv, Value::f64(1.0), Value::f64(3.0)).f64_bits() == std::bit_cast<uint64_t>(1.0 / 3.0), "1/3");

    const auto div_s = binop("i32", "i32.div_s");
    const auto rem_s = binop("i32", "i32.rem_s");
    const auto div_u64 = binop("i64", "i64.div_u");
    require(trap_of(div_s, Value::i32(1), Value::i32(0)) == eval::TrapKind::IntegerDivideByZero, "div_s by zero");
    require(trap_of(div_s, Value::i32(INT32_MIN), Value::i32(-1)) == eval::TrapKind::IntegerOverflow,
            "div_s overflow");
    require(!trap_of(rem_s, Value::i32(INT32_MIN), Value::i32(-1)) &&
                one(rem_s, Value::i32(INT32_MIN), Value::i32(-1)).as_i32() == 0,
            "rem_s(INT_MIN, -1) != 0");
    require(one(div_s, Value::i32(-7), Value::i32(2)).as_i32() == -3, "div_s truncation");
    require(trap_of(div_u64, Value::i64(5), Value::i64(0)) == eval::TrapKind::IntegerDivideByZero, "div_u by zero");

    const double took = seconds_since(t0);
    require(took < 5.0, "took " + fmt_s(took));
    return "10000 rotation identities, copysign/div/trap goldens, " + fmt_s(took);
}

// --- 4 -----------------------------------------------------------------------

std::string validation_boundary()
{
    const auto ok = wat::validate_module(wat::parse_wat("(module (memory 0 65536))"));
    require(ok.valid(), "max 65536 rejected");
    const auto bad = wat::validate_module(wat::parse_wat("(module (memory 0 65537))"));
    require(bad.has(wat::Rule::MemMaxExceeded), "max 65537 accepted");
    require(wat::rule_id(wat::Rule::MemMaxExceeded) == "MEM_MAX_EXCEEDED", "rule id");
    return "65536 valid, 65537 -> MEM_MAX_EXCEEDED";
}

// --- 5 -----------------------------------------------------------------------

RunResult printed(const std::string& s)
{
    RunResult r;
    r.stdout_data = s;
    r.exit_code = 0;
    return r;
}

VerdictKind reference_vote(const std::vector<std::string>& outs, size_t who)
{
    std::map<std::string, size_t> count;
    for (const auto& o : outs)
        ++count[o];
    for (const auto& [v, n] : count)
        if (2 * n > outs.size())
            return v == outs[who] ? VerdictKind::Pass : VerdictKind::Fail;
    return VerdictKind::Undecided;
}

std::string oracle_properties()
{
    corpus::TestCase tc;
    tc.id = "T.diff";
    tc.wat = "(module)";
    tc.oracles = {corpus::oracle_kind::Differential{}};
    std::mt19937 rng(42);
    const std::vector<std::string> names = {"wasmer", "wasmtime", "wamr", "wasm3", "wasmedge", "extra1", "extra2"};
    for (int iter = 0; iter < 1000; ++iter)
    {
        const size_t n = 2 + rng() % 6;
        std::vector<std::string> outs(n);
        std::map<std::string, RunResult> in;
        for (size_t i = 0; i < n; ++i)
        {
            outs[i] = std::to_string(rng() % 3);
            in[names[i]] = printed(outs[i]);
        }
        const auto base = oracle::judge_differential(in, tc);
        for (size_t i = 0; i < n; ++i)
            require(base.at(names[i]).kind == reference_vote(outs, i), "vote differs from reference");
        std::vector<size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::map<std::string, RunResult> shuffled;
        for (size_t i = 0; i < n; ++i)
            shuffled[names[perm[i]]] = printed(outs[i]);
        const auto after = oracle::judge_differential(shuffled, tc);
        for (size_t i = 0; i < n; ++i)
            require(after.at(names[perm[i]]).kind == base.at(names[i]).kind, "not permutation invariant");
        // a dissenter joining the majority leaves every majority member passing
        for (size_t i = 0; i < n; ++i)
        {
            if (base.at(names[i]).kind != VerdictKind::Fail)
                continue;
            size_t pass = n;
            for (size_t k = 0; k < n && pass == n; ++k)
                if (base.at(names[k]).kind == VerdictKind::Pass)
                    pass = k;
            auto moved = in;
            moved[names[i]] = printed(outs[pass]);
            const auto m = oracle::judge_differential(moved, tc);
            for (size_t k = 0; k < n; ++k)
                if (base.at(names[k]).kind == VerdictKind::Pass)
                    require(m.at(names[k]).kind == VerdictKind::Pass, "majority not monotone");
            break;
        }
    }

    std::map<std::string, RunResult> split41;
    for (size_t i = 0; i < 5; ++i)
        split41[names[i]] = printed(i == 2 ? "1829" : "4");
    const auto v41 = oracle::judge_differential(split41, tc);
    for (size_t i = 0; i < 5; ++i)
        require(v41.at(names[i]).kind == (i == 2 ? VerdictKind::Fail : VerdictKind::Pass), "4/1 split");

    std::map<std::string, RunResult> split22;
    for (size_t i = 0; i < 4; ++i)
        split22[names[i]] = printed(i < 2 ? "a" : "b");
    for (const auto& [name, v] : oracle::judge_differential(split22, tc))
        require(v.kind == VerdictKind::Undecided, "2/2 split not undecided for " + name);

    corpus::TestCase det;
    det.id = "T.det";
    det.wat = "(module)";
    det.oracles = {corpus::oracle_kind::Determinism{}};
    const corpus::SandboxHandle none;
    for (int iter = 0; iter < 1000; ++iter)
    {
        std::vector<RunResult> runs;
        std::set<std::string> distinct;
        for (int k = 0, n = 2 + static_cast<int>(rng() % 6); k < n; ++k)
        {
            const auto s = std::to_string(rng() % 3);
            distinct.insert(s);
            runs.push_back(printed(s));
        }
        const auto v = oracle::judge_single(runs, det, none);
        require((v.kind == VerdictKind::Fail) == (distinct.size() >= 2), "determinism");
    }
    return "1000 random vote sets, 4/1, 2/2, 1000 repeat sets";
}

// --- 6 -----------------------------------------------------------------------

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

bool classified_once(const adapters::ProcessOutcome& o)
{
    return (o.exit_code.has_value() ? 1 : 0) + (o.signal.has_value() ? 1 : 0) + (o.timed_out ? 1 : 0) == 1;
}

std::string adapter_totality()
{
    testing::TempDir tmp("acceptance");
    const std::string stub = std::string(SENTINEL_TEST_SUPPORT_DIR) + "/stub_runtime.py";
    const auto module = tmp.path() / "m.wasm";
    std::ofstream(module, std::ios::binary) << std::string("\0asm\1\0\0\0", 8);
    const auto run = [&](std::vector<std::string> argv, std::chrono::milliseconds timeout) {
        adapters::ProcessRequest req;
        req.argv = std::move(argv);
        req.argv.insert(req.argv.begin(), stub);
        req.cwd = tmp.path();
        req.timeout = timeout;
        return adapters::run_process(req);
    };
    const auto exit3 = run({"exit", "3"}, std::chrono::seconds(10));
    require(classified_once(exit3) && exit3.exit_code == 3, "nonzero exit");
    const auto sig = run({"signal"}, std::chrono::seconds(10));
    require(classified_once(sig) && sig.signal == SIGSEGV, "signal");
    const auto echo = run({"echo", module.string(), "a", "b"}, std::chrono::seconds(10));
    require(classified_once(echo) && echo.exit_code == 0 && echo.out.find("module bytes: 8") != std::string::npos,
            "echo");
    const auto t0 = Clock::now();
    const auto hang = run({"hang"}, std::chrono::milliseconds(1500));
    require(classified_once(hang) && hang.timed_out, "hang not classified as timeout");
    require(seconds_since(t0) < 5.0, "timeout kill too slow");
    pid_t grandchild = 0;
    std::ifstream(tmp.path() / "child.pid") >> grandchild;
    require(grandchild > 0 && !alive(grandchild), "grandchild survived");
    require(group_empty(hang.pgid), "process group not empty");
    return "exit, signal, hang, echo classified; group " + std::to_string(hang.pgid) + " empty";
}

// --- 7 -----------------------------------------------------------------------

report::Metadata metadata()
{
    report::Metadata m;
    m.os = "Linux";
    m.timestamp = "2026-01-01T00:00:00Z";
    m.modes = {"interpreter", "jit", "aot"};
    m.runtimes = {{"wasmer", "2.3.0"}, {"wasmtime", "0.38.0"}, {"wamr", "05-18-2022"}, {"wasm3", "0.5.0"},
                  {"wasmedge", "0.9.1"}};
    return m;
}

oracle::Verdict of(VerdictKind k, std::string detail)
{
    oracle::Verdict v;
    v.kind = k;
    v.detail = std::move(detail);
    return v;
}

std::string report_contract()
{
    std::vector<report::VerdictRecord> recs;
    for (int i = 0; i < 4; ++i)
        recs.push_back({"B1.c" + std::to_string(i), corpus::Category::B1, "wasmedge", "interpreter",
                        of(VerdictKind::Fail, "d")});
    const auto m = report::aggregate(recs, metadata());
    require(m.cell(corpus::Category::B1, "wasmedge").display() == "4", "cell is not 4");
    require(report::render_markdown(m).find("| 4 ") != std::string::npos, "markdown lacks 4");

    std::mt19937 rng(3);
    const VerdictKind kinds[] = {VerdictKind::Pass, VerdictKind::Fail,      VerdictKind::Crash,
                                 VerdictKind::Timeout, VerdictKind::Skip, VerdictKind::Undecided};
    const auto cats = corpus::detector_categories();
    for (int iter = 0; iter < 300; ++iter)
    {
        std::vector<report::VerdictRecord> rs;
        bool bug = false;
        for (int i = 0, n = static_cast<int>(rng() % 10); i < n; ++i)
        {
            const auto k = kinds[rng() % 6];
            bug = bug || k == VerdictKind::Fail || k == VerdictKind::Crash || k == VerdictKind::Timeout;
            rs.push_back({"c" + std::to_string(rng() % 5), cats[rng() % cats.size()],
                          metadata().runtimes[rng() % 5].name, rng() % 2 ? "jit" : "aot",
                          of(k, std::to_string(rng() % 2))});
        }
        const auto a = report::aggregate(rs, metadata());
        const auto ja = report::render_json(a);
        std::shuffle(rs.begin(), rs.end(), rng);
        require(report::render_json(report::aggregate(rs, metadata())) == ja, "json not byte-deterministic");
        require(report::exit_status(a) == (bug ? 1 : 0), "exit status unsound");
        require(report::render_json(report::matrix_from_json(ja)) == ja, "json does not reload");
    }
    return "cell 4, byte-identical json over 300 sets, exit status sound";
}

// --- 8 -----------------------------------------------------------------------

struct Finding {
    const char* runtime;
    const char* version;
    const char* case_id;
};

std::string integration()
{
    const Finding findings[] = {
        {"wamr", "05-18-2022", "A2.rotr-zero-amount"},
        {"wasmedge", "0.9.1", "B1.dir-count"},
        {"wasm3", "0.5.0", "A8.mem-max-65536"},
    };
    const auto config = adapters::config_path(fs::path(SENTINEL_SOURCE_DIR) / "config" / "runtimes.json");
    const auto found = adapters::discover_runtimes(adapters::load_runtime_config(config));
    size_t reproduced = 0;
    std::vector<std::string> notes;
    for (const auto& f : findings)
    {
        const auto it = std::find_if(found.specs.begin(), found.specs.end(),
                                     [&](const adapters::RuntimeSpec& s) { return s.name == f.runtime; });
        if (it == found.specs.end() || it->version != f.version)
        {
            notes.push_back(std::string(f.runtime) + " " + f.version + " absent");
            continue;
        }
        std::ostringstream out, err;
        report::cli({"run", "--runtime", f.runtime, "--case", f.case_id, "--format", "json", "--config",
                     config.string()},
                    out, err);
        const auto j = nlohmann::json::parse(out.str());
        bool hit = false;
        for (const auto& r : j.at("failures"))
            hit = hit || (r.at("case") == f.case_id && r.at("runtime") == f.runtime);
        if (hit)
            ++reproduced;
        else
            notes.push_back(std::string(f.case_id) + " passed on " + f.runtime);
    }
    std::string detail = std::to_string(reproduced) + "/3 reproduced";
    for (const auto& n : notes)
        detail += "; " + n;
    require(reproduced == 3, "not reproduced: " + detail);
    return detail;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        bool gating;
        std::function<std::string()> check;
    };
    const Criterion criteria[] = {
        {1, "corpus coverage", true, corpus_coverage},
        {2, "binary round-trip", true, round_trip},
        {3, "evaluator goldens", true, evaluator_goldens},
        {4, "validation boundary", true, validation_boundary},
        {5, "oracle properties", true, oracle_properties},
        {6, "adapter totality", true, adapter_totality},
        {7, "report contract", true, report_contract},
        {8, "pinned-runtime findings", false, integration},
    };
    int status = 0;
    for (const auto& c : criteria)
    {
        std::string verdict, detail;
        try
        {
            detail = c.check();
            verdict = "PASS";
        }
        catch (const std::exception& e)
        {
            detail = e.what();
            verdict = "FAIL";
            if (c.gating)
                status = 1;
        }
        std::cout << verdict << " [" << c.id << "] " << c.name << ": " << detail
                  << (c.gating ? "" : " (informational)") << "\n";
    }
    return status;
}
