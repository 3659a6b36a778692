// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/oracle/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>

namespace sentinel::oracle {

using namespace corpus::oracle_kind;
using eval::Value;
using wat::ValType;

std::string_view to_string(VerdictKind k) noexcept
{
    switch (k)
    {
    case VerdictKind::Pass:
        return "pass";
    case VerdictKind::Fail:
        return "fail";
    case VerdictKind::Crash:
        return "crash";
    case VerdictKind::Timeout:
        return "timeout";
    case VerdictKind::Skip:
        return "skip";
    case VerdictKind::Undecided:
        return "undecided";
    }
    return "?";
}

std::optional<VerdictKind> verdict_kind_from_string(std::string_view s) noexcept
{
    for (auto k : {VerdictKind::Pass, VerdictKind::Fail, VerdictKind::Crash, VerdictKind::Timeout, VerdictKind::Skip,
                   VerdictKind::Undecided})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

Verdict Verdict::pass(std::string rule, std::string detail)
{
    Verdict v;
    v.kind = VerdictKind::Pass;
    v.rule = std::move(rule);
    v.detail = std::move(detail);
    return v;
}

Verdict Verdict::skip(std::string reason)
{
    Verdict v;
    v.kind = VerdictKind::Skip;
    v.rule = "skip";
    v.detail = std::move(reason);
    return v;
}

std::string normalize_output(std::string_view text)
{
    std::string s;
    s.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i)
        if (!(text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n'))
            s += text[i];
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string excerpt(std::string_view text, size_t limit)
{
    if (text.size() <= limit)
        return std::string(text);
    return std::string(text.substr(0, limit)) + "...";
}

namespace {

Verdict fail(std::string rule, std::string detail, std::string expected = {}, std::string actual = {})
{
    Verdict v;
    v.kind = VerdictKind::Fail;
    v.rule = std::move(rule);
    v.detail = std::move(detail);
    v.expected = std::move(expected);
    v.actual = std::move(actual);
    return v;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool contains_ci(std::string_view hay, std::string_view needle)
{
    return lower(hay).find(lower(needle)) != std::string::npos;
}

std::string status_text(const RunResult& r)
{
    std::string s;
    if (r.exit_code)
        s = "exit " + std::to_string(*r.exit_code);
    else if (r.signal)
        s = "signal " + std::to_string(*r.signal);
    else
        s = "timed out";
    if (r.precompile_failed)
        s += " (aot precompile)";
    return s;
}

std::string diagnostics(const RunResult& r)
{
    return r.stderr_data + (r.stderr_data.empty() || r.stdout_data.empty() ? "" : "\n") + r.stdout_data;
}

// Why a run that should have exited cleanly did not.
std::string not_clean(const RunResult& r)
{
    const std::string diag = normalize_output(diagnostics(r));
    return status_text(r) + (diag.empty() ? "" : ": " + excerpt(diag, 160));
}

template <typename T>
std::optional<T> parse_int(std::string_view s, int base)
{
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

// Integer in any of: -5, 5, 0x1f, -0x1f. Result reduced mod 2^64.
std::optional<uint64_t> parse_any_int(std::string_view s)
{
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+'))
    {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    std::optional<uint64_t> mag;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
        mag = parse_int<uint64_t>(s.substr(2), 16);
    else
        mag = parse_int<uint64_t>(s, 10);
    if (!mag)
        return std::nullopt;
    return neg ? (~*mag + 1) : *mag;
}

std::optional<double> parse_float(std::string_view s)
{
    const std::string low = lower(s);
    std::string_view body = low;
    bool neg = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+'))
    {
        neg = body[0] == '-';
        body.remove_prefix(1);
    }
    if (body.rfind("nan", 0) == 0)
        return neg ? -std::nan("") : std::nan("");
    if (body == "inf" || body == "infinity")
        return neg ? -INFINITY : INFINITY;
    const std::string text(low);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty())
        return std::nullopt;
    return v;
}

__extension__ using u128 = unsigned __int128;

std::optional<u128> parse_u128(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    {
        base = 16;
        s.remove_prefix(2);
        if (s.empty() || s.size() > 32)
            return std::nullopt;
    }
    u128 v = 0;
    for (char c : s)
    {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        else
            return std::nullopt;
        const u128 next = v * static_cast<unsigned>(base) + static_cast<unsigned>(d);
        if (base == 10 && next / 10 != v)
            return std::nullopt;
        v = next;
    }
    return v;
}

std::string_view strip_type_suffix(std::string_view token)
{
    // "0x4:i64" and "i64:4" both occur.
    static constexpr std::string_view types[] = {"i32", "i64", "f32", "f64", "v128"};
    if (const auto colon = token.rfind(':'); colon != std::string_view::npos)
    {
        const auto tail = token.substr(colon + 1);
        const auto head = token.substr(0, colon);
        for (auto t : types)
        {
            if (tail == t)
                return head;
            if (head == t)
                return tail;
        }
    }
    return token;
}

std::vector<std::string> split_tokens(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text)
    {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',')
        {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        }
        else
            cur += c;
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::optional<Value> parse_printed(std::string_view token, ValType type)
{
    token = strip_type_suffix(token);
    switch (type)
    {
    case ValType::I32: {
        const auto v = parse_any_int(token);
        if (!v)
            return std::nullopt;
        // Accept signed or unsigned renderings of the same 32 bits.
        const uint64_t hi = *v >> 32;
        if (hi != 0 && hi != 0xFFFFFFFFu)
            return std::nullopt;
        return Value::i32(static_cast<uint32_t>(*v));
    }
    case ValType::I64: {
        const auto v = parse_any_int(token);
        return v ? std::optional<Value>(Value::i64(*v)) : std::nullopt;
    }
    case ValType::F32: {
        const auto d = parse_float(token);
        if (!d)
            return std::nullopt;
        return Value::f32(static_cast<float>(*d));
    }
    case ValType::F64: {
        const auto d = parse_float(token);
        return d ? std::optional<Value>(Value::f64(*d)) : std::nullopt;
    }
    case ValType::V128: {
        const auto v = parse_u128(token);
        if (!v)
            return std::nullopt;
        eval::V128 bytes{};
        for (size_t i = 0; i < 16; ++i)
            bytes[i] = static_cast<uint8_t>(*v >> (8 * i));
        return Value::v128(bytes);
    }
    default:
        return std::nullopt;
    }
}

std::string match_values(const std::string& printed, const std::vector<Value>& expected,
                         const std::string& value_pattern)
{
    std::string text = printed;
    if (!value_pattern.empty())
    {
        const std::regex re(value_pattern);
        text.clear();
        for (auto it = std::sregex_iterator(printed.begin(), printed.end(), re); it != std::sregex_iterator(); ++it)
            text += (*it)[1].str() + "\n";
    }
    const auto tokens = split_tokens(text);
    if (tokens.size() != expected.size())
        return "expected " + std::to_string(expected.size()) + " value(s), got " + std::to_string(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i)
    {
        const auto got = parse_printed(tokens[i], expected[i].type());
        if (!got)
            return "value " + std::to_string(i) + ": cannot read \"" + tokens[i] + "\"";
        if (!got->same_class(expected[i]))
            return "value " + std::to_string(i) + ": expected " + expected[i].to_string() + ", got " + tokens[i];
    }
    return {};
}

bool has_concrete_oracle(const corpus::TestCase& tc)
{
    for (const auto& o : tc.oracles)
        if (!std::holds_alternative<Differential>(o) && !std::holds_alternative<Determinism>(o) &&
            !std::holds_alternative<MemoryLeak>(o))
            return true;
    return false;
}

Verdict judge_leak(const std::vector<RunResult>& results, const corpus::TestCase& tc)
{
    constexpr double mib = 1024.0 * 1024.0;
    const auto* spec = tc.find_oracle<MemoryLeak>();
    const double threshold = (spec != nullptr ? spec->threshold_mib : 1.0) * mib;
    std::vector<double> ys;
    for (const auto& r : results)
    {
        if (!r.peak_memory)
            return Verdict::skip("peak memory not reported");
        ys.push_back(static_cast<double>(*r.peak_memory));
    }
    if (ys.size() < 10)
        return Verdict::skip("memory trend needs at least 10 runs, got " + std::to_string(ys.size()));

    const double n = static_cast<double>(ys.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < ys.size(); ++i)
    {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
        syy += ys[i] * ys[i];
    }
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    const double cov = n * sxy - sx * sy;
    const double slope = cov / vx;
    const double r = vy > 0 ? cov / std::sqrt(vx * vy) : 0.0;

    char buf[160];
    std::snprintf(buf, sizeof buf, "slope %.3f MiB/iteration, r=%.3f over %zu runs", slope / mib, r, ys.size());
    if (slope > threshold && r >= 0.9)
    {
        char lim[64];
        std::snprintf(lim, sizeof lim, "<= %.3f MiB/iteration", threshold / mib);
        auto v = fail("memory_leak", std::string("LeakSuspect: ") + buf, lim, buf);
        for (size_t i = 0; i < ys.size(); ++i)
            v.evidence.push_back(i);
        return v;
    }
    return Verdict::pass("memory_leak", buf);
}

Verdict judge_single(const std::vector<RunResult>& results, const corpus::TestCase& tc,
                     const corpus::SandboxHandle& sandbox, const std::string& value_pattern)
{
    if (results.empty())
        return Verdict::skip("no runs");

    for (size_t i = 0; i < results.size(); ++i)
        if (results[i].signal)
        {
            Verdict v;
            v.kind = VerdictKind::Crash;
            v.rule = "signal";
            v.detail = "terminated by signal " + std::to_string(*results[i].signal) +
                       (results[i].precompile_failed ? " during aot precompile" : "");
            v.actual = excerpt(normalize_output(results[i].stderr_data));
            v.evidence = {i};
            return v;
        }
    for (size_t i = 0; i < results.size(); ++i)
        if (results[i].timed_out)
        {
            Verdict v;
            v.kind = VerdictKind::Timeout;
            v.rule = "timeout";
            v.detail = "killed after " + std::to_string(results[i].duration.count()) + " ms" +
                       (results[i].precompile_failed ? " during aot precompile" : "");
            v.evidence = {i};
            return v;
        }

    if (tc.find_oracle<Determinism>() != nullptr && results.size() > 1)
    {
        std::vector<std::string> distinct;
        for (const auto& r : results)
            if (std::find(distinct.begin(), distinct.end(), r.stdout_data) == distinct.end())
                distinct.push_back(r.stdout_data);
        if (distinct.size() > 1)
        {
            std::string seen;
            for (const auto& r : results)
                seen += (seen.empty() ? "" : ", ") + ("\"" + excerpt(normalize_output(r.stdout_data), 40) + "\"");
            auto v = fail("determinism",
                          std::to_string(distinct.size()) + " distinct outputs over " + std::to_string(results.size()) +
                              " repeats",
                          "identical output on every repeat", seen);
            for (size_t i = 0; i < results.size(); ++i)
                v.evidence.push_back(i);
            return v;
        }
    }

    for (size_t i = 0; i < results.size(); ++i)
    {
        const RunResult& r = results[i];
        const bool nonzero = r.exit_code && *r.exit_code != 0;
        const std::string out = normalize_output(r.stdout_data);
        for (const auto& spec : tc.oracles)
        {
            std::optional<Verdict> bad;
            if (const auto* o = std::get_if<ExpectTrap>(&spec))
            {
                if (!nonzero)
                    bad = fail("expect_trap", "expected a trap, run exited cleanly", "trap \"" + o->substring + "\"",
                               "exit 0: " + excerpt(out, 80));
                else if (!contains_ci(diagnostics(r), o->substring))
                    bad = fail("expect_trap", "trap message does not mention \"" + o->substring + "\"", o->substring,
                               not_clean(r));
            }
            else if (const auto* e = std::get_if<ExpectError>(&spec))
            {
                if (!nonzero)
                    bad = fail("expect_error", "expected an error, run exited cleanly", "error \"" + e->substring + "\"",
                               "exit 0: " + excerpt(out, 80));
                else if (normalize_output(diagnostics(r)).empty())
                    bad = fail("expect_error", "nonzero exit without a diagnostic", "error message", status_text(r));
                else if (!contains_ci(diagnostics(r), e->substring))
                    bad = fail("expect_error", "error message does not mention \"" + e->substring + "\"", e->substring,
                               not_clean(r));
            }
            else if (std::holds_alternative<ExpectValid>(spec))
            {
                if (!r.exited_cleanly())
                    bad = fail("expect_valid", "valid module was rejected", "accepted", not_clean(r));
            }
            else if (const auto* inv = std::get_if<ExpectInvalid>(&spec))
            {
                if (!nonzero)
                    bad = fail("expect_invalid", "invalid module was accepted (" + inv->rule + ")", "rejected",
                               "exit 0: " + excerpt(out, 80));
            }
            else if (const auto* s = std::get_if<ExpectedStdout>(&spec))
            {
                const std::string want = normalize_output(s->text);
                if (!r.exited_cleanly())
                    bad = fail("expected_stdout", "expected \"" + excerpt(want, 60) + "\", run failed", want,
                               not_clean(r));
                else if (out != want)
                    bad = fail("expected_stdout",
                               "expected \"" + excerpt(want, 60) + "\" got \"" + excerpt(out, 60) + "\"", want, out);
            }
            else if (const auto* vals = std::get_if<ExpectedValues>(&spec))
            {
                std::string want;
                for (const auto& v : vals->values)
                    want += (want.empty() ? "" : " ") + v.to_string();
                if (!r.exited_cleanly())
                    bad = fail("expected_values", "expected " + want + ", run failed", want, not_clean(r));
                else if (const auto why = match_values(r.stdout_data, vals->values, value_pattern); !why.empty())
                    bad = fail("expected_values", why, want, excerpt(out));
            }
            else if (const auto* fsx = std::get_if<FilesystemState>(&spec))
            {
                // The sandbox is the last repeat's tree.
                if (i + 1 == results.size())
                    if (const auto msgs = sandbox.check(fsx->assertions); !msgs.empty())
                    {
                        std::string all;
                        for (const auto& m : msgs)
                            all += (all.empty() ? "" : "; ") + m;
                        bad = fail("filesystem_state", all, "", "");
                    }
            }
            if (bad)
            {
                bad->evidence = {i};
                return *bad;
            }
        }
    }

    if (tc.find_oracle<MemoryLeak>() != nullptr)
    {
        Verdict v = judge_leak(results, tc);
        // An unmeasurable trend only matters when nothing else was checked.
        if (v.kind != VerdictKind::Skip || !has_concrete_oracle(tc))
            if (v.kind != VerdictKind::Pass)
                return v;
    }

    std::vector<std::string> used;
    for (const auto& o : tc.oracles)
        if (!std::holds_alternative<Differential>(o))
            used.emplace_back(corpus::oracle_name(o));
    std::string names;
    for (const auto& n : used)
        names += (names.empty() ? "" : ", ") + n;
    return Verdict::pass(used.empty() ? "" : std::string(used.front()),
                         used.empty() ? "no single-run oracle" : "passed " + names);
}

std::map<std::string, Verdict> judge_differential(const std::map<std::string, RunResult>& results,
                                                  const corpus::TestCase&)
{
    std::map<std::string, Verdict> out;
    std::map<std::string, std::vector<std::string>> groups;  // output -> members
    size_t participants = 0;
    for (const auto& [name, r] : results)
    {
        if (r.signal)
        {
            Verdict v;
            v.kind = VerdictKind::Crash;
            v.rule = "signal";
            v.detail = "terminated by signal " + std::to_string(*r.signal);
            out[name] = v;
            continue;
        }
        if (r.timed_out)
        {
            Verdict v;
            v.kind = VerdictKind::Timeout;
            v.rule = "timeout";
            v.detail = "killed after " + std::to_string(r.duration.count()) + " ms";
            out[name] = v;
            continue;
        }
        ++participants;
        if (r.exited_cleanly())
        {
            std::string key = r.stdout_data;
            key.erase(std::remove(key.begin(), key.end(), '\r'), key.end());
            while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
                key.pop_back();
            groups[key].push_back(name);
        }
    }

    const std::string* majority = nullptr;
    for (const auto& [key, members] : groups)
        if (2 * members.size() > participants)
            majority = &key;

    for (const auto& [name, r] : results)
    {
        if (out.count(name))
            continue;
        if (majority == nullptr)
        {
            Verdict v;
            v.kind = VerdictKind::Undecided;
            v.rule = "differential";
            v.detail = "no strict majority among " + std::to_string(participants) + " runs";
            out[name] = v;
            continue;
        }
        const auto& members = groups[*majority];
        if (std::find(members.begin(), members.end(), name) != members.end())
        {
            out[name] = Verdict::pass("differential", "agrees with " + std::to_string(members.size()) + "/" +
                                                          std::to_string(participants));
            continue;
        }
        const std::string got = r.exited_cleanly() ? normalize_output(r.stdout_data) : not_clean(r);
        out[name] = fail("differential",
                         "majority (" + std::to_string(members.size()) + "/" + std::to_string(participants) +
                             ") printed \"" + excerpt(*majority, 60) + "\"",
                         excerpt(*majority), excerpt(got));
    }
    return out;
}

Verdict combine(const Verdict& single, const std::optional<Verdict>& differential, const corpus::TestCase& tc)
{
    if (single.kind != VerdictKind::Pass || !differential)
        return single;
    if (has_concrete_oracle(tc))
        return single;
    return *differential;
}

}  // namespace sentinel::oracle
