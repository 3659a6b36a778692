// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/corpus/corpus.hpp"
#include "sentinel/eval/evaluator.hpp"
#include "sentinel/wat/errors.hpp"
#include "sentinel/wat/wat.hpp"

#include <algorithm>

namespace sentinel::corpus {

namespace {

std::string render_values(const std::vector<eval::Value>& values)
{
    std::string out;
    for (const auto& v : values)
    {
        if (!out.empty())
            out += ", ";
        out += format_typed_value(v);
    }
    return "[" + out + "]";
}

void verify_one(const TestCase& tc, VerificationReport& report)
{
    const auto fail = [&](std::string stage, std::string detail) {
        report.failures.push_back({tc.id, std::move(stage), std::move(detail)});
    };

    if (tc.oracles.empty())
        return fail("manifest", "case has no oracle");
    if (tc.repeats == 0)
        return fail("manifest", "repeats must be at least 1");
    for (const auto& e : tc.fixture.tree)
    {
        try
        {
            checked_relative(e.path);
        }
        catch (const SandboxEscape& ex)
        {
            return fail("manifest", ex.what());
        }
    }

    wat::Module m;
    wat::Bytes bytes;
    try
    {
        if (tc.binary)
        {
            bytes = tc.module_bytes();
            m = wat::decode_module(bytes);
        }
        else
        {
            m = wat::parse_wat(tc.wat);
        }
    }
    catch (const wat::ParseError& e)
    {
        return fail("parse", e.what());
    }
    catch (const wat::DecodeError& e)
    {
        return fail("decode", e.what());
    }
    catch (const std::exception& e)
    {
        return fail("parse", e.what());
    }

    try
    {
        if (!tc.binary)
            bytes = wat::encode_module(m);
        const wat::Module back = wat::decode_module(bytes);
        if (!(back == m))
            return fail("roundtrip", "decoded module differs from source");
        if (wat::encode_module(back) != bytes)
            return fail("roundtrip", "re-encoding changed the bytes");
    }
    catch (const wat::EncodeError& e)
    {
        return fail("encode", e.what());
    }
    catch (const wat::DecodeError& e)
    {
        return fail("decode", e.what());
    }

    const auto vr = wat::validate_module(m);
    if (const auto* inv = tc.find_oracle<oracle_kind::ExpectInvalid>())
    {
        if (vr.valid())
            return fail("validate", "expected an invalid module, validator accepted it");
        if (!inv->rule.empty())
        {
            const bool hit = std::any_of(vr.violations.begin(), vr.violations.end(),
                                         [&](const wat::Violation& v) { return wat::rule_id(v.rule) == inv->rule; });
            if (!hit)
                return fail("validate", "expected violation " + inv->rule + ", got " +
                                            std::string(wat::rule_id(vr.violations.front().rule)));
        }
    }
    else if (!vr.valid())
    {
        const auto& v = vr.violations.front();
        return fail("validate", std::string(wat::rule_id(v.rule)) + ": " + v.detail);
    }

    if (const auto* ev = tc.find_oracle<oracle_kind::ExpectedValues>())
    {
        if (!tc.invoke)
            return fail("eval", "expected values need an invoke");
        try
        {
            const auto out = eval::eval_func(m, tc.invoke->export_name, tc.invoke->args);
            if (out.trapped())
                return fail("eval", "reference evaluator trapped: " + std::string(eval::to_string(*out.trap)));
            bool same = out.results.size() == ev->values.size();
            for (size_t i = 0; same && i < out.results.size(); ++i)
                same = out.results[i].same_class(ev->values[i]);
            if (!same)
                return fail("eval", "expected " + render_values(ev->values) + ", reference evaluator gives " +
                                        render_values(out.results));
        }
        catch (const eval::EvalError& e)
        {
            return fail("eval", e.what());
        }
    }
}

}  // namespace

VerificationReport verify_corpus(const std::vector<TestCase>& cases)
{
    VerificationReport report;
    std::set<std::string> seen;
    for (const auto& tc : cases)
    {
        ++report.checked;
        if (!seen.insert(tc.id).second)
        {
            report.failures.push_back({tc.id, "manifest", "duplicate case id"});
            continue;
        }
        verify_one(tc, report);
    }
    return report;
}

std::vector<Category> missing_categories(const std::vector<TestCase>& cases)
{
    std::vector<Category> missing;
    for (const auto c : detector_categories())
        if (std::none_of(cases.begin(), cases.end(), [c](const TestCase& tc) { return tc.category == c; }))
            missing.push_back(c);
    return missing;
}

}  // namespace sentinel::corpus
