// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/corpus/corpus.hpp"
#include "sentinel/wat/errors.hpp"
#include "sentinel/wat/wat.hpp"

#include <json.hpp>

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace sentinel::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CaseReader
{
public:
    CaseReader(const json& j, std::string where, fs::path base) : j_{j}, where_{std::move(where)}, base_{std::move(base)} {}

    TestCase read()
    {
        if (!j_.is_object())
            throw ManifestError(where_, "expected an object");
        TestCase tc;
        tc.id = str(j_, "id", true);
        if (tc.id.empty())
            throw ManifestError(field("id"), "must not be empty");
        const auto cat = str(j_, "category", true);
        const auto c = category_from_code(cat);
        if (!c)
            throw ManifestError(field("category"), "unknown category \"" + cat + "\"");
        tc.category = *c;

        const bool has_wat = j_.contains("wat");
        const bool has_bin = j_.contains("binary");
        if (has_wat == has_bin)
            throw ManifestError(where_, "exactly one of wat or binary is required");
        if (has_wat)
            tc.wat = str(j_, "wat", true);
        else
            tc.binary = relative_file(str(j_, "binary", true), field("binary"));

        if (j_.contains("invoke"))
            tc.invoke = invoke(j_.at("invoke"));
        if (j_.contains("features"))
        {
            const auto& f = j_.at("features");
            if (!f.is_array())
                throw ManifestError(field("features"), "expected an array");
            for (const auto& item : f)
            {
                const auto flag = item.is_string() ? feature_from_string(item.get<std::string>()) : std::nullopt;
                if (!flag)
                    throw ManifestError(field("features"), "unknown feature " + item.dump());
                tc.features.insert(*flag);
            }
        }
        if (j_.contains("fixture"))
            tc.fixture = fixture(j_.at("fixture"));
        if (!j_.contains("oracle"))
            throw ManifestError(field("oracle"), "required");
        const auto& o = j_.at("oracle");
        if (o.is_array())
        {
            for (size_t i = 0; i < o.size(); ++i)
                tc.oracles.push_back(oracle(o[i], field("oracle[" + std::to_string(i) + "]")));
        }
        else
        {
            tc.oracles.push_back(oracle(o, field("oracle")));
        }
        if (tc.oracles.empty())
            throw ManifestError(field("oracle"), "at least one oracle is required");
        if (j_.contains("repeats"))
        {
            const auto& r = j_.at("repeats");
            if (!r.is_number_unsigned() || r.get<unsigned>() == 0)
                throw ManifestError(field("repeats"), "must be a positive integer");
            tc.repeats = r.get<unsigned>();
        }
        if (j_.contains("timeout_ms"))
        {
            const auto& t = j_.at("timeout_ms");
            if (!t.is_number_unsigned() || t.get<uint64_t>() == 0)
                throw ManifestError(field("timeout_ms"), "must be a positive integer");
            tc.timeout = std::chrono::milliseconds(t.get<uint64_t>());
        }
        if (j_.contains("note"))
            tc.note = str(j_, "note", true);

        check_module(tc);
        return tc;
    }

private:
    std::string field(const std::string& name) const { return where_ + "." + name; }

    std::string str(const json& obj, const char* key, bool required) const
    {
        if (!obj.contains(key))
        {
            if (required)
                throw ManifestError(field(key), "required");
            return {};
        }
        const auto& v = obj.at(key);
        if (!v.is_string())
            throw ManifestError(field(key), "expected a string");
        return v.get<std::string>();
    }

    fs::path relative_file(const std::string& p, const std::string& where) const
    {
        if (fs::path(p).is_absolute())
            throw ManifestError(where, "must be relative");
        return base_ / p;
    }

    std::string relative_path(const json& v, const std::string& where) const
    {
        if (!v.is_string())
            throw ManifestError(where, "expected a string");
        const auto p = v.get<std::string>();
        if (fs::path(p).is_absolute())
            throw ManifestError(where, "must be relative");
        try
        {
            checked_relative(p);
        }
        catch (const SandboxEscape&)
        {
            throw ManifestError(where, "escapes the sandbox");
        }
        return p;
    }

    eval::Value value(const json& v, const std::string& where) const
    {
        if (!v.is_string())
            throw ManifestError(where, "expected a typed value string such as \"i32:1\"");
        try
        {
            return parse_typed_value(v.get<std::string>());
        }
        catch (const std::invalid_argument& e)
        {
            throw ManifestError(where, e.what());
        }
    }

    Invoke invoke(const json& v) const
    {
        const auto where = field("invoke");
        if (!v.is_object())
            throw ManifestError(where, "expected an object");
        Invoke inv;
        if (!v.contains("export") || !v.at("export").is_string())
            throw ManifestError(where + ".export", "required string");
        inv.export_name = v.at("export").get<std::string>();
        if (v.contains("args"))
        {
            const auto& a = v.at("args");
            if (!a.is_array())
                throw ManifestError(where + ".args", "expected an array");
            for (size_t i = 0; i < a.size(); ++i)
                inv.args.push_back(value(a[i], where + ".args[" + std::to_string(i) + "]"));
        }
        return inv;
    }

    FixtureSpec fixture(const json& v) const
    {
        const auto where = field("fixture");
        if (!v.is_object())
            throw ManifestError(where, "expected an object");
        FixtureSpec spec;
        if (v.contains("files"))
        {
            const auto& files = v.at("files");
            if (!files.is_array())
                throw ManifestError(where + ".files", "expected an array");
            for (size_t i = 0; i < files.size(); ++i)
            {
                const auto w = where + ".files[" + std::to_string(i) + "]";
                const auto& f = files[i];
                if (!f.is_object() || !f.contains("path"))
                    throw ManifestError(w, "expected an object with a path");
                FixtureEntry e;
                e.path = relative_path(f.at("path"), w + ".path");
                if (f.value("dir", false))
                {
                    spec.tree.push_back(std::move(e));
                    continue;
                }
                if (f.contains("content"))
                {
                    if (!f.at("content").is_string())
                        throw ManifestError(w + ".content", "expected a string");
                    e.content = f.at("content").get<std::string>();
                }
                else if (f.contains("source"))
                {
                    if (!f.at("source").is_string())
                        throw ManifestError(w + ".source", "expected a string");
                    const auto src = relative_file(f.at("source").get<std::string>(), w + ".source");
                    std::ifstream in(src, std::ios::binary);
                    if (!in)
                        throw ManifestError(w + ".source", "cannot read " + src.string());
                    e.content = std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
                }
                else
                {
                    e.content = std::string();
                }
                spec.tree.push_back(std::move(e));
            }
        }
        if (v.contains("generate"))
        {
            const auto& gen = v.at("generate");
            if (!gen.is_array())
                throw ManifestError(where + ".generate", "expected an array");
            for (size_t i = 0; i < gen.size(); ++i)
            {
                const auto w = where + ".generate[" + std::to_string(i) + "]";
                const auto& g = gen[i];
                if (!g.is_object() || !g.contains("dir") || !g.contains("count"))
                    throw ManifestError(w, "expected {dir, count, name_length?}");
                const auto dir = relative_path(g.at("dir"), w + ".dir");
                if (!g.at("count").is_number_unsigned())
                    throw ManifestError(w + ".count", "expected a non-negative integer");
                const auto len = g.value("name_length", size_t{8});
                if (len < 8)
                    throw ManifestError(w + ".name_length", "must be at least 8");
                auto files = counted_files(dir, g.at("count").get<size_t>(), len);
                spec.tree.insert(spec.tree.end(), files.begin(), files.end());
            }
        }
        if (v.contains("preopens"))
        {
            const auto& pre = v.at("preopens");
            if (!pre.is_array())
                throw ManifestError(where + ".preopens", "expected an array");
            for (size_t i = 0; i < pre.size(); ++i)
            {
                const auto w = where + ".preopens[" + std::to_string(i) + "]";
                const auto& p = pre[i];
                if (!p.is_object() || !p.contains("host") || !p.contains("guest") || !p.at("guest").is_string())
                    throw ManifestError(w, "expected {host, guest}");
                spec.preopens.push_back({relative_path(p.at("host"), w + ".host"), p.at("guest").get<std::string>()});
            }
        }
        if (v.contains("stdin"))
        {
            if (!v.at("stdin").is_string())
                throw ManifestError(where + ".stdin", "expected a string");
            spec.stdin_data = v.at("stdin").get<std::string>();
        }
        if (v.contains("env"))
        {
            const auto& env = v.at("env");
            if (!env.is_object())
                throw ManifestError(where + ".env", "expected an object");
            for (const auto& [k, val] : env.items())
            {
                if (!val.is_string())
                    throw ManifestError(where + ".env." + k, "expected a string");
                spec.env.emplace_back(k, val.get<std::string>());
            }
        }
        return spec;
    }

    OracleSpec oracle(const json& v, const std::string& where) const
    {
        using namespace oracle_kind;
        if (!v.is_object() || !v.contains("kind") || !v.at("kind").is_string())
            throw ManifestError(where, "expected an object with a kind");
        const auto kind = v.at("kind").get<std::string>();
        const auto text = [&](const char* key) {
            if (!v.contains(key))
                return std::string();
            if (!v.at(key).is_string())
                throw ManifestError(where + "." + key, "expected a string");
            return v.at(key).get<std::string>();
        };
        if (kind == "expected_stdout")
        {
            if (!v.contains("text"))
                throw ManifestError(where + ".text", "required");
            return ExpectedStdout{text("text")};
        }
        if (kind == "expected_values")
        {
            ExpectedValues ev;
            if (!v.contains("values") || !v.at("values").is_array())
                throw ManifestError(where + ".values", "expected an array");
            const auto& vals = v.at("values");
            for (size_t i = 0; i < vals.size(); ++i)
                ev.values.push_back(value(vals[i], where + ".values[" + std::to_string(i) + "]"));
            return ev;
        }
        if (kind == "expect_trap")
            return ExpectTrap{text("substring")};
        if (kind == "expect_error")
            return ExpectError{text("substring")};
        if (kind == "expect_valid")
            return ExpectValid{};
        if (kind == "expect_invalid")
            return ExpectInvalid{text("rule")};
        if (kind == "determinism")
            return Determinism{};
        if (kind == "differential")
            return Differential{};
        if (kind == "memory_leak")
        {
            MemoryLeak leak;
            if (v.contains("threshold_mib"))
            {
                if (!v.at("threshold_mib").is_number() || v.at("threshold_mib").get<double>() <= 0)
                    throw ManifestError(where + ".threshold_mib", "must be a positive number");
                leak.threshold_mib = v.at("threshold_mib").get<double>();
            }
            return leak;
        }
        if (kind == "filesystem_state")
        {
            FilesystemState fsx;
            if (!v.contains("assertions") || !v.at("assertions").is_array())
                throw ManifestError(where + ".assertions", "expected an array");
            const auto& as = v.at("assertions");
            for (size_t i = 0; i < as.size(); ++i)
            {
                const auto w = where + ".assertions[" + std::to_string(i) + "]";
                const auto& a = as[i];
                if (!a.is_object() || !a.contains("path"))
                    throw ManifestError(w, "expected an object with a path");
                PathAssertion pa;
                pa.path = relative_path(a.at("path"), w + ".path");
                if (a.contains("entries"))
                {
                    if (!a.at("entries").is_number_unsigned())
                        throw ManifestError(w + ".entries", "expected a non-negative integer");
                    pa.kind = PathAssertion::Kind::EntryCount;
                    pa.count = a.at("entries").get<size_t>();
                }
                else if (a.value("absent", false))
                {
                    pa.kind = PathAssertion::Kind::Absent;
                }
                else
                {
                    pa.kind = PathAssertion::Kind::Exists;
                }
                fsx.assertions.push_back(std::move(pa));
            }
            return fsx;
        }
        throw ManifestError(where + ".kind", "unknown oracle kind \"" + kind + "\"");
    }

    void check_module(const TestCase& tc) const
    {
        wat::Module m;
        try
        {
            m = tc.module();
        }
        catch (const std::exception& e)
        {
            throw ManifestError(field(tc.binary ? "binary" : "wat"), e.what());
        }
        const auto report = wat::validate_module(m);
        if (!report.valid() && !tc.expects_invalid())
        {
            const auto& v = report.violations.front();
            throw ManifestError(field(tc.binary ? "binary" : "wat"),
                                "invalid module: " + std::string(wat::rule_id(v.rule)) + " " + v.detail);
        }
    }

    const json& j_;
    std::string where_;
    fs::path base_;
};

}  // namespace

std::vector<FixtureEntry> counted_files(const std::string& dir, size_t count, size_t name_length)
{
    std::vector<FixtureEntry> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i)
    {
        auto digits = std::to_string(i);
        std::string name = "f";
        if (name_length > digits.size() + 1)
            name.append(name_length - digits.size() - 1, '0');
        name += digits;
        out.push_back({dir + "/" + name, std::string()});
    }
    return out;
}

std::vector<TestCase> load_manifest(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ManifestError(path.string(), "cannot open manifest");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return {};

    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ManifestError(path.string(), e.what());
    }
    const json* cases = &doc;
    if (doc.is_object())
    {
        if (!doc.contains("cases"))
            throw ManifestError("cases", "required");
        cases = &doc.at("cases");
    }
    if (!cases->is_array())
        throw ManifestError("cases", "expected an array");

    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::vector<TestCase> out;
    std::set<std::string> ids;
    for (size_t i = 0; i < cases->size(); ++i)
    {
        auto tc = CaseReader((*cases)[i], "cases[" + std::to_string(i) + "]", base).read();
        if (!ids.insert(tc.id).second)
            throw DuplicateCaseId(tc.id);
        out.push_back(std::move(tc));
    }
    return out;
}

std::vector<TestCase> merge_cases(std::vector<TestCase> base, const std::vector<TestCase>& extra)
{
    std::set<std::string> ids;
    for (const auto& tc : base)
        ids.insert(tc.id);
    for (const auto& tc : extra)
    {
        if (!ids.insert(tc.id).second)
            throw DuplicateCaseId(tc.id);
        base.push_back(tc);
    }
    return base;
}

}  // namespace sentinel::corpus
