// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/report/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <ctime>
#include <sstream>
#include <tuple>

#include <sys/utsname.h>

namespace sentinel::report {

using json = nlohmann::json;
using corpus::info;

namespace {
using enum Category;

// Strategy names with their reported share; most frequent first.
const std::array<FixHint, 30> kHints{{
    {A1, {"use the correct infrastructure version (fixes every A.1 bug)"}},
    {A2,
     {"fix compilation rules (39.6% of backend compilation bugs, 71.4% of A.2)",
      "fix register allocation (16.2% of backend compilation bugs)", "fix data operation (9.0%)",
      "add compilation functionality for SIMD instructions"}},
    {A3,
     {"fix compilation rules (39.6% of backend compilation bugs)",
      "fix register allocation (16.2% of backend compilation bugs)", "fix data operation (9.0%)",
      "add compilation functionality for SIMD instructions"}},
    {A4, {"fix register allocation (16.2% of backend compilation bugs)", "fix compilation rules (39.6%)"}},
    {A5, {"fix data operation (9.0% of backend compilation bugs)", "fix compilation rules (39.6%)"}},
    {A6, {"fix compilation rules (39.6% of backend compilation bugs)", "fix register allocation (16.2%)"}},
    {A7, {"fix data operation (9.0% of backend compilation bugs)"}},
    {A8, {"supplement validation rules (8.1% of backend compilation bugs)"}},
    {A9, {"fix debug information (7.2% of backend compilation bugs, 87.5% of A.9)"}},
    {A10, {"eliminate unreasonable operation (4.5% of backend compilation bugs)"}},
    {B1, {"fix the file operation (35.6% of WASI robustness bugs, every B.1 bug)"}},
    {B2, {"fix WASI import (8.9% of WASI robustness bugs, shared with WASI version fixes)"}},
    {B3, {"supplement features"}},
    {B4, {"fix input and output stream (13.3% of WASI robustness bugs)"}},
    {B5, {"fix the file operation (35.6% of WASI robustness bugs, half of B.5)"}},
    {B6, {"fix WASI version (8.9% of WASI robustness bugs, shared with WASI import fixes)"}},
    {B7, {"fix counterpart error (6.7% of WASI robustness bugs)"}},
    {B8, {"fix clock error (6.7% of WASI robustness bugs)"}},
    {C1,
     {"fix memory allocation, memory leak and memory release (29.4% of runtime environment bugs)",
      "complement unimplemented features (11.8%)"}},
    {C2, {"complement unimplemented features (11.8% of runtime environment bugs)", "fix error message (11.8%)"}},
    {C3,
     {"fix parameters and return values for host functions (25% of C.3)",
      "complement unimplemented features (11.8% of runtime environment bugs)"}},
    {C4,
     {"fix memory allocation, memory leak and memory release (29.4% of runtime environment bugs)",
      "complement unimplemented features (11.8%)"}},
    {C5, {"fix trap issue (7.8% of runtime environment bugs)", "complement unimplemented features (11.8%)"}},
    {C6, {"complement unimplemented features (11.8% of runtime environment bugs)"}},
    {C7, {"fix thread operation (83.3% of C.7)", "complement unimplemented features"}},
    {C8, {"fix stack operation (every C.8 bug)"}},
    {C9, {"fix entry point detecting (2.9% of runtime environment bugs)"}},
    {C10, {"fix error message (11.8% of runtime environment bugs)"}},
    {C11, {"repair data operation (8.9% of runtime environment bugs, every C.11 bug)"}},
    {C12, {"fix error message (11.8% of runtime environment bugs)"}},
}};

int mode_rank(const std::string& m)
{
    if (m == "interpreter")
        return 0;
    if (m == "jit")
        return 1;
    if (m == "aot")
        return 2;
    return 3;
}

void add_mode(std::vector<std::string>& modes, const std::string& m)
{
    if (std::find(modes.begin(), modes.end(), m) != modes.end())
        return;
    modes.push_back(m);
    std::sort(modes.begin(), modes.end(), [](const std::string& a, const std::string& b) {
        return std::make_pair(mode_rank(a), a) < std::make_pair(mode_rank(b), b);
    });
}

bool is_row(Category c)
{
    const auto rows = corpus::detector_categories();
    return std::find(rows.begin(), rows.end(), c) != rows.end();
}

std::string join(const std::vector<std::string>& v, std::string_view sep)
{
    std::string s;
    for (const auto& x : v)
        s += (s.empty() ? "" : std::string(sep)) + x;
    return s;
}

// Markdown-safe inline code.
// Newlines shown as a literal \n so each field stays on one bullet line.
std::string one_line(std::string_view text)
{
    std::string s;
    for (char c : text)
    {
        if (c == '\n')
            s += "\\n";
        else if (c != '\r')
            s += c;
    }
    return s;
}

std::string code_span(std::string_view text)
{
    std::string s = one_line(text);
    std::replace(s.begin(), s.end(), '`', '\'');
    return "`" + s + "`";
}

std::string table_text(std::string_view text)
{
    std::string s;
    for (char c : text)
    {
        if (c == '|')
            s += "\\|";
        else if (c == '\n')
            s += ' ';
        else
            s += c;
    }
    return s;
}

}  // namespace

const FixHint& fix_hint(Category c)
{
    return kHints[static_cast<size_t>(c)];
}

std::string Cell::display() const
{
    if (empty())
        return "-";
    if (bugs > 0)
        return std::to_string(bugs) + (timeouts > 0 ? " [" + std::to_string(timeouts) + " timeout]" : "");
    if (undecided > 0)
        return "?";
    if (passes > 0)
        return "✓";
    return "skip";
}

const Cell& ReportMatrix::cell(Category row, const std::string& column) const
{
    static const Cell none;
    const auto r = cells.find(row);
    if (r == cells.end())
        return none;
    const auto c = r->second.find(column);
    return c == r->second.end() ? none : c->second;
}

std::string host_os()
{
    struct utsname u{};
    if (::uname(&u) != 0)
        return "unknown";
    return std::string(u.sysname) + " " + u.release + " " + u.machine;
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ReportMatrix aggregate(const std::vector<VerdictRecord>& verdicts, Metadata metadata)
{
    ReportMatrix m;
    m.metadata = std::move(metadata);
    for (const auto& r : m.metadata.runtimes)
        m.columns.push_back(r.name);
    for (const auto& v : verdicts)
        if (std::find(m.columns.begin(), m.columns.end(), v.runtime) == m.columns.end())
            m.columns.push_back(v.runtime);
    const auto rows = corpus::detector_categories();
    m.rows.assign(rows.begin(), rows.end());
    for (const auto row : m.rows)
        for (const auto& col : m.columns)
            m.cells[row][col] = Cell{};

    using BugKey = std::tuple<std::string, Category, std::string, VerdictKind, std::string, std::string>;
    std::map<BugKey, size_t> bug_index;
    std::map<std::tuple<std::string, Category, std::string, std::string>, size_t> undecided_index;

    for (const auto& v : verdicts)
    {
        ++m.totals[std::string(oracle::to_string(v.verdict.kind))];
        Cell* cell = is_row(v.category) ? &m.cells[v.category][v.runtime] : nullptr;
        switch (v.verdict.kind)
        {
        case VerdictKind::Pass:
            if (cell != nullptr)
                ++cell->passes;
            break;
        case VerdictKind::Skip:
            if (cell != nullptr)
                ++cell->skips;
            break;
        case VerdictKind::Undecided: {
            const auto key = std::make_tuple(v.case_id, v.category, v.runtime, v.verdict.detail);
            if (const auto it = undecided_index.find(key); it != undecided_index.end())
            {
                add_mode(m.undecided[it->second].modes, v.mode);
                break;
            }
            undecided_index.emplace(key, m.undecided.size());
            m.undecided.push_back({v.case_id, v.category, v.runtime, {v.mode}, v.verdict.detail});
            if (cell != nullptr)
                ++cell->undecided;
            break;
        }
        case VerdictKind::Fail:
        case VerdictKind::Crash:
        case VerdictKind::Timeout: {
            const BugKey key{v.case_id, v.category, v.runtime, v.verdict.kind, v.verdict.rule, v.verdict.detail};
            if (const auto it = bug_index.find(key); it != bug_index.end())
            {
                add_mode(m.failures[it->second].modes, v.mode);
                break;
            }
            bug_index.emplace(key, m.failures.size());
            m.failures.push_back({v.case_id, v.category, v.runtime, {v.mode}, v.verdict.kind, v.verdict.rule,
                                  v.verdict.detail, v.verdict.expected, v.verdict.actual});
            if (cell != nullptr)
            {
                ++cell->bugs;
                if (v.verdict.kind == VerdictKind::Timeout)
                    ++cell->timeouts;
            }
            break;
        }
        }
    }

    const auto col_rank = [&](const std::string& rt) {
        return std::find(m.columns.begin(), m.columns.end(), rt) - m.columns.begin();
    };
    std::sort(m.failures.begin(), m.failures.end(), [&](const FailureRecord& a, const FailureRecord& b) {
        return std::make_tuple(a.category, a.case_id, col_rank(a.runtime), a.kind, a.rule, a.detail) <
               std::make_tuple(b.category, b.case_id, col_rank(b.runtime), b.kind, b.rule, b.detail);
    });
    std::sort(m.undecided.begin(), m.undecided.end(), [&](const UndecidedRecord& a, const UndecidedRecord& b) {
        return std::make_tuple(a.category, a.case_id, col_rank(a.runtime), a.detail) <
               std::make_tuple(b.category, b.case_id, col_rank(b.runtime), b.detail);
    });
    return m;
}

int exit_status(const ReportMatrix& m) noexcept
{
    return m.has_bugs() ? 1 : 0;
}

std::string render_markdown(const ReportMatrix& m)
{
    std::ostringstream o;
    o << "# Sentinel report\n\n";
    o << "- harness: " << m.metadata.harness_version << "\n";
    o << "- os: " << (m.metadata.os.empty() ? "unknown" : m.metadata.os) << "\n";
    o << "- timestamp: " << (m.metadata.timestamp.empty() ? "unknown" : m.metadata.timestamp) << "\n";
    o << "- modes: " << (m.metadata.modes.empty() ? "none" : join(m.metadata.modes, ", ")) << "\n";
    std::vector<std::string> rts;
    for (const auto& r : m.metadata.runtimes)
        rts.push_back(r.name + " " + r.version);
    o << "- runtimes: " << (rts.empty() ? "none" : join(rts, ", ")) << "\n\n";

    o << "## Matrix\n\n";
    o << "| Category |";
    for (const auto& c : m.columns)
        o << " " << table_text(c) << " |";
    o << "\n|---|";
    for (size_t i = 0; i < m.columns.size(); ++i)
        o << "---|";
    o << "\n";
    for (const auto row : m.rows)
    {
        o << "| [" << info(row).code << "] " << info(row).name << " |";
        for (const auto& c : m.columns)
            o << " " << m.cell(row, c).display() << " |";
        o << "\n";
    }
    o << "\n✓ every mode passed; a number counts distinct bugs; ? undecided; skip not applicable; - not run.\n\n";

    o << "## Failures\n\n";
    if (m.failures.empty())
        o << "None.\n\n";
    for (const auto& f : m.failures)
    {
        o << "### " << f.case_id << " on " << f.runtime << " (" << join(f.modes, ", ") << ")\n\n";
        o << "- category: [" << info(f.category).code << "] " << info(f.category).name << "\n";
        o << "- verdict: " << oracle::to_string(f.kind) << (f.rule.empty() ? "" : " (" + f.rule + ")") << "\n";
        if (!f.detail.empty())
            o << "- detail: " << one_line(f.detail) << "\n";
        if (!f.expected.empty())
            o << "- expected: " << code_span(f.expected) << "\n";
        if (!f.actual.empty())
            o << "- actual: " << code_span(f.actual) << "\n";
        o << "- fix hints: " << join(fix_hint(f.category).strategies, "; ") << "\n\n";
    }

    o << "## Undecided\n\n";
    if (m.undecided.empty())
        o << "None.\n\n";
    for (const auto& u : m.undecided)
        o << "- " << u.case_id << " on " << u.runtime << " (" << join(u.modes, ", ") << "): " << one_line(u.detail) << "\n";
    if (!m.undecided.empty())
        o << "\n";

    o << "## Totals\n\n";
    for (auto k : {VerdictKind::Pass, VerdictKind::Fail, VerdictKind::Crash, VerdictKind::Timeout, VerdictKind::Skip,
                   VerdictKind::Undecided})
    {
        const auto it = m.totals.find(std::string(oracle::to_string(k)));
        o << "- " << oracle::to_string(k) << ": " << (it == m.totals.end() ? 0 : it->second) << "\n";
    }
    o << "- distinct bugs: " << m.failures.size() << "\n";
    return o.str();
}

namespace {

json modes_json(const std::vector<std::string>& modes)
{
    json a = json::array();
    for (const auto& x : modes)
        a.push_back(x);
    return a;
}

std::vector<std::string> strings(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw ReportFormatError(where + " must be an array");
    std::vector<std::string> out;
    for (const auto& x : j)
        out.push_back(x.get<std::string>());
    return out;
}

Category category_field(const json& j, const std::string& where)
{
    const auto c = corpus::category_from_code(j.at("category").get<std::string>());
    if (!c)
        throw ReportFormatError(where + ": unknown category " + j.at("category").dump());
    return *c;
}

}  // namespace

std::string render_json(const ReportMatrix& m)
{
    json doc;
    doc["schema"] = schema_id;
    json meta;
    meta["harness_version"] = m.metadata.harness_version;
    meta["os"] = m.metadata.os;
    meta["timestamp"] = m.metadata.timestamp;
    meta["modes"] = modes_json(m.metadata.modes);
    meta["runtimes"] = json::array();
    for (const auto& r : m.metadata.runtimes)
        meta["runtimes"].push_back({{"name", r.name}, {"version", r.version}});
    doc["metadata"] = meta;
    doc["columns"] = modes_json(m.columns);

    doc["matrix"] = json::array();
    for (const auto row : m.rows)
    {
        json r;
        r["category"] = info(row).code;
        r["name"] = info(row).name;
        r["cells"] = json::object();
        for (const auto& c : m.columns)
        {
            const Cell& cell = m.cell(row, c);
            r["cells"][c] = {{"display", cell.display()}, {"pass", cell.pass_mark()}, {"bugs", cell.bugs},
                             {"timeouts", cell.timeouts}, {"passes", cell.passes},  {"skips", cell.skips},
                             {"undecided", cell.undecided}};
        }
        doc["matrix"].push_back(r);
    }

    doc["failures"] = json::array();
    for (const auto& f : m.failures)
    {
        json hints = json::array();
        for (const auto& h : fix_hint(f.category).strategies)
            hints.push_back(h);
        doc["failures"].push_back({{"case", f.case_id},
                                   {"category", info(f.category).code},
                                   {"runtime", f.runtime},
                                   {"modes", modes_json(f.modes)},
                                   {"kind", oracle::to_string(f.kind)},
                                   {"rule", f.rule},
                                   {"detail", f.detail},
                                   {"expected", f.expected},
                                   {"actual", f.actual},
                                   {"hints", hints}});
    }
    doc["undecided"] = json::array();
    for (const auto& u : m.undecided)
        doc["undecided"].push_back({{"case", u.case_id},
                                    {"category", info(u.category).code},
                                    {"runtime", u.runtime},
                                    {"modes", modes_json(u.modes)},
                                    {"detail", u.detail}});
    doc["totals"] = json::object();
    for (const auto& [k, n] : m.totals)
        doc["totals"][k] = n;
    doc["exit_status"] = exit_status(m);
    return doc.dump(2) + "\n";
}

ReportMatrix matrix_from_json(const std::string& text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ReportFormatError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != schema_id)
        throw ReportFormatError("not a " + std::string(schema_id) + " document");
    try
    {
        ReportMatrix m;
        const auto& meta = doc.at("metadata");
        m.metadata.harness_version = meta.at("harness_version").get<std::string>();
        m.metadata.os = meta.at("os").get<std::string>();
        m.metadata.timestamp = meta.at("timestamp").get<std::string>();
        m.metadata.modes = strings(meta.at("modes"), "metadata.modes");
        for (const auto& r : meta.at("runtimes"))
            m.metadata.runtimes.push_back({r.at("name").get<std::string>(), r.at("version").get<std::string>()});
        m.columns = strings(doc.at("columns"), "columns");
        const auto rows = corpus::detector_categories();
        m.rows.assign(rows.begin(), rows.end());
        for (const auto row : m.rows)
            for (const auto& col : m.columns)
                m.cells[row][col] = Cell{};
        for (const auto& r : doc.at("matrix"))
        {
            const Category row = category_field(r, "matrix");
            for (const auto& [col, c] : r.at("cells").items())
            {
                Cell cell;
                cell.bugs = c.at("bugs").get<size_t>();
                cell.timeouts = c.at("timeouts").get<size_t>();
                cell.passes = c.at("passes").get<size_t>();
                cell.skips = c.at("skips").get<size_t>();
                cell.undecided = c.at("undecided").get<size_t>();
                m.cells[row][col] = cell;
            }
        }
        for (const auto& f : doc.at("failures"))
        {
            FailureRecord rec;
            rec.case_id = f.at("case").get<std::string>();
            rec.category = category_field(f, "failures");
            rec.runtime = f.at("runtime").get<std::string>();
            rec.modes = strings(f.at("modes"), "failures.modes");
            const auto kind = oracle::verdict_kind_from_string(f.at("kind").get<std::string>());
            if (!kind)
                throw ReportFormatError("failures: unknown kind " + f.at("kind").dump());
            rec.kind = *kind;
            rec.rule = f.at("rule").get<std::string>();
            rec.detail = f.at("detail").get<std::string>();
            rec.expected = f.at("expected").get<std::string>();
            rec.actual = f.at("actual").get<std::string>();
            m.failures.push_back(std::move(rec));
        }
        for (const auto& u : doc.at("undecided"))
            m.undecided.push_back({u.at("case").get<std::string>(), category_field(u, "undecided"),
                                   u.at("runtime").get<std::string>(), strings(u.at("modes"), "undecided.modes"),
                                   u.at("detail").get<std::string>()});
        for (const auto& [k, n] : doc.at("totals").items())
            m.totals[k] = n.get<size_t>();
        return m;
    }
    catch (const json::exception& e)
    {
        throw ReportFormatError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace sentinel::report
