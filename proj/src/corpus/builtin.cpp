// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/corpus/corpus.hpp"

#include <map>
#include <sstream>

namespace sentinel::corpus {

namespace {

using namespace oracle_kind;
using enum Category;
using eval::Value;

const std::map<std::string, std::string, std::less<>>& wasi_signatures()
{
    static const std::map<std::string, std::string, std::less<>> sigs{
        {"fd_write", "(param i32 i32 i32 i32) (result i32)"},
        {"fd_read", "(param i32 i32 i32 i32) (result i32)"},
        {"fd_readdir", "(param i32 i32 i32 i64 i32) (result i32)"},
        {"fd_fdstat_get", "(param i32 i32) (result i32)"},
        {"fd_filestat_get", "(param i32 i32) (result i32)"},
        {"path_rename", "(param i32 i32 i32 i32 i32 i32) (result i32)"},
        {"path_filestat_get", "(param i32 i32 i32 i32 i32) (result i32)"},
        {"clock_time_get", "(param i32 i64 i32) (result i32)"},
        {"poll_oneoff", "(param i32 i32 i32 i32) (result i32)"},
        {"proc_exit", "(param i32)"},
    };
    return sigs;
}

// Scratch layout: iovec at 16, nwritten at 24, digits 33..42, newline 43.
// $print writes a signed i32 and a newline; $write writes (ptr, len) to stdout.
std::string print_helpers()
{
    std::ostringstream w;
    w << "  (func $print (param $v i32) (local $m i32) (local $n i32) (local $s i32)\n"
         "    local.get $v i32.const 0 i32.lt_s local.set $s\n"
         "    i32.const 0 local.get $v i32.sub local.get $v local.get $s select local.set $m\n"
         "    i32.const 1\n";
    uint32_t p = 10;
    for (int i = 1; i <= 9; ++i, p *= 10)
        w << "    local.get $m i32.const " << p << " i32.ge_u i32.add\n";
    w << "    local.set $n\n";
    p = 1;
    for (int i = 0; i <= 9; ++i, p *= 10)
        w << "    i32.const " << (42 - i) << " local.get $m i32.const " << p
          << " i32.div_u i32.const 10 i32.rem_u i32.const 48 i32.add i32.store8\n";
    w << "    i32.const 43 i32.const 10 i32.store8\n"
         "    i32.const 42 local.get $n i32.sub i32.const 45 i32.store8\n"
         "    i32.const 16 i32.const 43 local.get $n i32.sub local.get $s i32.sub i32.store\n"
         "    i32.const 20 local.get $n i32.const 1 i32.add local.get $s i32.add i32.store\n"
         "    i32.const 1 i32.const 16 i32.const 1 i32.const 24 call $fd_write drop)\n"
         "  (func $write (param $ptr i32) (param $len i32)\n"
         "    i32.const 16 local.get $ptr i32.store\n"
         "    i32.const 20 local.get $len i32.store\n"
         "    i32.const 1 i32.const 16 i32.const 1 i32.const 24 call $fd_write drop)\n";
    return w.str();
}

/// A WASI command module: imports, a memory, data strings, the print helpers and `_start`.
struct Command {
    std::vector<std::string> imports{"fd_write"};
    unsigned pages = 1;
    std::string memory_max;  // empty: no max
    std::vector<std::pair<uint32_t, std::string>> data;
    std::string body;  // `_start` body; empty means no `_start` export
    std::string fields;

    std::string build() const
    {
        std::ostringstream w;
        w << "(module\n";
        for (const auto& name : imports)
            w << "  (import \"wasi_snapshot_preview1\" \"" << name << "\" (func $" << name << " "
              << wasi_signatures().at(name) << "))\n";
        w << "  (memory " << pages << (memory_max.empty() ? "" : " " + memory_max) << ")\n"
          << "  (export \"memory\" (memory 0))\n";
        for (const auto& [offset, text] : data)
            w << "  (data (i32.const " << offset << ") \"" << text << "\")\n";
        w << print_helpers() << fields;
        if (!body.empty())
            w << "  (func (export \"_start\")\n" << body << ")\n";
        w << ")\n";
        return w.str();
    }
};

TestCase make(std::string id, Category c, std::string wat, std::vector<OracleSpec> oracles, std::string note)
{
    TestCase tc;
    tc.id = std::move(id);
    tc.category = c;
    tc.wat = std::move(wat);
    tc.oracles = std::move(oracles);
    tc.note = std::move(note);
    return tc;
}

Invoke call(std::string name, std::vector<Value> args = {})
{
    return Invoke{std::move(name), std::move(args)};
}

PathAssertion exists(std::string p)
{
    return {PathAssertion::Kind::Exists, std::move(p), 0};
}

PathAssertion absent(std::string p)
{
    return {PathAssertion::Kind::Absent, std::move(p), 0};
}

std::string large_module(int funcs)
{
    std::ostringstream w;
    w << "(module\n";
    for (int i = 0; i < funcs; ++i)
        w << "  (func $f" << i << " (result i32) i32.const " << i << ")\n";
    w << "  (func (export \"sum\") (result i32)\n    call $f0\n";
    for (int i = 1; i < funcs; ++i)
        w << "    call $f" << i << " i32.add\n";
    w << "  ))\n";
    return w.str();
}

void backend_cases(std::vector<TestCase>& out)
{
    {
        auto tc = make("A2.rotr-zero-amount", A2,
                       "(module\n"
                       "  (func (export \"rotr\") (param i64 i64) (result i64)\n"
                       "    local.get 0\n"
                       "    local.get 1\n"
                       "    i64.rotr))\n",
                       {ExpectedValues{{Value::i64(4)}}, Determinism{}, Differential{}},
                       "i64.rotr by zero must return the operand unchanged on every run");
        tc.invoke = call("rotr", {Value::i64(4), Value::i64(0)});
        tc.repeats = 3;
        out.push_back(std::move(tc));
    }
    {
        // 0x100000001 * 5 + 7
        auto tc = make("A2.i64x2-lowering", A2,
                       "(module\n"
                       "  (func (export \"lanes\") (result i64)\n"
                       "    i64.const 0x100000001\n"
                       "    i64x2.splat\n"
                       "    v128.const i64x2 3 5\n"
                       "    i64x2.mul\n"
                       "    i64.const 7\n"
                       "    i64x2.splat\n"
                       "    i64x2.add\n"
                       "    i64x2.extract_lane 1))\n",
                       {ExpectedValues{{Value::i64(21474836492ull)}}, Differential{}},
                       "i64x2 multiply and add lowered onto 64-bit lanes");
        tc.invoke = call("lanes");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        // lane 2: 0x10001 * 0x10001 wraps to 0x20001
        auto tc = make("A2.i32x4-mul-wrap", A2,
                       "(module\n"
                       "  (func (export \"mul\") (result i32)\n"
                       "    v128.const i32x4 1 2 0x10001 4\n"
                       "    v128.const i32x4 -1 2 0x10001 65536\n"
                       "    i32x4.mul\n"
                       "    i32x4.extract_lane 2))\n",
                       {ExpectedValues{{Value::i32(131073)}}, Differential{}},
                       "i32x4.mul must wrap each lane modulo 2^32");
        tc.invoke = call("mul");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A3.select-v128", A3,
                       "(module\n"
                       "  (func (export \"pick\") (param i32) (result i32)\n"
                       "    v128.const i32x4 1 2 3 4\n"
                       "    v128.const i32x4 5 6 7 8\n"
                       "    local.get 0\n"
                       "    select\n"
                       "    i32x4.extract_lane 3))\n",
                       {ExpectedValues{{Value::i32(8)}}, Differential{}},
                       "select over two v128 operands; native code generation has failed here");
        tc.invoke = call("pick", {Value::i32(0)});
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A3.large-module", A3, large_module(2000), {ExpectedValues{{Value::i32(1999000)}}, Differential{}},
                       "2000 functions summed by one export; stresses whole-module compilation");
        tc.invoke = call("sum");
        tc.timeout = std::chrono::seconds(60);
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A3.f64-div-copysign", A3,
                       "(module\n"
                       "  (func (export \"divsign\") (param f64 f64) (result f64)\n"
                       "    local.get 0\n"
                       "    local.get 1\n"
                       "    f64.div\n"
                       "    f64.const -0\n"
                       "    f64.copysign))\n",
                       {ExpectedValues{{Value::f64(-3.5)}}, Differential{}},
                       "float div and copysign compiled together");
        tc.invoke = call("divsign", {Value::f64(7.0), Value::f64(2.0)});
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A4.extend-low-u", A4,
                       "(module\n"
                       "  (func (export \"widen\") (result i64)\n"
                       "    v128.const i32x4 1 -1 7 9\n"
                       "    i64x2.extend_low_i32x4_u\n"
                       "    i64x2.extract_lane 1))\n",
                       {ExpectedValues{{Value::i64(4294967295ull)}}, Differential{}},
                       "i64x2.extend_low_i32x4_u must zero-extend; register reuse has leaked stale bits");
        tc.invoke = call("widen");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A4.f64x2-replace-lane", A4,
                       "(module\n"
                       "  (func (export \"replace\") (result f64) (local $v v128)\n"
                       "    v128.const f64x2 1.5 2.5\n"
                       "    f64.const 9.25\n"
                       "    f64x2.replace_lane 1\n"
                       "    local.set $v\n"
                       "    local.get $v\n"
                       "    f64x2.extract_lane 0\n"
                       "    local.get $v\n"
                       "    f64x2.extract_lane 1\n"
                       "    f64.add))\n",
                       {ExpectedValues{{Value::f64(10.75)}}, Differential{}},
                       "f64x2.replace_lane then reads of both lanes");
        tc.invoke = call("replace");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_filestat_get"};
        cmd.data = {{256, "sub/file.txt"}};
        cmd.body = "    i32.const 3 i32.const 0 i32.const 256 i32.const 12 i32.const 512 call $path_filestat_get\n"
                   "    call $print\n"
                   "    i32.const 544 i64.load i32.wrap_i64 call $print\n";
        auto tc = make("A5.nested-path", A5, cmd.build(), {ExpectedStdout{"0\n4"}, Differential{}},
                       "stat through a nested relative path; separator handling differs per host OS");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"data/sub/file.txt", "data"}};
        tc.fixture.preopens = {{"data", "/data"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.pages = 16384;
        cmd.body = "    memory.size call $print\n";
        auto tc = make("A5.large-reservation", A5, cmd.build(), {ExpectedStdout{"16384"}, Differential{}},
                       "1 GiB initial linear memory; reservation strategy is OS specific");
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.data = {{1, "\\01\\00\\00\\00\\02\\00\\00\\00\\03\\00\\00\\00\\04\\00\\00\\00"}};
        cmd.body = "    i32.const 0 v128.load offset=1 align=1\n"
                   "    i32x4.extract_lane 3 call $print\n";
        auto tc = make("A7.unaligned-v128-load", A7, cmd.build(), {ExpectedStdout{"4"}, Differential{}},
                       "v128.load at an odd address with align=1");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A7.v128-result", A7,
                       "(module\n"
                       "  (func (export \"vec\") (result v128)\n"
                       "    v128.const i32x4 1 2 3 4))\n",
                       {ExpectedValues{{Value::v128({1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4, 0, 0, 0})}}},
                       "the runtime must be able to return and print a v128 result");
        tc.invoke = call("vec");
        tc.features = {Feature::Simd};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.pages = 0;
        cmd.memory_max = "65536";
        // $print needs scratch memory, so grow first.
        cmd.body = "    i32.const 1 memory.grow drop\n"
                   "    memory.size call $print\n";
        auto tc = make("A8.mem-max-65536", A8, cmd.build(), {ExpectValid{}, ExpectedStdout{"1"}, Differential{}},
                       "maximum of 65536 pages is the largest valid limit (wasmer #2187)");
        out.push_back(std::move(tc));
    }
    {
        auto tc = make("A8.mem-max-65537", A8,
                       "(module\n"
                       "  (memory 0 65537)\n"
                       "  (func (export \"_start\")))\n",
                       {ExpectInvalid{"MEM_MAX_EXCEEDED"}, Differential{}},
                       "a maximum above 65536 pages must be rejected (wasmer #2187)");
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.pages = 65536;
        cmd.body = "    memory.size call $print\n";
        auto tc = make("A8.mem-min-65536", A8, cmd.build(), {ExpectValid{}, ExpectedStdout{"65536"}, Differential{}},
                       "allocate the largest linear memory the validator permits");
        tc.timeout = std::chrono::seconds(30);
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.data = {{256, "ok"}};
        cmd.body = "    i32.const 256 i32.const 2 call $write\n";
        cmd.fields = "  (@custom \"name\" \"\\01\\0b\\01\\00\\08fd_write\")\n"
                     "  (@custom \".debug_abbrev\" \"\\00\")\n"
                     "  (@custom \".debug_info\" \"\\08\\00\\00\\00\\04\\00\\00\\00\\00\\00\\04\\00\")\n";
        auto tc = make("A9.debug-sections", A9, cmd.build(), {ExpectedStdout{"ok"}, Differential{}},
                       "name section plus minimal DWARF custom sections must not disturb loading");
        out.push_back(std::move(tc));
    }
}

void wasi_cases(std::vector<TestCase>& out)
{
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_rename"};
        cmd.data = {{256, "a.txt"}, {272, "b.txt"}};
        cmd.body = "    i32.const 3 i32.const 256 i32.const 5 i32.const 3 i32.const 272 i32.const 5 call $path_rename\n"
                   "    call $print\n";
        auto tc = make("B1.rename", B1, cmd.build(),
                       {ExpectedStdout{"0"}, FilesystemState{{exists("work/b.txt"), absent("work/a.txt")}},
                        Differential{}},
                       "rename a file inside a preopened directory (wasmer #2297)");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"work/a.txt", "hello"}};
        tc.fixture.preopens = {{"work", "/work"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_rename"};
        cmd.data = {{256, "a.txt"}, {272, "b.txt"}};
        cmd.body = "    i32.const 3 i32.const 256 i32.const 5 i32.const 3 i32.const 272 i32.const 5 call $path_rename\n"
                   "    call $print\n";
        auto tc = make("B1.rename-missing", B1, cmd.build(),
                       {ExpectedStdout{"44"}, FilesystemState{{absent("work/b.txt")}}, Differential{}},
                       "renaming a missing file must report ENOENT (44)");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"work", std::nullopt}};
        tc.fixture.preopens = {{"work", "/work"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_rename"};
        cmd.data = {{256, "src/a.txt"}, {272, "dst/a.txt"}};
        cmd.body = "    i32.const 3 i32.const 256 i32.const 9 i32.const 3 i32.const 272 i32.const 9 call $path_rename\n"
                   "    call $print\n";
        auto tc = make("B1.move", B1, cmd.build(),
                       {ExpectedStdout{"0"}, FilesystemState{{exists("work/dst/a.txt"), absent("work/src/a.txt")}},
                        Differential{}},
                       "move a file between sibling directories");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"work/src/a.txt", "moved"}, {"work/dst", std::nullopt}};
        tc.fixture.preopens = {{"work", "/work"}};
        out.push_back(std::move(tc));
    }
    {
        // Each dirent is 24 bytes + a 28-byte name; "." and ".." (if listed) add < 52 bytes,
        // so bufused / 52 is the file count either way.
        Command cmd;
        cmd.imports = {"fd_write", "fd_readdir"};
        cmd.pages = 2;
        cmd.body = "    i32.const 3 i32.const 1024 i32.const 65536 i64.const 0 i32.const 8 call $fd_readdir drop\n"
                   "    i32.const 8 i32.load i32.const 52 i32.div_u call $print\n";
        FilesystemState fsx;
        fsx.assertions.push_back({PathAssertion::Kind::EntryCount, "dir", 203});
        auto tc = make("B1.dir-count", B1, cmd.build(), {ExpectedStdout{"203"}, fsx, Differential{}},
                       "count 203 directory entries with one fd_readdir call; listings have been truncated at 147");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = counted_files("dir", 203, 28);
        tc.fixture.preopens = {{"dir", "/dir"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_filestat_get"};
        cmd.data = {{256, "hello.txt"}};
        cmd.body = "    i32.const 3 i32.const 0 i32.const 256 i32.const 9 i32.const 512 call $path_filestat_get\n"
                   "    call $print\n"
                   "    i32.const 544 i64.load i32.wrap_i64 call $print\n";
        auto tc = make("B1.mapdir", B1, cmd.build(), {ExpectedStdout{"0\n12"}, Differential{}},
                       "host directory mapped under a different guest name");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"host-data/hello.txt", "hello world\n"}};
        tc.fixture.preopens = {{"host-data", "/mapped"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.data = {{256, "ok\\n"}};
        cmd.fields = "  (func $write_unstable (param $ptr i32) (param $len i32)\n"
                     "    i32.const 16 local.get $ptr i32.store\n"
                     "    i32.const 20 local.get $len i32.store\n"
                     "    i32.const 1 i32.const 16 i32.const 1 i32.const 24 call $fd_write_unstable drop)\n";
        cmd.body = "    i32.const 256 i32.const 3 call $write\n"
                   "    i32.const 256 i32.const 3 call $write_unstable\n";
        auto wat = cmd.build();
        // Second WASI namespace; inserted after the first import so imports stay first.
        const std::string second = "  (import \"wasi_unstable\" \"fd_write\" (func $fd_write_unstable "
                                   "(param i32 i32 i32 i32) (result i32)))\n";
        wat.insert(wat.find("  (memory"), second);
        auto tc = make("B2.dual-wasi-import", B2, wat, {ExpectedStdout{"ok\nok"}, Differential{}},
                       "one module importing from both wasi_snapshot_preview1 and wasi_unstable");
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "path_filestat_get"};
        cmd.data = {{256, "data.txt"}, {272, "other.txt"}};
        cmd.body = "    i32.const 3 i32.const 0 i32.const 256 i32.const 8 i32.const 512 call $path_filestat_get\n"
                   "    call $print\n"
                   "    i32.const 544 i64.load i32.wrap_i64 call $print\n"
                   "    i32.const 4 i32.const 0 i32.const 272 i32.const 9 i32.const 512 call $path_filestat_get\n"
                   "    call $print\n"
                   "    i32.const 544 i64.load i32.wrap_i64 call $print\n";
        auto tc = make("B3.preopen-root-and-dot", B3, cmd.build(), {ExpectedStdout{"0\n5\n0\n7"}, Differential{}},
                       "preopened directories named / and ./");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"root-dir/data.txt", "hello"}, {"cwd-dir/other.txt", "welcome"}};
        tc.fixture.preopens = {{"root-dir", "/"}, {"cwd-dir", "./"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "fd_fdstat_get", "fd_filestat_get"};
        cmd.body = "    i32.const 3 i32.const 512 call $fd_fdstat_get call $print\n"
                   "    i32.const 512 i32.load8_u call $print\n"
                   "    i32.const 3 i32.const 600 call $fd_filestat_get drop\n"
                   "    i32.const 616 i32.load8_u call $print\n";
        auto tc = make("B4.fdstat-filetype", B4, cmd.build(), {ExpectedStdout{"0\n3\n3"}, Differential{}},
                       "fdstat and filestat filetype of a preopened directory (3 = directory)");
        tc.features = {Feature::Wasi};
        tc.fixture.tree = {{"work", std::nullopt}};
        tc.fixture.preopens = {{"work", "/work"}};
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.data = {{256, "hello, stdout\\n"}};
        cmd.body = "    i32.const 256 i32.const 14 call $write\n";
        auto tc = make("B4.stdout-write", B4, cmd.build(), {ExpectedStdout{"hello, stdout"}, Differential{}},
                       "plain fd_write to stdout");
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "fd_read"};
        cmd.body = "    i32.const 48 i32.const 512 i32.store\n"
                   "    i32.const 52 i32.const 64 i32.store\n"
                   "    i32.const 0 i32.const 48 i32.const 1 i32.const 8 call $fd_read call $print\n"
                   "    i32.const 8 i32.load call $print\n";
        auto tc = make("B4.stdin-read", B4, cmd.build(), {ExpectedStdout{"0\n3"}, Differential{}},
                       "read three bytes from stdin");
        tc.fixture.stdin_data = "abc";
        out.push_back(std::move(tc));
    }
    {
        Command cmd;
        cmd.imports = {"fd_write", "clock_time_get"};
        cmd.body = "    i32.const 1 i64.const 1 i32.const 512 call $clock_time_get call $print\n"
                   "    i32.const 1 i64.const 1 i32.const 520 call $clock_time_get drop\n"
                   "    i32.const 520 i64.load i32.const 512 i64.load i64.ge_u call $print\n";
        auto tc = make("B5.clock-monotonic", B5, cmd.build(), {ExpectedStdout{"0\n1"}, Differential{}},
                       "monotonic clock never goes backwards");
        out.push_back(std::move(tc));
    }
    {
        // subscription at 512 (userdata, tag, clock id, timeout, precision, flags); event at 640
        Command cmd;
        cmd.imports = {"fd_write", "poll_oneoff"};
        cmd.body = "    i32.const 512 i64.const 42 i64.store\n"
                   "    i32.const 528 i32.const 1 i32.store\n"
                   "    i32.const 536 i64.const 1000000 i64.store\n"
                   "    i32.const 512 i32.const 640 i32.const 1 i32.const 8 call $poll_oneoff call $print\n"
                   "    i32.const 8 i32.load call $print\n"
                   "    i32.const 640 i64.load i32.wrap_i64 call $print\n";
        auto tc = make("B5.poll-clock", B5, cmd.build(), {ExpectedStdout{"0\n1\n42"}, Differential{}},
                       "poll_oneoff with a single 1 ms relative clock subscription");
        out.push_back(std::move(tc));
    }
}

void environment_cases(std::vector<TestCase>& out)
{
    out.push_back(make("C1.empty-module", C1, "(module)\n", {ExpectedStdout{""}, Differential{}},
                       "instantiating an empty module must succeed"));
    {
        Command cmd;
        cmd.data = {{256, "ok"}};
        cmd.body = "    i32.const 256 i32.const 2 call $write\n";
        auto tc = make("C1.repeated-instantiation", C1, cmd.build(), {ExpectedStdout{"ok"}, MemoryLeak{1.0}},
                       "50 back-to-back instantiations; peak memory must stay flat");
        tc.repeats = 50;
        out.push_back(std::move(tc));
    }
    out.push_back(make("C2.global-import-index", C2,
                       "(module\n"
                       "  (import \"env\" \"g\" (global i32))\n"
                       "  (global i32 (global.get 5))\n"
                       "  (func (export \"_start\")))\n",
                       {ExpectInvalid{"INDEX_OUT_OF_BOUNDS"}, Differential{}},
                       "global initializer reads an import index past the imported globals"));
    {
        auto tc = make("C3.custom-import-module", C3,
                       "(module\n"
                       "  (import \"mylib\" \"mylib_add\" (func $add (param i32 i32) (result i32)))\n"
                       "  (func (export \"_start\")\n"
                       "    i32.const 1\n"
                       "    i32.const 2\n"
                       "    call $add\n"
                       "    drop))\n",
                       {ExpectError{"mylib"}, Differential{}},
                       "import from a module other than env; the unresolved import must be named in the error");
        out.push_back(std::move(tc));
    }
    out.push_back(make("C3.wrong-host-signature", C3,
                       "(module\n"
                       "  (import \"wasi_snapshot_preview1\" \"fd_write\" (func $fd_write (param i32) (result i32)))\n"
                       "  (func (export \"_start\")\n"
                       "    i32.const 1\n"
                       "    call $fd_write\n"
                       "    drop))\n",
                       {ExpectError{"fd_write"}, Differential{}},
                       "host function imported with a mismatched signature must be refused"));
    {
        Command cmd;
        cmd.imports = {"proc_exit", "clock_time_get", "fd_write"};
        cmd.data = {{256, "ok"}};
        cmd.body = "    i32.const 256 i32.const 2 call $write\n"
                   "    i32.const 0 call $proc_exit\n";
        out.push_back(make("C3.host-import-order", C3, cmd.build(), {ExpectedStdout{"ok"}, Differential{}},
                           "several host functions imported out of their usual order"));
    }
    {
        Command cmd;
        cmd.body = "    i32.const 2 memory.grow call $print\n"
                   "    memory.size call $print\n";
        out.push_back(make("C4.grow-then-size", C4, cmd.build(), {ExpectedStdout{"1\n3"}, Differential{}},
                           "memory.grow by 2 pages then memory.size"));
    }
    {
        Command cmd;
        cmd.memory_max = "2";
        cmd.body = "    i32.const 5 memory.grow call $print\n"
                   "    memory.size call $print\n";
        out.push_back(make("C4.grow-beyond-max", C4, cmd.build(), {ExpectedStdout{"-1\n1"}, Differential{}},
                           "memory.grow past the declared maximum returns -1 and leaves the size alone"));
    }
    out.push_back(make("C5.unreachable", C5,
                       "(module\n"
                       "  (func (export \"_start\")\n"
                       "    unreachable))\n",
                       {ExpectTrap{"unreachable"}, Differential{}},
                       "the trap report must name unreachable"));
    {
        Command cmd;
        cmd.data = {{256, "entry"}};
        cmd.body = "    i32.const 256 i32.const 5 call $write\n";
        out.push_back(make("C9.start-export", C9, cmd.build(), {ExpectedStdout{"entry"}, Differential{}},
                           "_start is the default entry point"));
    }
    {
        Command cmd;
        cmd.data = {{256, "init"}};
        cmd.fields = "  (func $init\n"
                     "    i32.const 256 i32.const 4 call $write)\n"
                     "  (start $init)\n";
        auto tc = make("C9.start-section", C9, cmd.build(), {ExpectedStdout{"init"}, Differential{}},
                       "start function runs on instantiation without any export");
        tc.features = {Feature::StartSection};
        out.push_back(std::move(tc));
    }
    out.push_back(make("C9.no-entry-point", C9,
                       "(module\n"
                       "  (func (export \"helper\") (result i32)\n"
                       "    i32.const 1))\n",
                       {ExpectedStdout{""}, Differential{}},
                       "a module without an entry point must still be accepted"));
    out.push_back(make("C10.data-segment-oob", C10,
                       "(module\n"
                       "  (memory 1)\n"
                       "  (data (i32.const 65535) \"ab\")\n"
                       "  (func (export \"_start\")))\n",
                       {ExpectError{""}, Differential{}},
                       "data segment past the end of memory: a clean error, not a panic"));
    out.push_back(make("C10.load-oob", C10,
                       "(module\n"
                       "  (memory 1)\n"
                       "  (func (export \"_start\")\n"
                       "    i32.const 65536\n"
                       "    i32.load\n"
                       "    drop))\n",
                       {ExpectTrap{"out of bounds"}, Differential{}},
                       "out-of-bounds load must trap with a report"));
}

}  // namespace

std::vector<TestCase> builtin_corpus()
{
    std::vector<TestCase> out;
    backend_cases(out);
    wasi_cases(out);
    environment_cases(out);
    return out;
}

}  // namespace sentinel::corpus
