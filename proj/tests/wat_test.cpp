// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "module_gen.hpp"

#include "sentinel/wat/leb128.hpp"
#include "sentinel/wat/wat.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace sentinel::wat;

namespace {

Bytes hex(std::initializer_list<int> v)
{
    Bytes b;
    for (int x : v)
        b.push_back(static_cast<uint8_t>(x));
    return b;
}

const Bytes preamble = hex({0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00});

Bytes with_preamble(const Bytes& rest)
{
    Bytes b = preamble;
    b.insert(b.end(), rest.begin(), rest.end());
    return b;
}

// Reference LEB128 by the textbook definition: 7-bit groups, low first.
Bytes reference_uleb(uint64_t v)
{
    Bytes out;
    while (true)
    {
        const uint8_t low = v % 128;
        v /= 128;
        out.push_back(v == 0 ? low : static_cast<uint8_t>(low + 128));
        if (v == 0)
            return out;
    }
}

}  // namespace

TEST(Leb128, DocumentedExample)
{
    Bytes out;
    leb128::write_unsigned(out, 624485);
    EXPECT_EQ(out, hex({0xE5, 0x8E, 0x26}));
}

TEST(Leb128, UnsignedBoundaries)
{
    const uint64_t values[] = {0, 127, 128, 624485, 0xFFFFFFFFull, std::numeric_limits<uint64_t>::max()};
    for (const auto v : values)
    {
        Bytes out;
        leb128::write_unsigned(out, v);
        EXPECT_EQ(out, reference_uleb(v)) << v;
        const auto back = leb128::read_unsigned(out, 64);
        ASSERT_TRUE(back.has_value()) << v;
        EXPECT_EQ(back->value, v);
        EXPECT_EQ(back->length, out.size());
        if (v <= 0xFFFFFFFFull)
        {
            const auto b32 = leb128::read_unsigned(out, 32);
            ASSERT_TRUE(b32.has_value()) << v;
            EXPECT_EQ(b32->value, v);
        }
    }
    Bytes max32;
    leb128::write_unsigned(max32, 0xFFFFFFFFull);
    EXPECT_EQ(max32, hex({0xFF, 0xFF, 0xFF, 0xFF, 0x0F}));
}

TEST(Leb128, SignedBoundaries)
{
    const int64_t values[] = {0,   -1,   63,         64,          -64,         -65,
                              127, -128, INT32_MAX, INT32_MIN, INT64_MAX, INT64_MIN};
    for (const auto v : values)
    {
        Bytes out;
        leb128::write_signed(out, v);
        const auto back = leb128::read_signed(out, 64);
        ASSERT_TRUE(back.has_value()) << v;
        EXPECT_EQ(back->value, v);
        EXPECT_EQ(back->length, out.size());
    }
    Bytes m1;
    leb128::write_signed(m1, -1);
    EXPECT_EQ(m1, hex({0x7F}));
    Bytes p64;
    leb128::write_signed(p64, 64);
    EXPECT_EQ(p64, hex({0xC0, 0x00}));
}

TEST(Leb128, RejectsMalformed)
{
    EXPECT_FALSE(leb128::read_unsigned(hex({0x80}), 32));                          // truncated
    EXPECT_FALSE(leb128::read_unsigned(hex({0xFF, 0xFF, 0xFF, 0xFF, 0x1F}), 32));  // unused bits set
    EXPECT_FALSE(leb128::read_unsigned(hex({0x80, 0x80, 0x80, 0x80, 0x80, 0x00}), 32));  // too long
    EXPECT_FALSE(leb128::read_signed(hex({0xFF, 0xFF, 0xFF, 0xFF, 0x4F}), 32));
}

TEST(Leb128, RandomRoundTrip)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5000; ++i)
    {
        const uint64_t u = rng() >> (rng() % 64);
        Bytes out;
        leb128::write_unsigned(out, u);
        EXPECT_EQ(out, reference_uleb(u));
        EXPECT_EQ(leb128::read_unsigned(out, 64)->value, u);
        const auto s = static_cast<int64_t>(rng()) >> (rng() % 64);
        Bytes so;
        leb128::write_signed(so, s);
        EXPECT_EQ(leb128::read_signed(so, 64)->value, s);
    }
}

TEST(Encoder, SmallestFunctionModule)
{
    const Module m = parse_wat(R"((module (func (export "f") (result i32) i32.const 42)))");
    const Bytes expected = with_preamble(hex({
        0x01, 0x05, 0x01, 0x60, 0x00, 0x01, 0x7F,  // type
        0x03, 0x02, 0x01, 0x00,                    // func
        0x07, 0x05, 0x01, 0x01, 0x66, 0x00, 0x00,  // export "f"
        0x0A, 0x06, 0x01, 0x04, 0x00, 0x41, 0x2A, 0x0B,
    }));
    EXPECT_EQ(encode_module(m), expected);
}

TEST(Encoder, EmptyModuleIsPreambleOnly)
{
    EXPECT_EQ(encode_module(parse_wat("(module)")), preamble);
}

TEST(Encoder, SimdPrefixUsesLebSubOpcode)
{
    const Module m = parse_wat(R"((module (func (param v128 v128) (result v128)
        local.get 0 local.get 1 i32x4.mul)))");
    const Bytes bytes = encode_module(m);
    const Bytes body = hex({0x00, 0x20, 0x00, 0x20, 0x01, 0xFD, 0xB5, 0x01, 0x0B});
    EXPECT_NE(std::search(bytes.begin(), bytes.end(), body.begin(), body.end()), bytes.end());
}

TEST(Encoder, LaneAndConstImmediates)
{
    const Module m = parse_wat(R"((module (func (result i32)
        v128.const i32x4 1 2 3 4 i8x16.extract_lane_s 4)))");
    const Bytes bytes = encode_module(m);
    const Bytes tail = hex({0xFD, 0x0C, 1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4, 0, 0, 0, 0xFD, 0x15, 0x04, 0x0B});
    EXPECT_NE(std::search(bytes.begin(), bytes.end(), tail.begin(), tail.end()), bytes.end());
}

TEST(Encoder, MemoryLimitsAndData)
{
    const Module m = parse_wat(R"((module (memory 1 2) (data (i32.const 8) "hi")))");
    const Bytes expected = with_preamble(hex({
        0x05, 0x04, 0x01, 0x01, 0x01, 0x02,                                // memory min 1 max 2
        0x0B, 0x08, 0x01, 0x00, 0x41, 0x08, 0x0B, 0x02, 'h', 'i',          // data
    }));
    EXPECT_EQ(encode_module(m), expected);
}

TEST(Encoder, RejectsSecondMemory)
{
    Module m;
    m.memories = {Limits{1, {}}, Limits{1, {}}};
    EXPECT_THROW(encode_module(m), EncodeError);
}

TEST(Parser, ResolvesNames)
{
    const Module m = parse_wat(R"((module
        (import "env" "g" (global $g i32))
        (func $a (param $x i32) (result i32) local.get $x global.get $g i32.add)
        (func (export "b") (result i32) i32.const 1 call $a)))");
    ASSERT_EQ(m.funcs.size(), 2u);
    EXPECT_EQ(m.funcs[1].body[1], (Instr{Opcode::Call, Index{0}}));
    EXPECT_EQ(m.funcs[0].body[1], (Instr{Opcode::GlobalGet, Index{0}}));
    ASSERT_NE(m.find_export("b"), nullptr);
}

TEST(Parser, ReportsPosition)
{
    try
    {
        parse_wat("(module\n  (func\n    i32.frobnicate))");
        FAIL() << "expected ParseError";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 5u);
    }
}

TEST(Parser, UnresolvedAndDuplicateNames)
{
    EXPECT_THROW(parse_wat("(module (func call $nope))"), UnresolvedName);
    EXPECT_THROW(parse_wat("(module (func $f) (func $f))"), ParseError);
    EXPECT_THROW(parse_wat("(module (func (param $x i32) (local $x i32)))"), ParseError);
}

TEST(Parser, FloatLiterals)
{
    const Module m = parse_wat(R"((module (func
        f32.const nan f32.const -inf f64.const 0x1p-2 f64.const -0 f32.const nan:0x200000 drop drop drop drop drop)))");
    const auto& b = m.funcs[0].body;
    EXPECT_EQ(std::get<F32Bits>(b[0].imm).bits, 0x7FC00000u);
    EXPECT_EQ(std::get<F32Bits>(b[1].imm).bits, 0xFF800000u);
    EXPECT_EQ(std::get<F64Bits>(b[2].imm).bits, std::bit_cast<uint64_t>(0.25));
    EXPECT_EQ(std::get<F64Bits>(b[3].imm).bits, 0x8000000000000000ull);
    EXPECT_EQ(std::get<F32Bits>(b[4].imm).bits, 0x7FA00000u);
}

TEST(Decoder, ReportsOffsets)
{
    try
    {
        decode_module(hex({0x00, 0x61, 0x73, 0x6E, 0x01, 0x00, 0x00, 0x00}));
        FAIL() << "expected DecodeError";
    }
    catch (const DecodeError& e)
    {
        EXPECT_EQ(e.offset(), 0u);
    }
    Bytes truncated = encode_module(parse_wat(R"((module (func (export "f") (result i32) i32.const 42)))"));
    truncated.pop_back();
    EXPECT_THROW(decode_module(truncated), DecodeError);
}

TEST(Decoder, RejectsUnknownOpcode)
{
    Bytes b = encode_module(parse_wat("(module (func nop))"));
    // body: size 03, locals 00, nop 01, end 0B; replace nop by an opcode outside the subset
    auto it = std::find(b.rbegin(), b.rend(), 0x01);
    *it = 0xFC;
    EXPECT_THROW(decode_module(b), DecodeError);
}

TEST(Validator, MemoryMaximumBoundary)
{
    EXPECT_TRUE(validate_module(parse_wat("(module (memory 0 65536))")).valid());
    const auto r = validate_module(parse_wat("(module (memory 0 65537))"));
    EXPECT_TRUE(r.has(Rule::MemMaxExceeded));
    EXPECT_EQ(rule_id(r.violations.front().rule), "MEM_MAX_EXCEEDED");
    EXPECT_TRUE(validate_module(parse_wat("(module (memory 65536))")).valid());
    EXPECT_TRUE(validate_module(parse_wat("(module (memory 65537))")).has(Rule::MemMinExceeded));
    EXPECT_TRUE(validate_module(parse_wat("(module (memory 3 2))")).has(Rule::LimitsMinAboveMax));
}

TEST(Validator, Rules)
{
    EXPECT_TRUE(validate_module(parse_wat(R"((module (import "env" "g" (global i32)) (global i32 (global.get 5))))"))
                    .has(Rule::IndexOutOfBounds));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func $s (param i32)) (start $s)))")).has(Rule::StartSignature));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func (export "a")) (func (export "a"))))"))
                    .has(Rule::DuplicateExport));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func i32.const 0 i32.load drop)))")).has(Rule::MemoryRequired));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (memory 1) (func i32.const 0 i32.load align=8 drop)))"))
                    .has(Rule::AlignmentTooLarge));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func (result i32) i32.const 0 i32x4.splat i32x4.extract_lane 4)))"))
                    .has(Rule::LaneOutOfRange));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func (result i32) i64.const 1)))")).has(Rule::TypeMismatch));
    EXPECT_TRUE(validate_module(parse_wat(R"((module (func (result i32) i32.const 1 i32.const 2 i32.add)))")).valid());
}

TEST(RoundTrip, ParsedModules)
{
    const char* sources[] = {
        "(module)",
        R"((module (memory 1) (export "memory" (memory 0)) (data (i32.const 0) "\00\01\ff")))",
        R"((module (func $f (param i64 i64) (result i64) local.get 0 local.get 1 i64.rotr) (export "rotr" (func $f))))",
        R"((module (global $g (mut f64) (f64.const 1.5)) (func (result f64) global.get $g)))",
        R"((module (import "wasi_snapshot_preview1" "proc_exit" (func $e (param i32))) (func $s i32.const 0 call $e) (start $s)))",
        R"((module (@custom "name" "\01\02") (func)))",
    };
    for (const auto* src : sources)
    {
        const Module m = parse_wat(src);
        const Bytes b = encode_module(m);
        const Module back = decode_module(b);
        EXPECT_EQ(back, m) << src;
        EXPECT_EQ(encode_module(back), b) << src;
    }
}

TEST(RoundTrip, GeneratedModulesProperty)
{
    std::mt19937_64 rng(20260518);
    size_t checked = 0;
    for (int i = 0; i < 1200; ++i)
    {
        const Module m = sentinel::testing::random_module(rng);
        const Bytes b = encode_module(m);
        const Module back = decode_module(b);
        ASSERT_EQ(back, m) << "module " << i;
        ASSERT_EQ(encode_module(back), b) << "module " << i;
        ++checked;
    }
    EXPECT_GE(checked, 1000u);
}
