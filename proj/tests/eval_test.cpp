// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/eval/evaluator.hpp"
#include "sentinel/wat/wat.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

using sentinel::eval::eval_func;
using sentinel::eval::EvalOutcome;
using sentinel::eval::TrapKind;
using sentinel::eval::Value;
using sentinel::wat::parse_wat;

namespace {

// Module with one exported binary function `f` applying `op` to two params of type `t`.
sentinel::wat::Module binop(const std::string& t, const std::string& result, const std::string& op)
{
    return parse_wat("(module (func (export \"f\") (param " + t + " " + t + ") (result " + result +
                     ") local.get 0 local.get 1 " + op + "))");
}

sentinel::wat::Module unop(const std::string& t, const std::string& result, const std::string& op)
{
    return parse_wat("(module (func (export \"f\") (param " + t + ") (result " + result + ") local.get 0 " + op +
                     "))");
}

Value run1(const sentinel::wat::Module& m, std::vector<Value> args)
{
    const EvalOutcome out = eval_func(m, "f", args);
    EXPECT_FALSE(out.trapped());
    EXPECT_EQ(out.results.size(), 1u);
    return out.results.empty() ? Value{} : out.results[0];
}

uint32_t copysign_bits32(uint32_t mag, uint32_t sign)
{
    return (mag & 0x7FFFFFFFu) | (sign & 0x80000000u);
}

uint64_t copysign_bits64(uint64_t mag, uint64_t sign)
{
    return (mag & ~(1ull << 63)) | (sign & (1ull << 63));
}

}  // namespace

TEST(Rotation, RotrByZeroIsIdentity)
{
    const auto m = binop("i32", "i32", "i32.rotr");
    EXPECT_EQ(run1(m, {Value::i32(4), Value::i32(0)}), Value::i32(4));
    const auto m64 = binop("i64", "i64", "i64.rotr");
    EXPECT_EQ(run1(m64, {Value::i64(4), Value::i64(0)}), Value::i64(4));
}

TEST(Rotation, MatchesStandardLibraryRotations)
{
    const auto rotr32 = binop("i32", "i32", "i32.rotr");
    const auto rotl32 = binop("i32", "i32", "i32.rotl");
    const auto rotr64 = binop("i64", "i64", "i64.rotr");
    const auto rotl64 = binop("i64", "i64", "i64.rotl");
    std::mt19937_64 rng(42);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 10000; ++i)
    {
        const auto x = static_cast<uint32_t>(rng());
        const auto k = static_cast<uint32_t>(rng());  // amount taken modulo the width
        ASSERT_EQ(run1(rotr32, {Value::i32(x), Value::i32(k)}).as_u32(), std::rotr(x, static_cast<int>(k % 32)));
        ASSERT_EQ(run1(rotl32, {Value::i32(x), Value::i32(k)}).as_u32(), std::rotl(x, static_cast<int>(k % 32)));
        const uint64_t y = rng();
        const uint64_t j = rng();
        ASSERT_EQ(run1(rotr64, {Value::i64(y), Value::i64(j)}).as_u64(), std::rotr(y, static_cast<int>(j % 64)));
        ASSERT_EQ(run1(rotl64, {Value::i64(y), Value::i64(j)}).as_u64(), std::rotl(y, static_cast<int>(j % 64)));
        // rotr then rotl by the same amount restores the input
        const auto r = run1(rotr32, {Value::i32(x), Value::i32(k)});
        ASSERT_EQ(run1(rotl32, {r, Value::i32(k)}).as_u32(), x);
    }
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(Float, CopysignIsBitExact)
{
    const auto m32 = binop("f32", "f32", "f32.copysign");
    const auto m64 = binop("f64", "f64", "f64.copysign");
    const uint32_t specials32[] = {0, 0x80000000u, 0x3F800000u, 0xBF800000u, 0x7F800000u,
                                   0xFF800000u, 0x7FC00000u, 0xFFC00001u, 0x7FA00000u, 1};
    for (const auto a : specials32)
        for (const auto b : specials32)
            EXPECT_EQ(run1(m32, {Value::f32_bits(a), Value::f32_bits(b)}).f32_bits(), copysign_bits32(a, b));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i)
    {
        const uint64_t a = rng();
        const uint64_t b = rng();
        EXPECT_EQ(run1(m64, {Value::f64_bits(a), Value::f64_bits(b)}).f64_bits(), copysign_bits64(a, b));
    }
}

TEST(Float, SignAndNaNGoldens)
{
    EXPECT_EQ(run1(unop("f32", "f32", "f32.neg"), {Value::f32_bits(0x7FC00000u)}).f32_bits(), 0xFFC00000u);
    EXPECT_EQ(run1(unop("f64", "f64", "f64.abs"), {Value::f64_bits(0xFFF8000000000001ull)}).f64_bits(),
              0x7FF8000000000001ull);
    EXPECT_EQ(run1(binop("f32", "f32", "f32.min"), {Value::f32(-0.0f), Value::f32(0.0f)}).f32_bits(), 0x80000000u);
    EXPECT_EQ(run1(binop("f64", "f64", "f64.max"), {Value::f64(-0.0), Value::f64(0.0)}).f64_bits(), 0u);
    EXPECT_TRUE(run1(binop("f32", "f32", "f32.min"), {Value::f32(1.0f), Value::f32(NAN)}).is_nan());
    EXPECT_EQ(run1(unop("f64", "f64", "f64.nearest"), {Value::f64(2.5)}), Value::f64(2.0));
    EXPECT_EQ(run1(unop("f64", "f64", "f64.nearest"), {Value::f64(-0.5)}).f64_bits(), 0x8000000000000000ull);
    EXPECT_EQ(run1(unop("f32", "f32", "f32.sqrt"), {Value::f32(-0.0f)}).f32_bits(), 0x80000000u);
    EXPECT_EQ(run1(unop("i64", "f32", "f32.convert_i64_u"), {Value::i64(~0ull)}), Value::f32(18446744073709551616.0f));
    EXPECT_EQ(run1(unop("i32", "f64", "f64.convert_i32_s"), {Value::i32(0x80000000u)}), Value::f64(-2147483648.0));
    EXPECT_EQ(run1(binop("f64", "f64", "f64.div"), {Value::f64(1.0), Value::f64(-0.0)}),
              Value::f64(-std::numeric_limits<double>::infinity()));
}

TEST(Integer, DivisionGoldensAndTraps)
{
    const auto div_s = binop("i32", "i32", "i32.div_s");
    const auto div_u = binop("i32", "i32", "i32.div_u");
    const auto rem_s = binop("i32", "i32", "i32.rem_s");
    EXPECT_EQ(run1(div_s, {Value::i32(static_cast<uint32_t>(-7)), Value::i32(2)}).as_i32(), -3);
    EXPECT_EQ(run1(div_u, {Value::i32(static_cast<uint32_t>(-7)), Value::i32(2)}).as_u32(), 0x7FFFFFFCu);
    EXPECT_EQ(run1(rem_s, {Value::i32(static_cast<uint32_t>(-7)), Value::i32(2)}).as_i32(), -1);
    EXPECT_EQ(run1(rem_s, {Value::i32(0x80000000u), Value::i32(~0u)}).as_i32(), 0);

    auto out = eval_func(div_s, "f", std::vector<Value>{Value::i32(0x80000000u), Value::i32(~0u)});
    ASSERT_TRUE(out.trapped());
    EXPECT_EQ(*out.trap, TrapKind::IntegerOverflow);
    out = eval_func(div_u, "f", std::vector<Value>{Value::i32(1), Value::i32(0)});
    ASSERT_TRUE(out.trapped());
    EXPECT_EQ(*out.trap, TrapKind::IntegerDivideByZero);
    out = eval_func(binop("i64", "i64", "i64.rem_u"), "f", std::vector<Value>{Value::i64(1), Value::i64(0)});
    ASSERT_TRUE(out.trapped());
    EXPECT_EQ(*out.trap, TrapKind::IntegerDivideByZero);
    out = eval_func(parse_wat(R"((module (func (export "f") (result i32) unreachable)))"), "f", {});
    ASSERT_TRUE(out.trapped());
    EXPECT_EQ(*out.trap, TrapKind::Unreachable);
}

TEST(Integer, MatchesHostArithmetic)
{
    const auto add = binop("i64", "i64", "i64.add");
    const auto shr_s = binop("i32", "i32", "i32.shr_s");
    const auto clz = unop("i64", "i64", "i64.clz");
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i)
    {
        const uint64_t a = rng();
        const uint64_t b = rng();
        ASSERT_EQ(run1(add, {Value::i64(a), Value::i64(b)}).as_u64(), a + b);
        const auto x = static_cast<int32_t>(a);
        const auto k = static_cast<uint32_t>(b);
        ASSERT_EQ(run1(shr_s, {Value::i32(static_cast<uint32_t>(x)), Value::i32(k)}).as_i32(), x >> (k % 32));
        ASSERT_EQ(run1(clz, {Value::i64(a >> (b % 64))}).as_u64(), static_cast<uint64_t>(std::countl_zero(a >> (b % 64))));
    }
}

TEST(Simd, LaneOperations)
{
    const auto m = parse_wat(R"((module (func (export "f") (result i32)
        i32.const -2 i32x4.splat i32.const 3 i32x4.splat i32x4.mul i32x4.extract_lane 1)))");
    EXPECT_EQ(run1(m, {}).as_i32(), -6);
    const auto ext = parse_wat(R"((module (func (export "f") (result i32)
        v128.const i8x16 -1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16 i8x16.extract_lane_u 0)))");
    EXPECT_EQ(run1(ext, {}).as_i32(), 255);
    const auto widen = parse_wat(R"((module (func (export "f") (result i64)
        v128.const i32x4 -1 5 6 7 i64x2.extend_low_i32x4_u i64x2.extract_lane 0)))");
    EXPECT_EQ(run1(widen, {}).as_u64(), 0xFFFFFFFFull);
}

TEST(Calls, GlobalsLocalsAndCalls)
{
    const auto m = parse_wat(R"((module
        (global $g (mut i32) (i32.const 10))
        (func $sq (param i32) (result i32) local.get 0 local.get 0 i32.mul)
        (func (export "f") (param i32) (result i32) (local i32)
          local.get 0 call $sq local.set 1
          local.get 1 global.get $g i32.add global.set $g
          global.get $g)))");
    EXPECT_EQ(run1(m, {Value::i32(5)}).as_i32(), 35);
}

TEST(Errors, SignatureAndUnsupported)
{
    const auto m = binop("i32", "i32", "i32.add");
    EXPECT_THROW(eval_func(m, "f", std::vector<Value>{Value::i32(1)}), sentinel::eval::SignatureMismatch);
    EXPECT_THROW(eval_func(m, "f", std::vector<Value>{Value::i32(1), Value::i64(1)}), sentinel::eval::SignatureMismatch);
    EXPECT_THROW(eval_func(m, "missing", std::vector<Value>{}), sentinel::eval::EvalError);
    const auto mem = parse_wat(R"((module (memory 1) (func (export "f") (result i32) i32.const 0 i32.load)))");
    EXPECT_FALSE(sentinel::eval::is_evaluable(mem, "f"));
    EXPECT_THROW(eval_func(mem, "f", {}), sentinel::eval::UnsupportedInstr);
    EXPECT_TRUE(sentinel::eval::is_evaluable(m, "f"));
}

TEST(Values, Rendering)
{
    EXPECT_EQ(Value::i32(0xFFFFFFFFu).to_string(), "-1");
    EXPECT_EQ(Value::f64(0.1).to_string(), "0.1");
    EXPECT_EQ(Value::f32_bits(0x7FC00000u).to_string(), "nan");
    EXPECT_TRUE(Value::f32_bits(0x7FC00000u).same_class(Value::f32_bits(0xFFC00001u)));
    EXPECT_FALSE(Value::f32_bits(0x7FC00000u).same_class(Value::f64_bits(0x7FF8000000000000ull)));
}
