// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/eval/evaluator.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace sentinel::eval {

std::string_view to_string(TrapKind kind) noexcept
{
    switch (kind)
    {
    case TrapKind::Unreachable:
        return "unreachable";
    case TrapKind::IntegerDivideByZero:
        return "integer divide by zero";
    case TrapKind::IntegerOverflow:
        return "integer overflow";
    }
    return "trap";
}

namespace {

using wat::Instr;
using wat::Opcode;

struct Trap {
    TrapKind kind;
};

template <typename F>
F wasm_min(F a, F b)
{
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<F>::quiet_NaN();
    if (a == 0 && b == 0)
        return std::signbit(a) ? a : b;
    return a < b ? a : b;
}

template <typename F>
F wasm_max(F a, F b)
{
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<F>::quiet_NaN();
    if (a == 0 && b == 0)
        return std::signbit(a) ? b : a;
    return a > b ? a : b;
}

template <typename F>
F wasm_nearest(F v)
{
    // Round half to even regardless of the current rounding mode.
    if (std::isnan(v) || std::isinf(v))
        return v;
    const F r = std::round(v);
    if (std::fabs(v - std::trunc(v)) == F(0.5))
    {
        const F half = r / 2;
        if (half != std::trunc(half))
            return std::copysign(r - std::copysign(F(1), v), v);
    }
    return std::copysign(r, v);
}

template <typename S>
S div_s(S a, S b)
{
    if (b == 0)
        throw Trap{TrapKind::IntegerDivideByZero};
    if (a == std::numeric_limits<S>::min() && b == -1)
        throw Trap{TrapKind::IntegerOverflow};
    return a / b;
}

template <typename S>
S rem_s(S a, S b)
{
    if (b == 0)
        throw Trap{TrapKind::IntegerDivideByZero};
    if (b == -1)
        return 0;
    return a % b;
}

template <typename U>
U div_u(U a, U b)
{
    if (b == 0)
        throw Trap{TrapKind::IntegerDivideByZero};
    return a / b;
}

template <typename U>
U rem_u(U a, U b)
{
    if (b == 0)
        throw Trap{TrapKind::IntegerDivideByZero};
    return a % b;
}

uint32_t f32_copysign(uint32_t a, uint32_t b)
{
    return (a & 0x7FFFFFFFu) | (b & 0x80000000u);
}

uint64_t f64_copysign(uint64_t a, uint64_t b)
{
    return (a & 0x7FFFFFFFFFFFFFFFull) | (b & 0x8000000000000000ull);
}

bool is_simd(Opcode op)
{
    return wat::op_info(op).prefix == 0xFD;
}

template <typename T, unsigned N, typename Fn>
V128 lanewise(const V128& a, const V128& b, Fn fn)
{
    V128 out{};
    for (unsigned i = 0; i < N; ++i)
        set_lane<T>(out, i, fn(lane<T>(a, i), lane<T>(b, i)));
    return out;
}

template <typename Wide, typename Narrow, unsigned N>
V128 extend(const V128& a, unsigned first)
{
    V128 out{};
    for (unsigned i = 0; i < N; ++i)
        set_lane<Wide>(out, i, static_cast<Wide>(lane<Narrow>(a, first + i)));
    return out;
}

const V128& v128_of(std::span<const Value> in, size_t i)
{
    return in[i].as_v128();
}

/// Scalar (non-SIMD) numeric instruction on popped operands.
Value scalar_op(Opcode op, std::span<const Value> in)
{
    using O = Opcode;
    const auto a32 = [&] { return in[0].as_u32(); };
    const auto b32 = [&] { return in[1].as_u32(); };
    const auto a64 = [&] { return in[0].as_u64(); };
    const auto b64 = [&] { return in[1].as_u64(); };
    const auto fa = [&] { return in[0].as_f32(); };
    const auto fb = [&] { return in[1].as_f32(); };
    const auto da = [&] { return in[0].as_f64(); };
    const auto db = [&] { return in[1].as_f64(); };
    const auto b = [](bool v) { return Value::i32(v ? 1u : 0u); };

    switch (op)
    {
    case O::I32Eqz:
        return b(a32() == 0);
    case O::I32Eq:
        return b(a32() == b32());
    case O::I32Ne:
        return b(a32() != b32());
    case O::I32LtS:
        return b(in[0].as_i32() < in[1].as_i32());
    case O::I32LtU:
        return b(a32() < b32());
    case O::I32GtS:
        return b(in[0].as_i32() > in[1].as_i32());
    case O::I32GtU:
        return b(a32() > b32());
    case O::I32LeS:
        return b(in[0].as_i32() <= in[1].as_i32());
    case O::I32LeU:
        return b(a32() <= b32());
    case O::I32GeS:
        return b(in[0].as_i32() >= in[1].as_i32());
    case O::I32GeU:
        return b(a32() >= b32());
    case O::I64Eqz:
        return b(a64() == 0);
    case O::I64Eq:
        return b(a64() == b64());
    case O::I64Ne:
        return b(a64() != b64());
    case O::I64LtS:
        return b(in[0].as_i64() < in[1].as_i64());
    case O::I64LtU:
        return b(a64() < b64());
    case O::I64GtS:
        return b(in[0].as_i64() > in[1].as_i64());
    case O::I64GtU:
        return b(a64() > b64());
    case O::I64LeS:
        return b(in[0].as_i64() <= in[1].as_i64());
    case O::I64LeU:
        return b(a64() <= b64());
    case O::I64GeS:
        return b(in[0].as_i64() >= in[1].as_i64());
    case O::I64GeU:
        return b(a64() >= b64());
    case O::F32Eq:
        return b(fa() == fb());
    case O::F32Ne:
        return b(fa() != fb());
    case O::F32Lt:
        return b(fa() < fb());
    case O::F32Gt:
        return b(fa() > fb());
    case O::F32Le:
        return b(fa() <= fb());
    case O::F32Ge:
        return b(fa() >= fb());
    case O::F64Eq:
        return b(da() == db());
    case O::F64Ne:
        return b(da() != db());
    case O::F64Lt:
        return b(da() < db());
    case O::F64Gt:
        return b(da() > db());
    case O::F64Le:
        return b(da() <= db());
    case O::F64Ge:
        return b(da() >= db());

    case O::I32Clz:
        return Value::i32(static_cast<uint32_t>(std::countl_zero(a32())));
    case O::I32Ctz:
        return Value::i32(static_cast<uint32_t>(std::countr_zero(a32())));
    case O::I32Popcnt:
        return Value::i32(static_cast<uint32_t>(std::popcount(a32())));
    case O::I32Add:
        return Value::i32(a32() + b32());
    case O::I32Sub:
        return Value::i32(a32() - b32());
    case O::I32Mul:
        return Value::i32(a32() * b32());
    case O::I32DivS:
        return Value::i32(static_cast<uint32_t>(div_s(in[0].as_i32(), in[1].as_i32())));
    case O::I32DivU:
        return Value::i32(div_u(a32(), b32()));
    case O::I32RemS:
        return Value::i32(static_cast<uint32_t>(rem_s(in[0].as_i32(), in[1].as_i32())));
    case O::I32RemU:
        return Value::i32(rem_u(a32(), b32()));
    case O::I32And:
        return Value::i32(a32() & b32());
    case O::I32Or:
        return Value::i32(a32() | b32());
    case O::I32Xor:
        return Value::i32(a32() ^ b32());
    case O::I32Shl:
        return Value::i32(a32() << (b32() & 31));
    case O::I32ShrS:
        return Value::i32(static_cast<uint32_t>(in[0].as_i32() >> (b32() & 31)));
    case O::I32ShrU:
        return Value::i32(a32() >> (b32() & 31));
    case O::I32Rotl:
        return Value::i32(std::rotl(a32(), static_cast<int>(b32() & 31)));
    case O::I32Rotr:
        return Value::i32(std::rotr(a32(), static_cast<int>(b32() & 31)));

    case O::I64Clz:
        return Value::i64(static_cast<uint64_t>(std::countl_zero(a64())));
    case O::I64Ctz:
        return Value::i64(static_cast<uint64_t>(std::countr_zero(a64())));
    case O::I64Popcnt:
        return Value::i64(static_cast<uint64_t>(std::popcount(a64())));
    case O::I64Add:
        return Value::i64(a64() + b64());
    case O::I64Sub:
        return Value::i64(a64() - b64());
    case O::I64Mul:
        return Value::i64(a64() * b64());
    case O::I64DivS:
        return Value::i64(static_cast<uint64_t>(div_s(in[0].as_i64(), in[1].as_i64())));
    case O::I64DivU:
        return Value::i64(div_u(a64(), b64()));
    case O::I64RemS:
        return Value::i64(static_cast<uint64_t>(rem_s(in[0].as_i64(), in[1].as_i64())));
    case O::I64RemU:
        return Value::i64(rem_u(a64(), b64()));
    case O::I64And:
        return Value::i64(a64() & b64());
    case O::I64Or:
        return Value::i64(a64() | b64());
    case O::I64Xor:
        return Value::i64(a64() ^ b64());
    case O::I64Shl:
        return Value::i64(a64() << (b64() & 63));
    case O::I64ShrS:
        return Value::i64(static_cast<uint64_t>(in[0].as_i64() >> (b64() & 63)));
    case O::I64ShrU:
        return Value::i64(a64() >> (b64() & 63));
    case O::I64Rotl:
        return Value::i64(std::rotl(a64(), static_cast<int>(b64() & 63)));
    case O::I64Rotr:
        return Value::i64(std::rotr(a64(), static_cast<int>(b64() & 63)));

    case O::F32Abs:
        return Value::f32_bits(in[0].f32_bits() & 0x7FFFFFFFu);
    case O::F32Neg:
        return Value::f32_bits(in[0].f32_bits() ^ 0x80000000u);
    case O::F32Ceil:
        return Value::f32(std::ceil(fa()));
    case O::F32Floor:
        return Value::f32(std::floor(fa()));
    case O::F32Trunc:
        return Value::f32(std::trunc(fa()));
    case O::F32Nearest:
        return Value::f32(wasm_nearest(fa()));
    case O::F32Sqrt:
        return Value::f32(std::sqrt(fa()));
    case O::F32Add:
        return Value::f32(fa() + fb());
    case O::F32Sub:
        return Value::f32(fa() - fb());
    case O::F32Mul:
        return Value::f32(fa() * fb());
    case O::F32Div:
        return Value::f32(fa() / fb());
    case O::F32Min:
        return Value::f32(wasm_min(fa(), fb()));
    case O::F32Max:
        return Value::f32(wasm_max(fa(), fb()));
    case O::F32Copysign:
        return Value::f32_bits(f32_copysign(in[0].f32_bits(), in[1].f32_bits()));

    case O::F64Abs:
        return Value::f64_bits(in[0].f64_bits() & 0x7FFFFFFFFFFFFFFFull);
    case O::F64Neg:
        return Value::f64_bits(in[0].f64_bits() ^ 0x8000000000000000ull);
    case O::F64Ceil:
        return Value::f64(std::ceil(da()));
    case O::F64Floor:
        return Value::f64(std::floor(da()));
    case O::F64Trunc:
        return Value::f64(std::trunc(da()));
    case O::F64Nearest:
        return Value::f64(wasm_nearest(da()));
    case O::F64Sqrt:
        return Value::f64(std::sqrt(da()));
    case O::F64Add:
        return Value::f64(da() + db());
    case O::F64Sub:
        return Value::f64(da() - db());
    case O::F64Mul:
        return Value::f64(da() * db());
    case O::F64Div:
        return Value::f64(da() / db());
    case O::F64Min:
        return Value::f64(wasm_min(da(), db()));
    case O::F64Max:
        return Value::f64(wasm_max(da(), db()));
    case O::F64Copysign:
        return Value::f64_bits(f64_copysign(in[0].f64_bits(), in[1].f64_bits()));

    case O::I32WrapI64:
        return Value::i32(static_cast<uint32_t>(a64()));
    case O::I64ExtendI32S:
        return Value::i64(static_cast<uint64_t>(static_cast<int64_t>(in[0].as_i32())));
    case O::I64ExtendI32U:
        return Value::i64(a32());
    case O::F32ConvertI32S:
        return Value::f32(static_cast<float>(in[0].as_i32()));
    case O::F32ConvertI32U:
        return Value::f32(static_cast<float>(a32()));
    case O::F32ConvertI64S:
        return Value::f32(static_cast<float>(in[0].as_i64()));
    case O::F32ConvertI64U:
        return Value::f32(static_cast<float>(a64()));
    case O::F32DemoteF64:
        return Value::f32(static_cast<float>(da()));
    case O::F64ConvertI32S:
        return Value::f64(static_cast<double>(in[0].as_i32()));
    case O::F64ConvertI32U:
        return Value::f64(static_cast<double>(a32()));
    case O::F64ConvertI64S:
        return Value::f64(static_cast<double>(in[0].as_i64()));
    case O::F64ConvertI64U:
        return Value::f64(static_cast<double>(a64()));
    case O::F64PromoteF32:
        return Value::f64(static_cast<double>(fa()));
    case O::I32ReinterpretF32:
        return Value::i32(in[0].f32_bits());
    case O::I64ReinterpretF64:
        return Value::i64(in[0].f64_bits());
    case O::F32ReinterpretI32:
        return Value::f32_bits(a32());
    case O::F64ReinterpretI64:
        return Value::f64_bits(a64());
    default:
        throw UnsupportedInstr("instruction " + std::string(wat::op_info(op).name) + " is not evaluable");
    }
}

/// Operand count of each evaluable instruction (lane ops included).
size_t arity(Opcode op)
{
    using O = Opcode;
    switch (op)
    {
    case O::I32Const:
    case O::I64Const:
    case O::F32Const:
    case O::F64Const:
    case O::V128Const:
        return 0;
    case O::V128Bitselect:
        return 3;
    case O::I8x16ReplaceLane:
    case O::I16x8ReplaceLane:
    case O::I32x4ReplaceLane:
    case O::I64x2ReplaceLane:
    case O::F32x4ReplaceLane:
    case O::F64x2ReplaceLane:
        return 2;
    default:
        break;
    }
    const auto& info = wat::op_info(op);
    if (info.imm == wat::ImmKind::Lane)
        return 1;
    switch (op)
    {
    case O::I32Eqz:
    case O::I64Eqz:
    case O::I8x16Splat:
    case O::I16x8Splat:
    case O::I32x4Splat:
    case O::I64x2Splat:
    case O::F32x4Splat:
    case O::F64x2Splat:
    case O::V128Not:
    case O::V128AnyTrue:
    case O::I32x4ExtendLowI16x8S:
    case O::I32x4ExtendHighI16x8S:
    case O::I32x4ExtendLowI16x8U:
    case O::I32x4ExtendHighI16x8U:
    case O::I64x2ExtendLowI32x4S:
    case O::I64x2ExtendHighI32x4S:
    case O::I64x2ExtendLowI32x4U:
    case O::I64x2ExtendHighI32x4U:
        return 1;
    default:
        break;
    }
    const uint32_t c = info.code;
    if (info.prefix == 0xFD)
        return 2;
    if ((c >= 0x67 && c <= 0x69) || (c >= 0x79 && c <= 0x7B) || (c >= 0x8B && c <= 0x91) ||
        (c >= 0x99 && c <= 0x9F) || (c >= 0xA7 && c <= 0xBF))
        return 1;
    return 2;
}

class Machine
{
public:
    explicit Machine(const wat::Module& m) : m_{m}
    {
        for (const auto& imp : m.imports)
            if (std::holds_alternative<wat::GlobalType>(imp.desc))
                imported_globals_ = true;
        for (const auto& g : m.globals)
            globals_.push_back(const_value(g.init));
    }

    std::vector<Value> call(uint32_t func_index, std::vector<Value> args, unsigned depth)
    {
        if (depth > 256)
            throw UnsupportedInstr("call depth exceeds evaluator limit");
        const uint32_t imported = m_.imported_func_count();
        if (func_index < imported)
            throw UnsupportedInstr("call to imported function " + std::to_string(func_index));
        const wat::FuncDef& f = m_.funcs.at(func_index - imported);

        std::vector<Value> locals = std::move(args);
        for (const auto t : f.locals)
            locals.push_back(zero(t));

        std::vector<Value> stack;
        const auto pop = [&] {
            Value v = stack.back();
            stack.pop_back();
            return v;
        };

        for (const Instr& instr : f.body)
        {
            switch (instr.op)
            {
            case Opcode::Nop:
                break;
            case Opcode::Unreachable:
                throw Trap{TrapKind::Unreachable};
            case Opcode::Return:
                return take_results(stack, f.results.size());
            case Opcode::Drop:
                pop();
                break;
            case Opcode::Select: {
                const uint32_t cond = pop().as_u32();
                const Value b = pop();
                const Value a = pop();
                stack.push_back(cond != 0 ? a : b);
                break;
            }
            case Opcode::LocalGet:
                stack.push_back(locals.at(std::get<wat::Index>(instr.imm).value));
                break;
            case Opcode::LocalSet:
                locals.at(std::get<wat::Index>(instr.imm).value) = pop();
                break;
            case Opcode::LocalTee:
                locals.at(std::get<wat::Index>(instr.imm).value) = stack.back();
                break;
            case Opcode::GlobalGet:
                stack.push_back(global_ref(std::get<wat::Index>(instr.imm).value));
                break;
            case Opcode::GlobalSet:
                global_ref(std::get<wat::Index>(instr.imm).value) = pop();
                break;
            case Opcode::Call: {
                const uint32_t idx = std::get<wat::Index>(instr.imm).value;
                const auto sig = m_.func_signature(idx);
                if (!sig)
                    throw SignatureMismatch("call to missing function");
                std::vector<Value> call_args(stack.end() - static_cast<ptrdiff_t>(sig->params.size()), stack.end());
                stack.resize(stack.size() - sig->params.size());
                auto results = call(idx, std::move(call_args), depth + 1);
                stack.insert(stack.end(), results.begin(), results.end());
                break;
            }
            case Opcode::I32Const:
            case Opcode::I64Const:
            case Opcode::F32Const:
            case Opcode::F64Const:
            case Opcode::V128Const:
                stack.push_back(const_value(instr));
                break;
            default: {
                const auto& info = wat::op_info(instr.op);
                if (info.imm == wat::ImmKind::MemArg || info.imm == wat::ImmKind::MemoryZero)
                    throw UnsupportedInstr(std::string(info.name) + " needs linear memory");
                const size_t n = arity(instr.op);
                if (stack.size() < n)
                    throw SignatureMismatch("operand stack underflow at " + std::string(info.name));
                std::vector<Value> in(stack.end() - static_cast<ptrdiff_t>(n), stack.end());
                stack.resize(stack.size() - n);
                stack.push_back(is_simd(instr.op) ? eval_lane_op(instr, in) : scalar_op(instr.op, in));
                break;
            }
            }
        }
        return take_results(stack, f.results.size());
    }

private:
    static Value zero(wat::ValType t)
    {
        switch (t)
        {
        case wat::ValType::I32:
            return Value::i32(0);
        case wat::ValType::I64:
            return Value::i64(0);
        case wat::ValType::F32:
            return Value::f32_bits(0);
        case wat::ValType::F64:
            return Value::f64_bits(0);
        case wat::ValType::V128:
            return Value::v128({});
        }
        return {};
    }

    Value const_value(const Instr& instr) const
    {
        switch (instr.op)
        {
        case Opcode::I32Const:
            return Value::i32(static_cast<uint32_t>(std::get<int32_t>(instr.imm)));
        case Opcode::I64Const:
            return Value::i64(static_cast<uint64_t>(std::get<int64_t>(instr.imm)));
        case Opcode::F32Const:
            return Value::f32_bits(std::get<wat::F32Bits>(instr.imm).bits);
        case Opcode::F64Const:
            return Value::f64_bits(std::get<wat::F64Bits>(instr.imm).bits);
        case Opcode::V128Const:
            return Value::v128(std::get<wat::V128Bytes>(instr.imm).bytes);
        default:
            return Value::i32(0);  // imported-global initialisers are rejected on access
        }
    }

    Value& global_ref(uint32_t index)
    {
        const uint32_t imported = m_.imported_global_count();
        if (index < imported || imported_globals_)
            throw UnsupportedInstr("imported globals are host state");
        return globals_.at(index - imported);
    }

    static std::vector<Value> take_results(std::vector<Value>& stack, size_t n)
    {
        if (stack.size() < n)
            throw SignatureMismatch("missing results");
        return std::vector<Value>(stack.end() - static_cast<ptrdiff_t>(n), stack.end());
    }

    const wat::Module& m_;
    std::vector<Value> globals_;
    bool imported_globals_ = false;
};

void check_reachable(const wat::Module& m, uint32_t func_index, std::vector<bool>& seen)
{
    const uint32_t imported = m.imported_func_count();
    if (func_index < imported)
        throw UnsupportedInstr("call to imported function");
    const uint32_t local = func_index - imported;
    if (local >= m.funcs.size())
        throw SignatureMismatch("call to missing function");
    if (seen[local])
        return;
    seen[local] = true;
    for (const auto& instr : m.funcs[local].body)
    {
        const auto& info = wat::op_info(instr.op);
        if (info.imm == wat::ImmKind::MemArg || info.imm == wat::ImmKind::MemoryZero)
            throw UnsupportedInstr(std::string(info.name) + " needs linear memory");
        if (instr.op == Opcode::GlobalGet || instr.op == Opcode::GlobalSet)
        {
            if (m.imported_global_count() > 0)
                throw UnsupportedInstr("imported globals are host state");
        }
        if (instr.op == Opcode::Call)
            check_reachable(m, std::get<wat::Index>(instr.imm).value, seen);
    }
}

uint32_t resolve_export(const wat::Module& m, std::string_view name)
{
    const auto* e = m.find_export(name);
    if (e == nullptr || e->kind != wat::ExternKind::Func)
        throw SignatureMismatch("no exported function \"" + std::string(name) + "\"");
    return e->index;
}

}  // namespace

Value eval_lane_op(const Instr& instr, std::span<const Value> in)
{
    using O = Opcode;
    const unsigned lanes = wat::lane_count(instr.op);
    unsigned lane_index = 0;
    if (lanes != 0)
    {
        lane_index = std::get<wat::LaneIndex>(instr.imm).value;
        if (lane_index >= lanes)
            throw LaneOutOfRange(std::string(wat::op_info(instr.op).name) + " lane " + std::to_string(lane_index) +
                                 " >= " + std::to_string(lanes));
    }
    if (in.size() != arity(instr.op))
        throw SignatureMismatch("wrong operand count for " + std::string(wat::op_info(instr.op).name));

    V128 out{};
    switch (instr.op)
    {
    case O::V128Const:
        return Value::v128(std::get<wat::V128Bytes>(instr.imm).bytes);
    case O::I8x16Splat:
        for (unsigned i = 0; i < 16; ++i)
            set_lane<uint8_t>(out, i, static_cast<uint8_t>(in[0].as_u32()));
        return Value::v128(out);
    case O::I16x8Splat:
        for (unsigned i = 0; i < 8; ++i)
            set_lane<uint16_t>(out, i, static_cast<uint16_t>(in[0].as_u32()));
        return Value::v128(out);
    case O::I32x4Splat:
    case O::F32x4Splat:
        for (unsigned i = 0; i < 4; ++i)
            set_lane<uint32_t>(out, i, in[0].as_u32());
        return Value::v128(out);
    case O::I64x2Splat:
    case O::F64x2Splat:
        for (unsigned i = 0; i < 2; ++i)
            set_lane<uint64_t>(out, i, in[0].as_u64());
        return Value::v128(out);

    case O::I8x16ExtractLaneS:
        return Value::i32(static_cast<uint32_t>(static_cast<int32_t>(lane<int8_t>(v128_of(in, 0), lane_index))));
    case O::I8x16ExtractLaneU:
        return Value::i32(lane<uint8_t>(v128_of(in, 0), lane_index));
    case O::I16x8ExtractLaneS:
        return Value::i32(static_cast<uint32_t>(static_cast<int32_t>(lane<int16_t>(v128_of(in, 0), lane_index))));
    case O::I16x8ExtractLaneU:
        return Value::i32(lane<uint16_t>(v128_of(in, 0), lane_index));
    case O::I32x4ExtractLane:
        return Value::i32(lane<uint32_t>(v128_of(in, 0), lane_index));
    case O::I64x2ExtractLane:
        return Value::i64(lane<uint64_t>(v128_of(in, 0), lane_index));
    case O::F32x4ExtractLane:
        return Value::f32_bits(lane<uint32_t>(v128_of(in, 0), lane_index));
    case O::F64x2ExtractLane:
        return Value::f64_bits(lane<uint64_t>(v128_of(in, 0), lane_index));

    case O::I8x16ReplaceLane:
        out = v128_of(in, 0);
        set_lane<uint8_t>(out, lane_index, static_cast<uint8_t>(in[1].as_u32()));
        return Value::v128(out);
    case O::I16x8ReplaceLane:
        out = v128_of(in, 0);
        set_lane<uint16_t>(out, lane_index, static_cast<uint16_t>(in[1].as_u32()));
        return Value::v128(out);
    case O::I32x4ReplaceLane:
    case O::F32x4ReplaceLane:
        out = v128_of(in, 0);
        set_lane<uint32_t>(out, lane_index, in[1].as_u32());
        return Value::v128(out);
    case O::I64x2ReplaceLane:
    case O::F64x2ReplaceLane:
        out = v128_of(in, 0);
        set_lane<uint64_t>(out, lane_index, in[1].as_u64());
        return Value::v128(out);

    case O::V128Not:
        for (unsigned i = 0; i < 16; ++i)
            out[i] = static_cast<uint8_t>(~v128_of(in, 0)[i]);
        return Value::v128(out);
    case O::V128And:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](auto a, auto b) { return a & b; }));
    case O::V128AndNot:
        return Value::v128(
            lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](auto a, auto b) { return a & ~b; }));
    case O::V128Or:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](auto a, auto b) { return a | b; }));
    case O::V128Xor:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](auto a, auto b) { return a ^ b; }));
    case O::V128Bitselect: {
        const auto &a = v128_of(in, 0), &b = v128_of(in, 1), &mask = v128_of(in, 2);
        for (unsigned i = 0; i < 16; ++i)
            out[i] = static_cast<uint8_t>((a[i] & mask[i]) | (b[i] & ~mask[i]));
        return Value::v128(out);
    }
    case O::V128AnyTrue: {
        bool any = false;
        for (const auto byte : v128_of(in, 0))
            any = any || byte != 0;
        return Value::i32(any ? 1 : 0);
    }

    case O::I32x4ExtendLowI16x8S:
        return Value::v128(extend<int32_t, int16_t, 4>(v128_of(in, 0), 0));
    case O::I32x4ExtendHighI16x8S:
        return Value::v128(extend<int32_t, int16_t, 4>(v128_of(in, 0), 4));
    case O::I32x4ExtendLowI16x8U:
        return Value::v128(extend<uint32_t, uint16_t, 4>(v128_of(in, 0), 0));
    case O::I32x4ExtendHighI16x8U:
        return Value::v128(extend<uint32_t, uint16_t, 4>(v128_of(in, 0), 4));
    case O::I64x2ExtendLowI32x4S:
        return Value::v128(extend<int64_t, int32_t, 2>(v128_of(in, 0), 0));
    case O::I64x2ExtendHighI32x4S:
        return Value::v128(extend<int64_t, int32_t, 2>(v128_of(in, 0), 2));
    case O::I64x2ExtendLowI32x4U:
        return Value::v128(extend<uint64_t, uint32_t, 2>(v128_of(in, 0), 0));
    case O::I64x2ExtendHighI32x4U:
        return Value::v128(extend<uint64_t, uint32_t, 2>(v128_of(in, 0), 2));

    case O::I32x4Add:
        return Value::v128(lanewise<uint32_t, 4>(v128_of(in, 0), v128_of(in, 1), [](uint32_t a, uint32_t b) { return a + b; }));
    case O::I32x4Sub:
        return Value::v128(lanewise<uint32_t, 4>(v128_of(in, 0), v128_of(in, 1), [](uint32_t a, uint32_t b) { return a - b; }));
    case O::I32x4Mul:
        return Value::v128(lanewise<uint32_t, 4>(v128_of(in, 0), v128_of(in, 1), [](uint32_t a, uint32_t b) { return a * b; }));
    case O::I64x2Add:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](uint64_t a, uint64_t b) { return a + b; }));
    case O::I64x2Sub:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](uint64_t a, uint64_t b) { return a - b; }));
    case O::I64x2Mul:
        return Value::v128(lanewise<uint64_t, 2>(v128_of(in, 0), v128_of(in, 1), [](uint64_t a, uint64_t b) { return a * b; }));
    case O::F32x4Add:
        return Value::v128(lanewise<float, 4>(v128_of(in, 0), v128_of(in, 1), [](float a, float b) { return a + b; }));
    case O::F32x4Sub:
        return Value::v128(lanewise<float, 4>(v128_of(in, 0), v128_of(in, 1), [](float a, float b) { return a - b; }));
    case O::F32x4Mul:
        return Value::v128(lanewise<float, 4>(v128_of(in, 0), v128_of(in, 1), [](float a, float b) { return a * b; }));
    case O::F32x4Div:
        return Value::v128(lanewise<float, 4>(v128_of(in, 0), v128_of(in, 1), [](float a, float b) { return a / b; }));
    case O::F64x2Add:
        return Value::v128(lanewise<double, 2>(v128_of(in, 0), v128_of(in, 1), [](double a, double b) { return a + b; }));
    case O::F64x2Sub:
        return Value::v128(lanewise<double, 2>(v128_of(in, 0), v128_of(in, 1), [](double a, double b) { return a - b; }));
    case O::F64x2Mul:
        return Value::v128(lanewise<double, 2>(v128_of(in, 0), v128_of(in, 1), [](double a, double b) { return a * b; }));
    case O::F64x2Div:
        return Value::v128(lanewise<double, 2>(v128_of(in, 0), v128_of(in, 1), [](double a, double b) { return a / b; }));
    default:
        throw UnsupportedInstr(std::string(wat::op_info(instr.op).name) + " is not a lane operation");
    }
}

EvalOutcome eval_func(const wat::Module& module, std::string_view export_name, std::span<const Value> args)
{
    const uint32_t index = resolve_export(module, export_name);
    const auto sig = module.func_signature(index);
    if (!sig)
        throw SignatureMismatch("export refers to a missing function");
    if (sig->params.size() != args.size())
        throw SignatureMismatch("expected " + std::to_string(sig->params.size()) + " arguments, got " +
                                std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i].type() != sig->params[i])
            throw SignatureMismatch("argument " + std::to_string(i) + " should be " +
                                    std::string(wat::to_string(sig->params[i])));

    std::vector<bool> seen(module.funcs.size(), false);
    check_reachable(module, index, seen);

    Machine machine(module);
    try
    {
        EvalOutcome out;
        out.results = machine.call(index, std::vector<Value>(args.begin(), args.end()), 0);
        return out;
    }
    catch (const Trap& t)
    {
        return EvalOutcome{{}, t.kind};
    }
}

bool is_evaluable(const wat::Module& module, std::string_view export_name)
{
    try
    {
        std::vector<bool> seen(module.funcs.size(), false);
        check_reachable(module, resolve_export(module, export_name), seen);
        return true;
    }
    catch (const EvalError&)
    {
        return false;
    }
}

}  // namespace sentinel::eval
