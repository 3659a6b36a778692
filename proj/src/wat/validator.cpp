// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/wat.hpp"

#include <set>

namespace sentinel::wat {

std::string_view rule_id(Rule rule) noexcept
{
    switch (rule)
    {
    case Rule::MemMaxExceeded:
        return "MEM_MAX_EXCEEDED";
    case Rule::MemMinExceeded:
        return "MEM_MIN_EXCEEDED";
    case Rule::LimitsMinAboveMax:
        return "LIMITS_MIN_ABOVE_MAX";
    case Rule::MultipleMemories:
        return "MULTIPLE_MEMORIES";
    case Rule::IndexOutOfBounds:
        return "INDEX_OUT_OF_BOUNDS";
    case Rule::StartSignature:
        return "START_SIGNATURE";
    case Rule::DuplicateExport:
        return "DUPLICATE_EXPORT";
    case Rule::ConstExprInvalid:
        return "CONST_EXPR_INVALID";
    case Rule::TypeMismatch:
        return "TYPE_MISMATCH";
    case Rule::LaneOutOfRange:
        return "LANE_OUT_OF_RANGE";
    case Rule::AlignmentTooLarge:
        return "ALIGNMENT_TOO_LARGE";
    case Rule::MemoryRequired:
        return "MEMORY_REQUIRED";
    }
    return "UNKNOWN";
}

bool ValidationReport::has(Rule rule) const noexcept
{
    for (const auto& v : violations)
        if (v.rule == rule)
            return true;
    return false;
}

namespace {

using enum ValType;

struct StackEffect {
    std::vector<ValType> pops;
    std::vector<ValType> pushes;
};

/// Operand types of the fixed-signature instructions.
std::optional<StackEffect> fixed_effect(Opcode op)
{
    using O = Opcode;
    const auto un = [](ValType in, ValType out) { return StackEffect{{in}, {out}}; };
    const auto bin = [](ValType in, ValType out) { return StackEffect{{in, in}, {out}}; };
    switch (op)
    {
    case O::Nop:
        return StackEffect{};
    case O::Drop:
    case O::Select:
    case O::Unreachable:
    case O::Return:
    case O::Call:
    case O::LocalGet:
    case O::LocalSet:
    case O::LocalTee:
    case O::GlobalGet:
    case O::GlobalSet:
        return std::nullopt;
    case O::I32Load:
    case O::I32Load8U:
    case O::I32Load16U:
        return un(I32, I32);
    case O::I64Load:
        return un(I32, I64);
    case O::F32Load:
        return un(I32, F32);
    case O::F64Load:
        return un(I32, F64);
    case O::V128Load:
        return un(I32, V128);
    case O::I32Store:
    case O::I32Store8:
    case O::I32Store16:
        return StackEffect{{I32, I32}, {}};
    case O::I64Store:
        return StackEffect{{I32, I64}, {}};
    case O::F32Store:
        return StackEffect{{I32, F32}, {}};
    case O::F64Store:
        return StackEffect{{I32, F64}, {}};
    case O::V128Store:
        return StackEffect{{I32, V128}, {}};
    case O::MemorySize:
        return StackEffect{{}, {I32}};
    case O::MemoryGrow:
        return un(I32, I32);
    case O::I32Const:
        return StackEffect{{}, {I32}};
    case O::I64Const:
        return StackEffect{{}, {I64}};
    case O::F32Const:
        return StackEffect{{}, {F32}};
    case O::F64Const:
        return StackEffect{{}, {F64}};
    case O::V128Const:
        return StackEffect{{}, {V128}};
    case O::I32Eqz:
        return un(I32, I32);
    case O::I64Eqz:
        return un(I64, I32);
    case O::I32Clz:
    case O::I32Ctz:
    case O::I32Popcnt:
        return un(I32, I32);
    case O::I64Clz:
    case O::I64Ctz:
    case O::I64Popcnt:
        return un(I64, I64);
    case O::F32Abs:
    case O::F32Neg:
    case O::F32Ceil:
    case O::F32Floor:
    case O::F32Trunc:
    case O::F32Nearest:
    case O::F32Sqrt:
        return un(F32, F32);
    case O::F64Abs:
    case O::F64Neg:
    case O::F64Ceil:
    case O::F64Floor:
    case O::F64Trunc:
    case O::F64Nearest:
    case O::F64Sqrt:
        return un(F64, F64);
    case O::I32WrapI64:
        return un(I64, I32);
    case O::I64ExtendI32S:
    case O::I64ExtendI32U:
        return un(I32, I64);
    case O::F32ConvertI32S:
    case O::F32ConvertI32U:
        return un(I32, F32);
    case O::F32ConvertI64S:
    case O::F32ConvertI64U:
        return un(I64, F32);
    case O::F32DemoteF64:
        return un(F64, F32);
    case O::F64ConvertI32S:
    case O::F64ConvertI32U:
        return un(I32, F64);
    case O::F64ConvertI64S:
    case O::F64ConvertI64U:
        return un(I64, F64);
    case O::F64PromoteF32:
        return un(F32, F64);
    case O::I32ReinterpretF32:
        return un(F32, I32);
    case O::I64ReinterpretF64:
        return un(F64, I64);
    case O::F32ReinterpretI32:
        return un(I32, F32);
    case O::F64ReinterpretI64:
        return un(I64, F64);
    case O::I8x16Splat:
    case O::I16x8Splat:
    case O::I32x4Splat:
        return un(I32, V128);
    case O::I64x2Splat:
        return un(I64, V128);
    case O::F32x4Splat:
        return un(F32, V128);
    case O::F64x2Splat:
        return un(F64, V128);
    case O::I8x16ExtractLaneS:
    case O::I8x16ExtractLaneU:
    case O::I16x8ExtractLaneS:
    case O::I16x8ExtractLaneU:
    case O::I32x4ExtractLane:
        return un(V128, I32);
    case O::I64x2ExtractLane:
        return un(V128, I64);
    case O::F32x4ExtractLane:
        return un(V128, F32);
    case O::F64x2ExtractLane:
        return un(V128, F64);
    case O::I8x16ReplaceLane:
    case O::I16x8ReplaceLane:
    case O::I32x4ReplaceLane:
        return StackEffect{{V128, I32}, {V128}};
    case O::I64x2ReplaceLane:
        return StackEffect{{V128, I64}, {V128}};
    case O::F32x4ReplaceLane:
        return StackEffect{{V128, F32}, {V128}};
    case O::F64x2ReplaceLane:
        return StackEffect{{V128, F64}, {V128}};
    case O::V128Not:
        return un(V128, V128);
    case O::V128Bitselect:
        return StackEffect{{V128, V128, V128}, {V128}};
    case O::V128AnyTrue:
        return un(V128, I32);
    case O::I32x4ExtendLowI16x8S:
    case O::I32x4ExtendHighI16x8S:
    case O::I32x4ExtendLowI16x8U:
    case O::I32x4ExtendHighI16x8U:
    case O::I64x2ExtendLowI32x4S:
    case O::I64x2ExtendHighI32x4S:
    case O::I64x2ExtendLowI32x4U:
    case O::I64x2ExtendHighI32x4U:
        return un(V128, V128);
    default:
        break;
    }

    // Remaining binary operators and comparisons, grouped by encoding range.
    const auto& info = op_info(op);
    const uint32_t c = info.code;
    if (info.prefix == 0xFD)
        return bin(V128, V128);
    if (c >= 0x46 && c <= 0x4F)
        return bin(I32, I32);
    if (c >= 0x51 && c <= 0x5A)
        return bin(I64, I32);
    if (c >= 0x5B && c <= 0x60)
        return bin(F32, I32);
    if (c >= 0x61 && c <= 0x66)
        return bin(F64, I32);
    if (c >= 0x6A && c <= 0x78)
        return bin(I32, I32);
    if (c >= 0x7C && c <= 0x8A)
        return bin(I64, I64);
    if (c >= 0x92 && c <= 0x98)
        return bin(F32, F32);
    if (c >= 0xA0 && c <= 0xA6)
        return bin(F64, F64);
    return std::nullopt;
}

class Validator
{
public:
    explicit Validator(const Module& m) : m_{m} {}

    ValidationReport run()
    {
        check_memories();
        check_globals();
        check_exports();
        check_start();
        check_data();
        for (size_t i = 0; i < m_.funcs.size(); ++i)
            check_func(i);
        return std::move(report_);
    }

private:
    void add(Rule rule, std::string detail) { report_.violations.push_back({rule, std::move(detail)}); }

    void check_limits(const Limits& l, const std::string& what)
    {
        if (l.min > max_memory_pages)
            add(Rule::MemMinExceeded, what + " min " + std::to_string(l.min) + " exceeds 65536 pages");
        if (l.max)
        {
            if (*l.max > max_memory_pages)
                add(Rule::MemMaxExceeded, what + " max " + std::to_string(*l.max) + " exceeds 65536 pages");
            if (l.min > *l.max)
                add(Rule::LimitsMinAboveMax, what + " min above max");
        }
    }

    void check_memories()
    {
        if (m_.total_memory_count() > 1)
            add(Rule::MultipleMemories, "at most one memory is allowed");
        uint32_t idx = 0;
        for (const auto& imp : m_.imports)
            if (const auto* l = std::get_if<Limits>(&imp.desc))
                check_limits(*l, "memory " + std::to_string(idx++));
        for (const auto& l : m_.memories)
            check_limits(l, "memory " + std::to_string(idx++));
    }

    std::optional<GlobalType> global_type(uint32_t index) const
    {
        for (const auto& imp : m_.imports)
        {
            if (const auto* g = std::get_if<GlobalType>(&imp.desc))
            {
                if (index == 0)
                    return *g;
                --index;
            }
        }
        if (index < m_.globals.size())
            return m_.globals[index].type;
        return std::nullopt;
    }

    /// Checks a constant expression producing `expected`.
    void check_const_expr(const Instr& init, ValType expected, const std::string& where)
    {
        ValType produced;
        switch (init.op)
        {
        case Opcode::I32Const:
            produced = I32;
            break;
        case Opcode::I64Const:
            produced = I64;
            break;
        case Opcode::F32Const:
            produced = F32;
            break;
        case Opcode::F64Const:
            produced = F64;
            break;
        case Opcode::V128Const:
            produced = V128;
            break;
        case Opcode::GlobalGet: {
            const uint32_t idx = std::get<Index>(init.imm).value;
            if (idx >= m_.imported_global_count())
            {
                add(Rule::IndexOutOfBounds,
                    where + ": global.get " + std::to_string(idx) + " must refer to an imported global");
                return;
            }
            const auto g = global_type(idx);
            if (g->is_mutable)
                add(Rule::ConstExprInvalid, where + ": global.get of a mutable global");
            produced = g->type;
            break;
        }
        default:
            add(Rule::ConstExprInvalid, where + ": " + std::string(op_info(init.op).name) + " is not constant");
            return;
        }
        if (produced != expected)
            add(Rule::TypeMismatch, where + ": expected " + std::string(to_string(expected)));
    }

    void check_globals()
    {
        for (size_t i = 0; i < m_.globals.size(); ++i)
            check_const_expr(m_.globals[i].init, m_.globals[i].type.type, "global " + std::to_string(i));
    }

    void check_exports()
    {
        std::set<std::string> seen;
        for (const auto& e : m_.exports)
        {
            if (!seen.insert(e.name).second)
                add(Rule::DuplicateExport, "duplicate export \"" + e.name + "\"");
            uint32_t limit = 0;
            switch (e.kind)
            {
            case ExternKind::Func:
                limit = m_.total_func_count();
                break;
            case ExternKind::Memory:
                limit = m_.total_memory_count();
                break;
            case ExternKind::Global:
                limit = m_.total_global_count();
                break;
            case ExternKind::Table:
                limit = 0;
                break;
            }
            if (e.index >= limit)
                add(Rule::IndexOutOfBounds, "export \"" + e.name + "\" index " + std::to_string(e.index) +
                                                " beyond " + std::to_string(limit) + " items");
        }
    }

    void check_start()
    {
        if (!m_.start)
            return;
        const auto sig = m_.func_signature(*m_.start);
        if (!sig)
        {
            add(Rule::IndexOutOfBounds, "start function " + std::to_string(*m_.start) + " does not exist");
            return;
        }
        if (!sig->params.empty() || !sig->results.empty())
            add(Rule::StartSignature, "start function must take no parameters and return nothing");
    }

    void check_data()
    {
        for (size_t i = 0; i < m_.data.size(); ++i)
        {
            const std::string where = "data " + std::to_string(i);
            if (m_.total_memory_count() == 0)
                add(Rule::MemoryRequired, where + " without a memory");
            check_const_expr(m_.data[i].offset, I32, where);
        }
    }

    void check_func(size_t local_index)
    {
        const FuncDef& f = m_.funcs[local_index];
        const std::string where = "func " + std::to_string(m_.imported_func_count() + local_index);
        std::vector<ValType> locals = f.params;
        locals.insert(locals.end(), f.locals.begin(), f.locals.end());

        std::vector<ValType> stack;
        bool polymorphic = false;  // after unreachable / return the stack is unconstrained

        const auto mismatch = [&](size_t at, const std::string& msg) {
            add(Rule::TypeMismatch, where + " instr " + std::to_string(at) + ": " + msg);
        };
        // Returns popped type, or nullopt for a polymorphic "any".
        const auto pop = [&](size_t at, std::optional<ValType> expected) -> std::optional<ValType> {
            if (stack.empty())
            {
                if (!polymorphic)
                    mismatch(at, "operand stack underflow");
                return expected;
            }
            const ValType t = stack.back();
            stack.pop_back();
            if (expected && t != *expected)
                mismatch(at, "expected " + std::string(to_string(*expected)) + ", found " +
                                 std::string(to_string(t)));
            return t;
        };

        for (size_t at = 0; at < f.body.size(); ++at)
        {
            const Instr& instr = f.body[at];
            const auto& info = op_info(instr.op);

            if (info.imm == ImmKind::MemArg || instr.op == Opcode::MemorySize || instr.op == Opcode::MemoryGrow)
            {
                if (m_.total_memory_count() == 0)
                    add(Rule::MemoryRequired, where + ": " + std::string(info.name) + " without a memory");
            }
            if (info.imm == ImmKind::MemArg && std::get<MemArg>(instr.imm).align > info.natural_align)
                add(Rule::AlignmentTooLarge, where + ": " + std::string(info.name) + " alignment exceeds natural");
            if (info.imm == ImmKind::Lane && std::get<LaneIndex>(instr.imm).value >= lane_count(instr.op))
                add(Rule::LaneOutOfRange, where + ": " + std::string(info.name) + " lane " +
                                              std::to_string(std::get<LaneIndex>(instr.imm).value));

            if (const auto eff = fixed_effect(instr.op))
            {
                for (auto it = eff->pops.rbegin(); it != eff->pops.rend(); ++it)
                    pop(at, *it);
                stack.insert(stack.end(), eff->pushes.begin(), eff->pushes.end());
                continue;
            }

            switch (instr.op)
            {
            case Opcode::Unreachable:
                stack.clear();
                polymorphic = true;
                break;
            case Opcode::Return:
                for (auto it = f.results.rbegin(); it != f.results.rend(); ++it)
                    pop(at, *it);
                stack.clear();
                polymorphic = true;
                break;
            case Opcode::Drop:
                pop(at, std::nullopt);
                break;
            case Opcode::Select: {
                pop(at, I32);
                const auto b = pop(at, std::nullopt);
                const auto a = pop(at, b);
                if (a)
                    stack.push_back(*a);
                else if (b)
                    stack.push_back(*b);
                else if (!polymorphic)
                    mismatch(at, "select operands unknown");
                break;
            }
            case Opcode::LocalGet:
            case Opcode::LocalSet:
            case Opcode::LocalTee: {
                const uint32_t idx = std::get<Index>(instr.imm).value;
                if (idx >= locals.size())
                {
                    add(Rule::IndexOutOfBounds, where + ": local " + std::to_string(idx) + " out of range");
                    return;
                }
                if (instr.op != Opcode::LocalGet)
                    pop(at, locals[idx]);
                if (instr.op != Opcode::LocalSet)
                    stack.push_back(locals[idx]);
                break;
            }
            case Opcode::GlobalGet:
            case Opcode::GlobalSet: {
                const uint32_t idx = std::get<Index>(instr.imm).value;
                const auto g = global_type(idx);
                if (!g)
                {
                    add(Rule::IndexOutOfBounds, where + ": global " + std::to_string(idx) + " out of range (" +
                                                    std::to_string(m_.total_global_count()) + " globals)");
                    return;
                }
                if (instr.op == Opcode::GlobalGet)
                    stack.push_back(g->type);
                else
                {
                    if (!g->is_mutable)
                        mismatch(at, "global.set of immutable global");
                    pop(at, g->type);
                }
                break;
            }
            case Opcode::Call: {
                const uint32_t idx = std::get<Index>(instr.imm).value;
                const auto sig = m_.func_signature(idx);
                if (!sig)
                {
                    add(Rule::IndexOutOfBounds, where + ": call to missing function " + std::to_string(idx));
                    return;
                }
                for (auto it = sig->params.rbegin(); it != sig->params.rend(); ++it)
                    pop(at, *it);
                stack.insert(stack.end(), sig->results.begin(), sig->results.end());
                break;
            }
            default:
                mismatch(at, "no typing rule for " + std::string(info.name));
                break;
            }
        }

        const size_t end = f.body.size();
        for (auto it = f.results.rbegin(); it != f.results.rend(); ++it)
            pop(end, *it);
        if (!stack.empty())
            mismatch(end, "values left on the stack at function end");
    }

    const Module& m_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate_module(const Module& module)
{
    return Validator(module).run();
}

}  // namespace sentinel::wat
