// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/opcodes.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace sentinel::wat {
namespace {

constexpr std::array op_table = {
#define SENTINEL_OPCODE_INFO(name, text, prefix, code, imm, align) \
    OpInfo{Opcode::name, text, prefix, code, ImmKind::imm, align},
    SENTINEL_OPCODES(SENTINEL_OPCODE_INFO)
#undef SENTINEL_OPCODE_INFO
};

const std::unordered_map<std::string_view, Opcode>& names()
{
    static const auto map = [] {
        std::unordered_map<std::string_view, Opcode> m;
        for (const auto& info : op_table)
            m.emplace(info.name, info.op);
        return m;
    }();
    return map;
}

const std::unordered_map<uint64_t, Opcode>& encodings()
{
    static const auto map = [] {
        std::unordered_map<uint64_t, Opcode> m;
        for (const auto& info : op_table)
            m.emplace((uint64_t{info.prefix} << 32) | info.code, info.op);
        return m;
    }();
    return map;
}

}  // namespace

const OpInfo& op_info(Opcode op) noexcept
{
    return op_table[static_cast<size_t>(op)];
}

std::optional<Opcode> opcode_by_name(std::string_view name) noexcept
{
    const auto& m = names();
    if (const auto it = m.find(name); it != m.end())
        return it->second;
    return std::nullopt;
}

std::optional<Opcode> opcode_by_encoding(uint8_t prefix, uint32_t code) noexcept
{
    const auto& m = encodings();
    if (const auto it = m.find((uint64_t{prefix} << 32) | code); it != m.end())
        return it->second;
    return std::nullopt;
}

unsigned lane_count(Opcode op) noexcept
{
    switch (op)
    {
    case Opcode::I8x16ExtractLaneS:
    case Opcode::I8x16ExtractLaneU:
    case Opcode::I8x16ReplaceLane:
        return 16;
    case Opcode::I16x8ExtractLaneS:
    case Opcode::I16x8ExtractLaneU:
    case Opcode::I16x8ReplaceLane:
        return 8;
    case Opcode::I32x4ExtractLane:
    case Opcode::I32x4ReplaceLane:
    case Opcode::F32x4ExtractLane:
    case Opcode::F32x4ReplaceLane:
        return 4;
    case Opcode::I64x2ExtractLane:
    case Opcode::I64x2ReplaceLane:
    case Opcode::F64x2ExtractLane:
    case Opcode::F64x2ReplaceLane:
        return 2;
    default:
        return 0;
    }
}

}  // namespace sentinel::wat
