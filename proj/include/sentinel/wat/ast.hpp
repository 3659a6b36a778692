// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/wat/opcodes.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sentinel::wat {

using Bytes = std::vector<uint8_t>;

enum class ValType : uint8_t {
    I32 = 0x7F,
    I64 = 0x7E,
    F32 = 0x7D,
    F64 = 0x7C,
    V128 = 0x7B,
};

std::string_view to_string(ValType t) noexcept;
std::optional<ValType> val_type_from_byte(uint8_t b) noexcept;

struct FuncType {
    std::vector<ValType> params;
    std::vector<ValType> results;
    bool operator==(const FuncType&) const = default;
};

/// Memory limits in 64 KiB pages.
struct Limits {
    uint32_t min = 0;
    std::optional<uint32_t> max;
    bool operator==(const Limits&) const = default;
};

struct GlobalType {
    ValType type = ValType::I32;
    bool is_mutable = false;
    bool operator==(const GlobalType&) const = default;
};

struct MemArg {
    uint32_t align = 0;  // log2 of the alignment
    uint32_t offset = 0;
    bool operator==(const MemArg&) const = default;
};

struct Index {
    uint32_t value = 0;
    bool operator==(const Index&) const = default;
};

struct LaneIndex {
    uint8_t value = 0;
    bool operator==(const LaneIndex&) const = default;
};

/// f32 / f64 literals are stored by bit pattern so NaN payloads survive a round trip.
struct F32Bits {
    uint32_t bits = 0;
    bool operator==(const F32Bits&) const = default;
};

struct F64Bits {
    uint64_t bits = 0;
    bool operator==(const F64Bits&) const = default;
};

struct V128Bytes {
    std::array<uint8_t, 16> bytes{};
    bool operator==(const V128Bytes&) const = default;
};

using Immediate =
    std::variant<std::monostate, Index, LaneIndex, int32_t, int64_t, F32Bits, F64Bits, V128Bytes, MemArg>;

struct Instr {
    Opcode op = Opcode::Nop;
    Immediate imm;
    bool operator==(const Instr&) const = default;
};

struct FuncDef {
    std::vector<ValType> params;
    std::vector<ValType> results;
    std::vector<ValType> locals;
    std::vector<Instr> body;
    std::optional<std::string> export_name;
    bool operator==(const FuncDef&) const = default;

    FuncType signature() const { return {params, results}; }
};

struct Import {
    std::string module_name;
    std::string item_name;
    std::variant<FuncType, Limits, GlobalType> desc;
    bool operator==(const Import&) const = default;
};

struct Global {
    GlobalType type;
    Instr init;  // a single constant instruction or global.get
    bool operator==(const Global&) const = default;
};

enum class ExternKind : uint8_t { Func = 0x00, Table = 0x01, Memory = 0x02, Global = 0x03 };

struct Export {
    std::string name;
    ExternKind kind = ExternKind::Func;
    uint32_t index = 0;
    bool operator==(const Export&) const = default;
};

struct DataSegment {
    Instr offset;  // i32.const or global.get
    Bytes bytes;
    bool operator==(const DataSegment&) const = default;
};

/// Opaque custom section. `after` is the id of the last standard section emitted before it
/// (0 when it precedes every standard section).
struct CustomSection {
    std::string name;
    Bytes bytes;
    uint8_t after = 0;
    bool operator==(const CustomSection&) const = default;
};

/// One WebAssembly module in the supported subset.
///
/// Function and global index spaces count imports first, as in the binary format.
/// Exports declared inline on a function are kept in FuncDef::export_name and also
/// appear in `exports`; the encoder writes only `exports`.
struct Module {
    std::vector<FuncType> types;
    std::vector<Import> imports;
    std::vector<FuncDef> funcs;
    std::vector<Limits> memories;
    std::vector<Global> globals;
    std::vector<Export> exports;
    std::optional<uint32_t> start;
    std::vector<DataSegment> data;
    std::vector<CustomSection> customs;
    bool operator==(const Module&) const = default;

    /// Returns the index of `type` in `types`, appending it when absent.
    uint32_t intern_type(const FuncType& type);
    std::optional<uint32_t> find_type(const FuncType& type) const;

    uint32_t imported_func_count() const;
    uint32_t imported_memory_count() const;
    uint32_t imported_global_count() const;
    uint32_t total_func_count() const { return imported_func_count() + static_cast<uint32_t>(funcs.size()); }
    uint32_t total_memory_count() const { return imported_memory_count() + static_cast<uint32_t>(memories.size()); }
    uint32_t total_global_count() const { return imported_global_count() + static_cast<uint32_t>(globals.size()); }

    /// Signature of function `index` in the combined (imports first) index space.
    std::optional<FuncType> func_signature(uint32_t index) const;
    const Export* find_export(std::string_view name) const;
};

}  // namespace sentinel::wat
