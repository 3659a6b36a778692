// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace sentinel::wat {

/// Kind of immediate operand carried by an instruction.
enum class ImmKind : uint8_t {
    None,
    LocalIndex,
    GlobalIndex,
    FuncIndex,
    I32,
    I64,
    F32,
    F64,
    V128,
    MemArg,
    MemoryZero,  // reserved 0x00 byte of memory.size / memory.grow
    Lane,
};

// X(Enum, "text name", prefix, code, immediate kind, natural alignment log2 for memory ops)
// Prefix 0 means a single-byte opcode; 0xFD is the SIMD prefix followed by a u32 LEB128.
#define SENTINEL_OPCODES(X)                                              \
    X(Unreachable, "unreachable", 0x00, 0x00, None, 0)                   \
    X(Nop, "nop", 0x00, 0x01, None, 0)                                   \
    X(Return, "return", 0x00, 0x0F, None, 0)                             \
    X(Call, "call", 0x00, 0x10, FuncIndex, 0)                            \
    X(Drop, "drop", 0x00, 0x1A, None, 0)                                 \
    X(Select, "select", 0x00, 0x1B, None, 0)                             \
    X(LocalGet, "local.get", 0x00, 0x20, LocalIndex, 0)                  \
    X(LocalSet, "local.set", 0x00, 0x21, LocalIndex, 0)                  \
    X(LocalTee, "local.tee", 0x00, 0x22, LocalIndex, 0)                  \
    X(GlobalGet, "global.get", 0x00, 0x23, GlobalIndex, 0)               \
    X(GlobalSet, "global.set", 0x00, 0x24, GlobalIndex, 0)               \
    X(I32Load, "i32.load", 0x00, 0x28, MemArg, 2)                        \
    X(I64Load, "i64.load", 0x00, 0x29, MemArg, 3)                        \
    X(F32Load, "f32.load", 0x00, 0x2A, MemArg, 2)                        \
    X(F64Load, "f64.load", 0x00, 0x2B, MemArg, 3)                        \
    X(I32Load8U, "i32.load8_u", 0x00, 0x2D, MemArg, 0)                   \
    X(I32Load16U, "i32.load16_u", 0x00, 0x2F, MemArg, 1)                 \
    X(I32Store, "i32.store", 0x00, 0x36, MemArg, 2)                      \
    X(I64Store, "i64.store", 0x00, 0x37, MemArg, 3)                      \
    X(F32Store, "f32.store", 0x00, 0x38, MemArg, 2)                      \
    X(F64Store, "f64.store", 0x00, 0x39, MemArg, 3)                      \
    X(I32Store8, "i32.store8", 0x00, 0x3A, MemArg, 0)                    \
    X(I32Store16, "i32.store16", 0x00, 0x3B, MemArg, 1)                  \
    X(MemorySize, "memory.size", 0x00, 0x3F, MemoryZero, 0)              \
    X(MemoryGrow, "memory.grow", 0x00, 0x40, MemoryZero, 0)              \
    X(I32Const, "i32.const", 0x00, 0x41, I32, 0)                         \
    X(I64Const, "i64.const", 0x00, 0x42, I64, 0)                         \
    X(F32Const, "f32.const", 0x00, 0x43, F32, 0)                         \
    X(F64Const, "f64.const", 0x00, 0x44, F64, 0)                         \
    X(I32Eqz, "i32.eqz", 0x00, 0x45, None, 0)                            \
    X(I32Eq, "i32.eq", 0x00, 0x46, None, 0)                              \
    X(I32Ne, "i32.ne", 0x00, 0x47, None, 0)                              \
    X(I32LtS, "i32.lt_s", 0x00, 0x48, None, 0)                           \
    X(I32LtU, "i32.lt_u", 0x00, 0x49, None, 0)                           \
    X(I32GtS, "i32.gt_s", 0x00, 0x4A, None, 0)                           \
    X(I32GtU, "i32.gt_u", 0x00, 0x4B, None, 0)                           \
    X(I32LeS, "i32.le_s", 0x00, 0x4C, None, 0)                           \
    X(I32LeU, "i32.le_u", 0x00, 0x4D, None, 0)                           \
    X(I32GeS, "i32.ge_s", 0x00, 0x4E, None, 0)                           \
    X(I32GeU, "i32.ge_u", 0x00, 0x4F, None, 0)                           \
    X(I64Eqz, "i64.eqz", 0x00, 0x50, None, 0)                            \
    X(I64Eq, "i64.eq", 0x00, 0x51, None, 0)                              \
    X(I64Ne, "i64.ne", 0x00, 0x52, None, 0)                              \
    X(I64LtS, "i64.lt_s", 0x00, 0x53, None, 0)                           \
    X(I64LtU, "i64.lt_u", 0x00, 0x54, None, 0)                           \
    X(I64GtS, "i64.gt_s", 0x00, 0x55, None, 0)                           \
    X(I64GtU, "i64.gt_u", 0x00, 0x56, None, 0)                           \
    X(I64LeS, "i64.le_s", 0x00, 0x57, None, 0)                           \
    X(I64LeU, "i64.le_u", 0x00, 0x58, None, 0)                           \
    X(I64GeS, "i64.ge_s", 0x00, 0x59, None, 0)                           \
    X(I64GeU, "i64.ge_u", 0x00, 0x5A, None, 0)                           \
    X(F32Eq, "f32.eq", 0x00, 0x5B, None, 0)                              \
    X(F32Ne, "f32.ne", 0x00, 0x5C, None, 0)                              \
    X(F32Lt, "f32.lt", 0x00, 0x5D, None, 0)                              \
    X(F32Gt, "f32.gt", 0x00, 0x5E, None, 0)                              \
    X(F32Le, "f32.le", 0x00, 0x5F, None, 0)                              \
    X(F32Ge, "f32.ge", 0x00, 0x60, None, 0)                              \
    X(F64Eq, "f64.eq", 0x00, 0x61, None, 0)                              \
    X(F64Ne, "f64.ne", 0x00, 0x62, None, 0)                              \
    X(F64Lt, "f64.lt", 0x00, 0x63, None, 0)                              \
    X(F64Gt, "f64.gt", 0x00, 0x64, None, 0)                              \
    X(F64Le, "f64.le", 0x00, 0x65, None, 0)                              \
    X(F64Ge, "f64.ge", 0x00, 0x66, None, 0)                              \
    X(I32Clz, "i32.clz", 0x00, 0x67, None, 0)                            \
    X(I32Ctz, "i32.ctz", 0x00, 0x68, None, 0)                            \
    X(I32Popcnt, "i32.popcnt", 0x00, 0x69, None, 0)                      \
    X(I32Add, "i32.add", 0x00, 0x6A, None, 0)                            \
    X(I32Sub, "i32.sub", 0x00, 0x6B, None, 0)                            \
    X(I32Mul, "i32.mul", 0x00, 0x6C, None, 0)                            \
    X(I32DivS, "i32.div_s", 0x00, 0x6D, None, 0)                         \
    X(I32DivU, "i32.div_u", 0x00, 0x6E, None, 0)                         \
    X(I32RemS, "i32.rem_s", 0x00, 0x6F, None, 0)                         \
    X(I32RemU, "i32.rem_u", 0x00, 0x70, None, 0)                         \
    X(I32And, "i32.and", 0x00, 0x71, None, 0)                            \
    X(I32Or, "i32.or", 0x00, 0x72, None, 0)                              \
    X(I32Xor, "i32.xor", 0x00, 0x73, None, 0)                            \
    X(I32Shl, "i32.shl", 0x00, 0x74, None, 0)                            \
    X(I32ShrS, "i32.shr_s", 0x00, 0x75, None, 0)                         \
    X(I32ShrU, "i32.shr_u", 0x00, 0x76, None, 0)                         \
    X(I32Rotl, "i32.rotl", 0x00, 0x77, None, 0)                          \
    X(I32Rotr, "i32.rotr", 0x00, 0x78, None, 0)                          \
    X(I64Clz, "i64.clz", 0x00, 0x79, None, 0)                            \
    X(I64Ctz, "i64.ctz", 0x00, 0x7A, None, 0)                            \
    X(I64Popcnt, "i64.popcnt", 0x00, 0x7B, None, 0)                      \
    X(I64Add, "i64.add", 0x00, 0x7C, None, 0)                            \
    X(I64Sub, "i64.sub", 0x00, 0x7D, None, 0)                            \
    X(I64Mul, "i64.mul", 0x00, 0x7E, None, 0)                            \
    X(I64DivS, "i64.div_s", 0x00, 0x7F, None, 0)                         \
    X(I64DivU, "i64.div_u", 0x00, 0x80, None, 0)                         \
    X(I64RemS, "i64.rem_s", 0x00, 0x81, None, 0)                         \
    X(I64RemU, "i64.rem_u", 0x00, 0x82, None, 0)                         \
    X(I64And, "i64.and", 0x00, 0x83, None, 0)                            \
    X(I64Or, "i64.or", 0x00, 0x84, None, 0)                              \
    X(I64Xor, "i64.xor", 0x00, 0x85, None, 0)                            \
    X(I64Shl, "i64.shl", 0x00, 0x86, None, 0)                            \
    X(I64ShrS, "i64.shr_s", 0x00, 0x87, None, 0)                         \
    X(I64ShrU, "i64.shr_u", 0x00, 0x88, None, 0)                         \
    X(I64Rotl, "i64.rotl", 0x00, 0x89, None, 0)                          \
    X(I64Rotr, "i64.rotr", 0x00, 0x8A, None, 0)                          \
    X(F32Abs, "f32.abs", 0x00, 0x8B, None, 0)                            \
    X(F32Neg, "f32.neg", 0x00, 0x8C, None, 0)                            \
    X(F32Ceil, "f32.ceil", 0x00, 0x8D, None, 0)                          \
    X(F32Floor, "f32.floor", 0x00, 0x8E, None, 0)                        \
    X(F32Trunc, "f32.trunc", 0x00, 0x8F, None, 0)                        \
    X(F32Nearest, "f32.nearest", 0x00, 0x90, None, 0)                    \
    X(F32Sqrt, "f32.sqrt", 0x00, 0x91, None, 0)                          \
    X(F32Add, "f32.add", 0x00, 0x92, None, 0)                            \
    X(F32Sub, "f32.sub", 0x00, 0x93, None, 0)                            \
    X(F32Mul, "f32.mul", 0x00, 0x94, None, 0)                            \
    X(F32Div, "f32.div", 0x00, 0x95, None, 0)                            \
    X(F32Min, "f32.min", 0x00, 0x96, None, 0)                            \
    X(F32Max, "f32.max", 0x00, 0x97, None, 0)                            \
    X(F32Copysign, "f32.copysign", 0x00, 0x98, None, 0)                  \
    X(F64Abs, "f64.abs", 0x00, 0x99, None, 0)                            \
    X(F64Neg, "f64.neg", 0x00, 0x9A, None, 0)                            \
    X(F64Ceil, "f64.ceil", 0x00, 0x9B, None, 0)                          \
    X(F64Floor, "f64.floor", 0x00, 0x9C, None, 0)                        \
    X(F64Trunc, "f64.trunc", 0x00, 0x9D, None, 0)                        \
    X(F64Nearest, "f64.nearest", 0x00, 0x9E, None, 0)                    \
    X(F64Sqrt, "f64.sqrt", 0x00, 0x9F, None, 0)                          \
    X(F64Add, "f64.add", 0x00, 0xA0, None, 0)                            \
    X(F64Sub, "f64.sub", 0x00, 0xA1, None, 0)                            \
    X(F64Mul, "f64.mul", 0x00, 0xA2, None, 0)                            \
    X(F64Div, "f64.div", 0x00, 0xA3, None, 0)                            \
    X(F64Min, "f64.min", 0x00, 0xA4, None, 0)                            \
    X(F64Max, "f64.max", 0x00, 0xA5, None, 0)                            \
    X(F64Copysign, "f64.copysign", 0x00, 0xA6, None, 0)                  \
    X(I32WrapI64, "i32.wrap_i64", 0x00, 0xA7, None, 0)                   \
    X(I64ExtendI32S, "i64.extend_i32_s", 0x00, 0xAC, None, 0)            \
    X(I64ExtendI32U, "i64.extend_i32_u", 0x00, 0xAD, None, 0)            \
    X(F32ConvertI32S, "f32.convert_i32_s", 0x00, 0xB2, None, 0)          \
    X(F32ConvertI32U, "f32.convert_i32_u", 0x00, 0xB3, None, 0)          \
    X(F32ConvertI64S, "f32.convert_i64_s", 0x00, 0xB4, None, 0)          \
    X(F32ConvertI64U, "f32.convert_i64_u", 0x00, 0xB5, None, 0)          \
    X(F32DemoteF64, "f32.demote_f64", 0x00, 0xB6, None, 0)               \
    X(F64ConvertI32S, "f64.convert_i32_s", 0x00, 0xB7, None, 0)          \
    X(F64ConvertI32U, "f64.convert_i32_u", 0x00, 0xB8, None, 0)          \
    X(F64ConvertI64S, "f64.convert_i64_s", 0x00, 0xB9, None, 0)          \
    X(F64ConvertI64U, "f64.convert_i64_u", 0x00, 0xBA, None, 0)          \
    X(F64PromoteF32, "f64.promote_f32", 0x00, 0xBB, None, 0)             \
    X(I32ReinterpretF32, "i32.reinterpret_f32", 0x00, 0xBC, None, 0)     \
    X(I64ReinterpretF64, "i64.reinterpret_f64", 0x00, 0xBD, None, 0)     \
    X(F32ReinterpretI32, "f32.reinterpret_i32", 0x00, 0xBE, None, 0)     \
    X(F64ReinterpretI64, "f64.reinterpret_i64", 0x00, 0xBF, None, 0)     \
    X(V128Load, "v128.load", 0xFD, 0x00, MemArg, 4)                      \
    X(V128Store, "v128.store", 0xFD, 0x0B, MemArg, 4)                    \
    X(V128Const, "v128.const", 0xFD, 0x0C, V128, 0)                      \
    X(I8x16Splat, "i8x16.splat", 0xFD, 0x0F, None, 0)                    \
    X(I16x8Splat, "i16x8.splat", 0xFD, 0x10, None, 0)                    \
    X(I32x4Splat, "i32x4.splat", 0xFD, 0x11, None, 0)                    \
    X(I64x2Splat, "i64x2.splat", 0xFD, 0x12, None, 0)                    \
    X(F32x4Splat, "f32x4.splat", 0xFD, 0x13, None, 0)                    \
    X(F64x2Splat, "f64x2.splat", 0xFD, 0x14, None, 0)                    \
    X(I8x16ExtractLaneS, "i8x16.extract_lane_s", 0xFD, 0x15, Lane, 0)    \
    X(I8x16ExtractLaneU, "i8x16.extract_lane_u", 0xFD, 0x16, Lane, 0)    \
    X(I8x16ReplaceLane, "i8x16.replace_lane", 0xFD, 0x17, Lane, 0)       \
    X(I16x8ExtractLaneS, "i16x8.extract_lane_s", 0xFD, 0x18, Lane, 0)    \
    X(I16x8ExtractLaneU, "i16x8.extract_lane_u", 0xFD, 0x19, Lane, 0)    \
    X(I16x8ReplaceLane, "i16x8.replace_lane", 0xFD, 0x1A, Lane, 0)       \
    X(I32x4ExtractLane, "i32x4.extract_lane", 0xFD, 0x1B, Lane, 0)       \
    X(I32x4ReplaceLane, "i32x4.replace_lane", 0xFD, 0x1C, Lane, 0)       \
    X(I64x2ExtractLane, "i64x2.extract_lane", 0xFD, 0x1D, Lane, 0)       \
    X(I64x2ReplaceLane, "i64x2.replace_lane", 0xFD, 0x1E, Lane, 0)       \
    X(F32x4ExtractLane, "f32x4.extract_lane", 0xFD, 0x1F, Lane, 0)       \
    X(F32x4ReplaceLane, "f32x4.replace_lane", 0xFD, 0x20, Lane, 0)       \
    X(F64x2ExtractLane, "f64x2.extract_lane", 0xFD, 0x21, Lane, 0)       \
    X(F64x2ReplaceLane, "f64x2.replace_lane", 0xFD, 0x22, Lane, 0)       \
    X(V128Not, "v128.not", 0xFD, 0x4D, None, 0)                          \
    X(V128And, "v128.and", 0xFD, 0x4E, None, 0)                          \
    X(V128AndNot, "v128.andnot", 0xFD, 0x4F, None, 0)                    \
    X(V128Or, "v128.or", 0xFD, 0x50, None, 0)                            \
    X(V128Xor, "v128.xor", 0xFD, 0x51, None, 0)                          \
    X(V128Bitselect, "v128.bitselect", 0xFD, 0x52, None, 0)              \
    X(V128AnyTrue, "v128.any_true", 0xFD, 0x53, None, 0)                 \
    X(I32x4ExtendLowI16x8S, "i32x4.extend_low_i16x8_s", 0xFD, 0xA7, None, 0)  \
    X(I32x4ExtendHighI16x8S, "i32x4.extend_high_i16x8_s", 0xFD, 0xA8, None, 0) \
    X(I32x4ExtendLowI16x8U, "i32x4.extend_low_i16x8_u", 0xFD, 0xA9, None, 0)  \
    X(I32x4ExtendHighI16x8U, "i32x4.extend_high_i16x8_u", 0xFD, 0xAA, None, 0) \
    X(I32x4Add, "i32x4.add", 0xFD, 0xAE, None, 0)                        \
    X(I32x4Sub, "i32x4.sub", 0xFD, 0xB1, None, 0)                        \
    X(I32x4Mul, "i32x4.mul", 0xFD, 0xB5, None, 0)                        \
    X(I64x2ExtendLowI32x4S, "i64x2.extend_low_i32x4_s", 0xFD, 0xC7, None, 0)  \
    X(I64x2ExtendHighI32x4S, "i64x2.extend_high_i32x4_s", 0xFD, 0xC8, None, 0) \
    X(I64x2ExtendLowI32x4U, "i64x2.extend_low_i32x4_u", 0xFD, 0xC9, None, 0)  \
    X(I64x2ExtendHighI32x4U, "i64x2.extend_high_i32x4_u", 0xFD, 0xCA, None, 0) \
    X(I64x2Add, "i64x2.add", 0xFD, 0xCE, None, 0)                        \
    X(I64x2Sub, "i64x2.sub", 0xFD, 0xD1, None, 0)                        \
    X(I64x2Mul, "i64x2.mul", 0xFD, 0xD5, None, 0)                        \
    X(F32x4Add, "f32x4.add", 0xFD, 0xE4, None, 0)                        \
    X(F32x4Sub, "f32x4.sub", 0xFD, 0xE5, None, 0)                        \
    X(F32x4Mul, "f32x4.mul", 0xFD, 0xE6, None, 0)                        \
    X(F32x4Div, "f32x4.div", 0xFD, 0xE7, None, 0)                        \
    X(F64x2Add, "f64x2.add", 0xFD, 0xF0, None, 0)                        \
    X(F64x2Sub, "f64x2.sub", 0xFD, 0xF1, None, 0)                        \
    X(F64x2Mul, "f64x2.mul", 0xFD, 0xF2, None, 0)                        \
    X(F64x2Div, "f64x2.div", 0xFD, 0xF3, None, 0)

enum class Opcode : uint16_t {
#define SENTINEL_OPCODE_ENUM(name, text, prefix, code, imm, align) name,
    SENTINEL_OPCODES(SENTINEL_OPCODE_ENUM)
#undef SENTINEL_OPCODE_ENUM
};

struct OpInfo {
    Opcode op;
    std::string_view name;
    uint8_t prefix;
    uint32_t code;
    ImmKind imm;
    uint8_t natural_align;
};

const OpInfo& op_info(Opcode op) noexcept;
std::optional<Opcode> opcode_by_name(std::string_view name) noexcept;
std::optional<Opcode> opcode_by_encoding(uint8_t prefix, uint32_t code) noexcept;

/// Number of lanes for instructions taking a Lane immediate; 0 otherwise.
unsigned lane_count(Opcode op) noexcept;

}  // namespace sentinel::wat
