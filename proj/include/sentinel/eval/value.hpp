// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/wat/ast.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

namespace sentinel::eval {

using wat::ValType;
using V128 = std::array<uint8_t, 16>;

/// A typed WebAssembly value. Floats keep their exact bit pattern; v128 is stored as
/// 16 little-endian bytes.
class Value
{
public:
    Value() = default;

    static Value i32(uint32_t v) { return make(ValType::I32, v); }
    static Value i64(uint64_t v) { return make(ValType::I64, v); }
    static Value f32_bits(uint32_t bits) { return make(ValType::F32, bits); }
    static Value f64_bits(uint64_t bits) { return make(ValType::F64, bits); }
    static Value f32(float v) { return f32_bits(std::bit_cast<uint32_t>(v)); }
    static Value f64(double v) { return f64_bits(std::bit_cast<uint64_t>(v)); }
    static Value v128(const V128& bytes)
    {
        Value r;
        r.type_ = ValType::V128;
        r.bytes_ = bytes;
        return r;
    }

    ValType type() const noexcept { return type_; }

    uint32_t as_u32() const noexcept { return static_cast<uint32_t>(low64()); }
    int32_t as_i32() const noexcept { return static_cast<int32_t>(as_u32()); }
    uint64_t as_u64() const noexcept { return low64(); }
    int64_t as_i64() const noexcept { return static_cast<int64_t>(low64()); }
    uint32_t f32_bits() const noexcept { return as_u32(); }
    uint64_t f64_bits() const noexcept { return low64(); }
    float as_f32() const noexcept { return std::bit_cast<float>(as_u32()); }
    double as_f64() const noexcept { return std::bit_cast<double>(low64()); }
    const V128& as_v128() const noexcept { return bytes_; }

    bool is_nan() const noexcept;

    /// Bit-exact equality including type.
    bool operator==(const Value& other) const = default;

    /// Equality where any two NaNs of the same float type match; v128 is bitwise.
    bool same_class(const Value& other) const noexcept;

    /// Decimal rendering: signed integers, shortest round-trip floats ("nan", "inf"),
    /// v128 as 0x followed by 32 hex digits (most significant byte first).
    std::string to_string() const;

private:
    static Value make(ValType t, uint64_t v)
    {
        Value r;
        r.type_ = t;
        for (size_t i = 0; i < 8; ++i)
            r.bytes_[i] = static_cast<uint8_t>(v >> (8 * i));
        return r;
    }

    uint64_t low64() const noexcept
    {
        uint64_t v = 0;
        for (size_t i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(bytes_[i]) << (8 * i);
        return v;
    }

    ValType type_ = ValType::I32;
    V128 bytes_{};
};

/// Little-endian lane view of a v128.
template <typename T>
T lane(const V128& v, unsigned index) noexcept
{
    T out;
    std::memcpy(&out, v.data() + index * sizeof(T), sizeof(T));
    return out;
}

template <typename T>
void set_lane(V128& v, unsigned index, T value) noexcept
{
    std::memcpy(v.data() + index * sizeof(T), &value, sizeof(T));
}

}  // namespace sentinel::eval
