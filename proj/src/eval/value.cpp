// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/eval/value.hpp"

#include <charconv>
#include <cmath>

namespace sentinel::eval {

bool Value::is_nan() const noexcept
{
    if (type_ == ValType::F32)
        return std::isnan(as_f32());
    if (type_ == ValType::F64)
        return std::isnan(as_f64());
    return false;
}

bool Value::same_class(const Value& other) const noexcept
{
    if (type_ != other.type_)
        return false;
    if (is_nan() && other.is_nan())
        return true;
    return *this == other;
}

namespace {
template <typename F>
std::string float_text(F v)
{
    if (std::isnan(v))
        return std::signbit(v) ? "-nan" : "nan";
    if (std::isinf(v))
        return v < 0 ? "-inf" : "inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}
}  // namespace

std::string Value::to_string() const
{
    switch (type_)
    {
    case ValType::I32:
        return std::to_string(as_i32());
    case ValType::I64:
        return std::to_string(as_i64());
    case ValType::F32:
        return float_text(as_f32());
    case ValType::F64:
        return float_text(as_f64());
    case ValType::V128: {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s = "0x";
        for (int i = 15; i >= 0; --i)
        {
            s.push_back(digits[bytes_[static_cast<size_t>(i)] >> 4]);
            s.push_back(digits[bytes_[static_cast<size_t>(i)] & 0xF]);
        }
        return s;
    }
    }
    return "?";
}

}  // namespace sentinel::eval
