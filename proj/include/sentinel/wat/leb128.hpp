// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sentinel::wat::leb128 {

inline void write_unsigned(std::vector<uint8_t>& out, uint64_t value)
{
    do
    {
        uint8_t byte = value & 0x7F;
        value >>= 7;
        if (value != 0)
            byte |= 0x80;
        out.push_back(byte);
    } while (value != 0);
}

inline void write_signed(std::vector<uint8_t>& out, int64_t value)
{
    bool more = true;
    while (more)
    {
        uint8_t byte = value & 0x7F;
        value >>= 7;  // arithmetic shift
        const bool sign_bit = (byte & 0x40) != 0;
        if ((value == 0 && !sign_bit) || (value == -1 && sign_bit))
            more = false;
        else
            byte |= 0x80;
        out.push_back(byte);
    }
}

template <typename T>
struct Decoded {
    T value;
    size_t length;
};

/// Reads an unsigned LEB128 of at most `bits` significant bits. Returns nullopt on
/// truncation, overlong encodings or unused bits set in the final byte.
inline std::optional<Decoded<uint64_t>> read_unsigned(std::span<const uint8_t> in, unsigned bits)
{
    const size_t max_bytes = (bits + 6) / 7;
    uint64_t result = 0;
    for (size_t i = 0; i < max_bytes; ++i)
    {
        if (i >= in.size())
            return std::nullopt;
        const uint8_t byte = in[i];
        const unsigned shift = static_cast<unsigned>(7 * i);
        if (i == max_bytes - 1)
        {
            const unsigned remaining = bits - shift;
            if ((byte & 0x80) != 0)
                return std::nullopt;
            if (remaining < 7 && (byte >> remaining) != 0)
                return std::nullopt;
        }
        result |= static_cast<uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0)
            return Decoded<uint64_t>{result, i + 1};
    }
    return std::nullopt;
}

inline std::optional<Decoded<int64_t>> read_signed(std::span<const uint8_t> in, unsigned bits)
{
    const size_t max_bytes = (bits + 6) / 7;
    uint64_t result = 0;
    for (size_t i = 0; i < max_bytes; ++i)
    {
        if (i >= in.size())
            return std::nullopt;
        const uint8_t byte = in[i];
        const unsigned shift = static_cast<unsigned>(7 * i);
        if (i == max_bytes - 1)
        {
            if ((byte & 0x80) != 0)
                return std::nullopt;
            // The unused high bits of the last byte must all equal the sign bit.
            const unsigned remaining = bits - shift;
            if (remaining < 7)
            {
                const uint8_t rest = static_cast<uint8_t>((byte & 0x7F) >> (remaining - 1));
                const uint8_t all_ones = static_cast<uint8_t>(0x7F >> (remaining - 1));
                if (rest != 0 && rest != all_ones)
                    return std::nullopt;
            }
        }
        result |= static_cast<uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0)
        {
            const unsigned consumed = shift + 7;
            if (consumed < 64 && (byte & 0x40) != 0)
                result |= ~uint64_t{0} << consumed;
            return Decoded<int64_t>{static_cast<int64_t>(result), i + 1};
        }
    }
    return std::nullopt;
}

}  // namespace sentinel::wat::leb128
