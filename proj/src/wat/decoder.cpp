// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/leb128.hpp"
#include "sentinel/wat/wat.hpp"

#include <array>

namespace sentinel::wat {
namespace {

class Reader
{
public:
    Reader(std::span<const uint8_t> bytes, size_t base) : bytes_{bytes}, base_{base} {}

    size_t offset() const noexcept { return base_ + pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }
    size_t remaining() const noexcept { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& reason) const { throw DecodeError(offset(), reason); }

    uint8_t byte()
    {
        if (at_end())
            fail("unexpected end");
        return bytes_[pos_++];
    }

    uint32_t u32()
    {
        const auto r = leb128::read_unsigned(bytes_.subspan(pos_), 32);
        if (!r)
            fail(remaining() == 0 ? "unexpected end" : "malformed varint");
        pos_ += r->length;
        return static_cast<uint32_t>(r->value);
    }

    int64_t s(unsigned bits)
    {
        const auto r = leb128::read_signed(bytes_.subspan(pos_), bits);
        if (!r)
            fail(remaining() == 0 ? "unexpected end" : "malformed varint");
        pos_ += r->length;
        return r->value;
    }

    template <typename T>
    T le()
    {
        if (remaining() < sizeof(T))
            fail("unexpected end");
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }

    std::span<const uint8_t> take(size_t n)
    {
        if (remaining() < n)
            fail("unexpected end");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    /// Sub-reader over the next `n` bytes, advancing past them.
    Reader sub(size_t n)
    {
        const size_t start = offset();
        return Reader(take(n), start);
    }

    std::string name()
    {
        const uint32_t len = u32();
        const auto raw = take(len);
        return std::string(raw.begin(), raw.end());
    }

    ValType valtype()
    {
        const size_t at = offset();
        const auto t = val_type_from_byte(byte());
        if (!t)
            throw DecodeError(at, "invalid value type");
        return *t;
    }

    Limits limits()
    {
        const size_t at = offset();
        const uint8_t flag = byte();
        Limits l;
        if (flag == 0x00)
            l.min = u32();
        else if (flag == 0x01)
        {
            l.min = u32();
            l.max = u32();
        }
        else
            throw DecodeError(at, "invalid limits flag");
        return l;
    }

    GlobalType global_type()
    {
        GlobalType g;
        g.type = valtype();
        const size_t at = offset();
        const uint8_t mut = byte();
        if (mut > 1)
            throw DecodeError(at, "invalid mutability");
        g.is_mutable = mut == 1;
        return g;
    }

    Instr instr()
    {
        const size_t at = offset();
        uint8_t prefix = byte();
        uint32_t code = prefix;
        if (prefix == 0xFD)
            code = u32();
        else
            prefix = 0;
        const auto op = opcode_by_encoding(prefix, code);
        if (!op)
            throw DecodeError(at, "unknown opcode");

        Instr instr{*op, {}};
        switch (op_info(*op).imm)
        {
        case ImmKind::None:
            break;
        case ImmKind::LocalIndex:
        case ImmKind::GlobalIndex:
        case ImmKind::FuncIndex:
            instr.imm = Index{u32()};
            break;
        case ImmKind::I32:
            instr.imm = static_cast<int32_t>(s(32));
            break;
        case ImmKind::I64:
            instr.imm = s(64);
            break;
        case ImmKind::F32:
            instr.imm = F32Bits{le<uint32_t>()};
            break;
        case ImmKind::F64:
            instr.imm = F64Bits{le<uint64_t>()};
            break;
        case ImmKind::V128: {
            V128Bytes v;
            const auto raw = take(16);
            std::copy(raw.begin(), raw.end(), v.bytes.begin());
            instr.imm = v;
            break;
        }
        case ImmKind::MemArg: {
            MemArg m;
            m.align = u32();
            m.offset = u32();
            instr.imm = m;
            break;
        }
        case ImmKind::MemoryZero: {
            const size_t zat = offset();
            if (byte() != 0x00)
                throw DecodeError(zat, "expected zero memory index");
            break;
        }
        case ImmKind::Lane:
            instr.imm = LaneIndex{byte()};
            break;
        }
        return instr;
    }

    Instr const_expr()
    {
        Instr i = instr();
        const size_t at = offset();
        if (byte() != 0x0B)
            throw DecodeError(at, "constant expression must be a single instruction");
        return i;
    }

    void expect_end(const char* what) const
    {
        if (!at_end())
            fail(std::string("trailing bytes in ") + what);
    }

private:
    std::span<const uint8_t> bytes_;
    size_t base_;
    size_t pos_ = 0;
};

bool is_supported_section(uint8_t id)
{
    switch (id)
    {
    case 1:
    case 2:
    case 3:
    case 5:
    case 6:
    case 7:
    case 8:
    case 10:
    case 11:
        return true;
    default:
        return false;
    }
}

}  // namespace

Module decode_module(std::span<const uint8_t> bytes)
{
    constexpr std::array<uint8_t, 4> magic = {0x00, 0x61, 0x73, 0x6D};
    constexpr std::array<uint8_t, 4> version = {0x01, 0x00, 0x00, 0x00};

    for (size_t i = 0; i < 4; ++i)
        if (i >= bytes.size() || bytes[i] != magic[i])
            throw DecodeError(i >= bytes.size() ? bytes.size() : 0, "bad magic");
    if (bytes.size() < 8)
        throw DecodeError(bytes.size(), "unexpected end");
    for (size_t i = 0; i < 4; ++i)
        if (bytes[4 + i] != version[i])
            throw DecodeError(4, "unsupported version");

    Module m;
    std::vector<uint32_t> func_type_indices;
    bool have_code = false;
    uint8_t last_id = 0;

    Reader r(bytes.subspan(8), 8);
    while (!r.at_end())
    {
        const size_t id_at = r.offset();
        const uint8_t id = r.byte();
        const uint32_t size = r.u32();
        Reader s = r.sub(size);

        if (id == 0)
        {
            CustomSection c;
            c.name = s.name();
            const auto rest = s.take(s.remaining());
            c.bytes.assign(rest.begin(), rest.end());
            c.after = last_id;
            m.customs.push_back(std::move(c));
            continue;
        }
        if (!is_supported_section(id))
            throw DecodeError(id_at, "unsupported section id " + std::to_string(id));
        if (id <= last_id)
            throw DecodeError(id_at, "section out of order");
        last_id = id;

        const auto type_at = [&](uint32_t idx, size_t at) -> const FuncType& {
            if (idx >= m.types.size())
                throw DecodeError(at, "type index out of range");
            return m.types[idx];
        };

        switch (id)
        {
        case 1: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                const size_t at = s.offset();
                if (s.byte() != 0x60)
                    throw DecodeError(at, "expected function type");
                FuncType t;
                for (uint32_t k = s.u32(); k > 0; --k)
                    t.params.push_back(s.valtype());
                for (uint32_t k = s.u32(); k > 0; --k)
                    t.results.push_back(s.valtype());
                m.types.push_back(std::move(t));
            }
            break;
        }
        case 2: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                Import imp;
                imp.module_name = s.name();
                imp.item_name = s.name();
                const size_t at = s.offset();
                switch (s.byte())
                {
                case 0x00: {
                    const size_t tat = s.offset();
                    imp.desc = type_at(s.u32(), tat);
                    break;
                }
                case 0x02:
                    imp.desc = s.limits();
                    break;
                case 0x03:
                    imp.desc = s.global_type();
                    break;
                default:
                    throw DecodeError(at, "unsupported import kind");
                }
                m.imports.push_back(std::move(imp));
            }
            break;
        }
        case 3: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                const size_t at = s.offset();
                const uint32_t idx = s.u32();
                type_at(idx, at);
                func_type_indices.push_back(idx);
            }
            break;
        }
        case 5: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
                m.memories.push_back(s.limits());
            break;
        }
        case 6: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                Global g;
                g.type = s.global_type();
                g.init = s.const_expr();
                m.globals.push_back(g);
            }
            break;
        }
        case 7: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                Export e;
                e.name = s.name();
                const size_t at = s.offset();
                const uint8_t kind = s.byte();
                if (kind > 0x03)
                    throw DecodeError(at, "invalid export kind");
                e.kind = static_cast<ExternKind>(kind);
                e.index = s.u32();
                m.exports.push_back(std::move(e));
            }
            break;
        }
        case 8:
            m.start = s.u32();
            break;
        case 10: {
            have_code = true;
            const size_t count_at = s.offset();
            const uint32_t n = s.u32();
            if (n != func_type_indices.size())
                throw DecodeError(count_at, "function and code section counts differ");
            for (uint32_t i = 0; i < n; ++i)
            {
                const uint32_t body_size = s.u32();
                Reader b = s.sub(body_size);
                FuncDef f;
                const auto& sig = m.types[func_type_indices[i]];
                f.params = sig.params;
                f.results = sig.results;
                for (uint32_t runs = b.u32(); runs > 0; --runs)
                {
                    const size_t at = b.offset();
                    const uint32_t count = b.u32();
                    if (f.locals.size() + count > 50000)
                        throw DecodeError(at, "too many locals");
                    const ValType t = b.valtype();
                    f.locals.insert(f.locals.end(), count, t);
                }
                for (;;)
                {
                    if (b.at_end())
                        b.fail("unexpected end of function body");
                    if (b.remaining() == 1)
                    {
                        const size_t at = b.offset();
                        if (b.byte() != 0x0B)
                            throw DecodeError(at, "function body must end with end opcode");
                        break;
                    }
                    f.body.push_back(b.instr());
                }
                m.funcs.push_back(std::move(f));
            }
            break;
        }
        case 11: {
            const uint32_t n = s.u32();
            for (uint32_t i = 0; i < n; ++i)
            {
                const size_t at = s.offset();
                if (s.u32() != 0)
                    throw DecodeError(at, "only active data segments for memory 0 are supported");
                DataSegment d;
                d.offset = s.const_expr();
                const uint32_t len = s.u32();
                const auto raw = s.take(len);
                d.bytes.assign(raw.begin(), raw.end());
                m.data.push_back(std::move(d));
            }
            break;
        }
        default:
            break;
        }
        s.expect_end("section");
    }

    if (!func_type_indices.empty() && !have_code)
        throw DecodeError(bytes.size(), "function section without code section");

    normalize_export_names(m);
    return m;
}

}  // namespace sentinel::wat
