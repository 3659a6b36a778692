// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/leb128.hpp"
#include "sentinel/wat/wat.hpp"

#include <array>

namespace sentinel::wat {
namespace {

constexpr std::array<uint8_t, 8> preamble = {0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};

void put_u32(Bytes& out, uint32_t v)
{
    leb128::write_unsigned(out, v);
}

void put_name(Bytes& out, std::string_view s)
{
    put_u32(out, static_cast<uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_limits(Bytes& out, const Limits& l)
{
    out.push_back(l.max ? 0x01 : 0x00);
    put_u32(out, l.min);
    if (l.max)
        put_u32(out, *l.max);
}

void put_valtypes(Bytes& out, const std::vector<ValType>& types)
{
    put_u32(out, static_cast<uint32_t>(types.size()));
    for (const auto t : types)
        out.push_back(static_cast<uint8_t>(t));
}

template <typename T>
void put_le(Bytes& out, T v)
{
    for (size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

template <typename T>
const T& expect_imm(const Instr& instr)
{
    const auto* p = std::get_if<T>(&instr.imm);
    if (p == nullptr)
        throw EncodeError("immediate does not match opcode " + std::string(op_info(instr.op).name));
    return *p;
}

void put_instr(Bytes& out, const Instr& instr)
{
    const auto& info = op_info(instr.op);
    if (info.prefix != 0)
    {
        out.push_back(info.prefix);
        put_u32(out, info.code);
    }
    else
    {
        out.push_back(static_cast<uint8_t>(info.code));
    }

    switch (info.imm)
    {
    case ImmKind::None:
        if (!std::holds_alternative<std::monostate>(instr.imm))
            throw EncodeError("unexpected immediate on " + std::string(info.name));
        break;
    case ImmKind::LocalIndex:
    case ImmKind::GlobalIndex:
    case ImmKind::FuncIndex:
        put_u32(out, expect_imm<Index>(instr).value);
        break;
    case ImmKind::I32:
        leb128::write_signed(out, expect_imm<int32_t>(instr));
        break;
    case ImmKind::I64:
        leb128::write_signed(out, expect_imm<int64_t>(instr));
        break;
    case ImmKind::F32:
        put_le(out, expect_imm<F32Bits>(instr).bits);
        break;
    case ImmKind::F64:
        put_le(out, expect_imm<F64Bits>(instr).bits);
        break;
    case ImmKind::V128: {
        const auto& v = expect_imm<V128Bytes>(instr);
        out.insert(out.end(), v.bytes.begin(), v.bytes.end());
        break;
    }
    case ImmKind::MemArg: {
        const auto& m = expect_imm<MemArg>(instr);
        put_u32(out, m.align);
        put_u32(out, m.offset);
        break;
    }
    case ImmKind::MemoryZero:
        out.push_back(0x00);
        break;
    case ImmKind::Lane:
        out.push_back(expect_imm<LaneIndex>(instr).value);
        break;
    }
}

void put_const_expr(Bytes& out, const Instr& instr)
{
    put_instr(out, instr);
    out.push_back(0x0B);
}

uint32_t type_index(const Module& m, const FuncType& sig)
{
    const auto idx = m.find_type(sig);
    if (!idx)
        throw EncodeError("function signature missing from type section");
    return *idx;
}

void put_locals(Bytes& out, const std::vector<ValType>& locals)
{
    std::vector<std::pair<uint32_t, ValType>> runs;
    for (const auto t : locals)
    {
        if (!runs.empty() && runs.back().second == t)
            ++runs.back().first;
        else
            runs.emplace_back(1, t);
    }
    put_u32(out, static_cast<uint32_t>(runs.size()));
    for (const auto& [count, type] : runs)
    {
        put_u32(out, count);
        out.push_back(static_cast<uint8_t>(type));
    }
}

class SectionWriter
{
public:
    SectionWriter(Bytes& out, const std::vector<CustomSection>& customs) : out_{out}, customs_{customs} {}

    void emit(uint8_t id, const Bytes& content)
    {
        flush_customs_before(id);
        write(id, content);
    }

    void finish() { flush_customs_before(0xFF); }

private:
    void write(uint8_t id, const Bytes& content)
    {
        out_.push_back(id);
        put_u32(out_, static_cast<uint32_t>(content.size()));
        out_.insert(out_.end(), content.begin(), content.end());
    }

    void flush_customs_before(uint8_t id)
    {
        // Customs are emitted in ascending `after` order, stable within equal placement.
        for (uint8_t after = 0; after < id && after <= 11; ++after)
        {
            if (flushed_[after])
                continue;
            flushed_[after] = true;
            for (const auto& c : customs_)
            {
                if (c.after != after)
                    continue;
                Bytes content;
                put_name(content, c.name);
                content.insert(content.end(), c.bytes.begin(), c.bytes.end());
                write(0x00, content);
            }
        }
    }

    Bytes& out_;
    const std::vector<CustomSection>& customs_;
    std::array<bool, 12> flushed_{};
};

}  // namespace

Bytes encode_module(const Module& m)
{
    if (m.total_memory_count() > 1)
        throw EncodeError("more than one memory is outside the supported subset");
    for (const auto& c : m.customs)
        if (c.after > 11)
            throw EncodeError("custom section placement beyond the data section");

    Bytes out(preamble.begin(), preamble.end());
    SectionWriter sections(out, m.customs);

    if (!m.types.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.types.size()));
        for (const auto& t : m.types)
        {
            s.push_back(0x60);
            put_valtypes(s, t.params);
            put_valtypes(s, t.results);
        }
        sections.emit(1, s);
    }

    if (!m.imports.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.imports.size()));
        for (const auto& imp : m.imports)
        {
            put_name(s, imp.module_name);
            put_name(s, imp.item_name);
            if (const auto* sig = std::get_if<FuncType>(&imp.desc))
            {
                s.push_back(0x00);
                put_u32(s, type_index(m, *sig));
            }
            else if (const auto* lim = std::get_if<Limits>(&imp.desc))
            {
                s.push_back(0x02);
                put_limits(s, *lim);
            }
            else
            {
                const auto& g = std::get<GlobalType>(imp.desc);
                s.push_back(0x03);
                s.push_back(static_cast<uint8_t>(g.type));
                s.push_back(g.is_mutable ? 0x01 : 0x00);
            }
        }
        sections.emit(2, s);
    }

    if (!m.funcs.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.funcs.size()));
        for (const auto& f : m.funcs)
            put_u32(s, type_index(m, f.signature()));
        sections.emit(3, s);
    }

    if (!m.memories.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.memories.size()));
        for (const auto& l : m.memories)
            put_limits(s, l);
        sections.emit(5, s);
    }

    if (!m.globals.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.globals.size()));
        for (const auto& g : m.globals)
        {
            s.push_back(static_cast<uint8_t>(g.type.type));
            s.push_back(g.type.is_mutable ? 0x01 : 0x00);
            put_const_expr(s, g.init);
        }
        sections.emit(6, s);
    }

    if (!m.exports.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.exports.size()));
        for (const auto& e : m.exports)
        {
            put_name(s, e.name);
            s.push_back(static_cast<uint8_t>(e.kind));
            put_u32(s, e.index);
        }
        sections.emit(7, s);
    }

    if (m.start)
    {
        Bytes s;
        put_u32(s, *m.start);
        sections.emit(8, s);
    }

    if (!m.funcs.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.funcs.size()));
        for (const auto& f : m.funcs)
        {
            Bytes body;
            put_locals(body, f.locals);
            for (const auto& instr : f.body)
                put_instr(body, instr);
            body.push_back(0x0B);
            put_u32(s, static_cast<uint32_t>(body.size()));
            s.insert(s.end(), body.begin(), body.end());
        }
        sections.emit(10, s);
    }

    if (!m.data.empty())
    {
        Bytes s;
        put_u32(s, static_cast<uint32_t>(m.data.size()));
        for (const auto& d : m.data)
        {
            put_u32(s, 0);  // active, memory 0
            put_const_expr(s, d.offset);
            put_u32(s, static_cast<uint32_t>(d.bytes.size()));
            s.insert(s.end(), d.bytes.begin(), d.bytes.end());
        }
        sections.emit(11, s);
    }

    sections.finish();
    return out;
}

}  // namespace sentinel::wat
