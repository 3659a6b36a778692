// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/ast.hpp"
#include "sentinel/wat/wat.hpp"

#include <algorithm>

namespace sentinel::wat {

std::string_view to_string(ValType t) noexcept
{
    switch (t)
    {
    case ValType::I32:
        return "i32";
    case ValType::I64:
        return "i64";
    case ValType::F32:
        return "f32";
    case ValType::F64:
        return "f64";
    case ValType::V128:
        return "v128";
    }
    return "?";
}

std::optional<ValType> val_type_from_byte(uint8_t b) noexcept
{
    switch (b)
    {
    case 0x7F:
    case 0x7E:
    case 0x7D:
    case 0x7C:
    case 0x7B:
        return static_cast<ValType>(b);
    default:
        return std::nullopt;
    }
}

uint32_t Module::intern_type(const FuncType& type)
{
    if (const auto found = find_type(type))
        return *found;
    types.push_back(type);
    return static_cast<uint32_t>(types.size() - 1);
}

std::optional<uint32_t> Module::find_type(const FuncType& type) const
{
    const auto it = std::find(types.begin(), types.end(), type);
    if (it == types.end())
        return std::nullopt;
    return static_cast<uint32_t>(it - types.begin());
}

namespace {
template <typename T>
uint32_t count_imports(const std::vector<Import>& imports)
{
    return static_cast<uint32_t>(std::count_if(
        imports.begin(), imports.end(), [](const Import& i) { return std::holds_alternative<T>(i.desc); }));
}
}  // namespace

uint32_t Module::imported_func_count() const
{
    return count_imports<FuncType>(imports);
}

uint32_t Module::imported_memory_count() const
{
    return count_imports<Limits>(imports);
}

uint32_t Module::imported_global_count() const
{
    return count_imports<GlobalType>(imports);
}

std::optional<FuncType> Module::func_signature(uint32_t index) const
{
    for (const auto& imp : imports)
    {
        if (const auto* sig = std::get_if<FuncType>(&imp.desc))
        {
            if (index == 0)
                return *sig;
            --index;
        }
    }
    if (index < funcs.size())
        return funcs[index].signature();
    return std::nullopt;
}

const Export* Module::find_export(std::string_view name) const
{
    const auto it = std::find_if(exports.begin(), exports.end(), [&](const Export& e) { return e.name == name; });
    return it == exports.end() ? nullptr : &*it;
}

void normalize_export_names(Module& module)
{
    const uint32_t imported = module.imported_func_count();
    for (auto& f : module.funcs)
        f.export_name.reset();
    for (const auto& e : module.exports)
    {
        if (e.kind != ExternKind::Func || e.index < imported)
            continue;
        const uint32_t local = e.index - imported;
        if (local < module.funcs.size() && !module.funcs[local].export_name)
            module.funcs[local].export_name = e.name;
    }
}

}  // namespace sentinel::wat
