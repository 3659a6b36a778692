// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/corpus/category.hpp"

#include <array>
#include <cctype>
#include <string>

namespace sentinel::corpus {

namespace {
using enum Category;

constexpr std::array<CategoryInfo, 30> kCategories{{
    {A1, "A.1", "Incompatible infrastructure version", false},
    {A2, "A.2", "Incorrect compilation", true},
    {A3, "A.3", "Compilation failure", true},
    {A4, "A.4", "Register allocation error", true},
    {A5, "A.5", "Incomplete operating system support", true},
    {A6, "A.6", "Incomplete hardware support", false},
    {A7, "A.7", "Unsupported data operation", true},
    {A8, "A.8", "Validation error", true},
    {A9, "A.9", "WASM debugging information error", true},
    {A10, "A.10", "Others", false},
    {B1, "B.1", "File operation error", true},
    {B2, "B.2", "Import error", true},
    {B3, "B.3", "Unsupported operation", true},
    {B4, "B.4", "Input and output stream error", true},
    {B5, "B.5", "Operating system support error", true},
    {B6, "B.6", "WASI version error", false},
    {B7, "B.7", "Other counterpart error", false},
    {B8, "B.8", "Clock bugs", false},
    {C1, "C.1", "Module instantiation faults", true},
    {C2, "C.2", "Module import error", true},
    {C3, "C.3", "Calling host functions", true},
    {C4, "C.4", "Memory issue", true},
    {C5, "C.5", "Trap error", true},
    {C6, "C.6", "Unsupported features", false},
    {C7, "C.7", "Thread safety issue", false},
    {C8, "C.8", "Stack issue", false},
    {C9, "C.9", "Entry point error", true},
    {C10, "C.10", "Unhandled error", true},
    {C11, "C.11", "Data type conversion", false},
    {C12, "C.12", "Others", false},
}};

constexpr std::array<Category, 19> kDetectorRows{A2, A3, A4, A5, A7, A8, A9, B1, B2, B3,
                                                 B4, B5, C1, C2, C3, C4, C5, C9, C10};
}  // namespace

std::span<const CategoryInfo> all_categories() noexcept
{
    return kCategories;
}

std::span<const Category> detector_categories() noexcept
{
    return kDetectorRows;
}

const CategoryInfo& info(Category c) noexcept
{
    return kCategories[static_cast<size_t>(c)];
}

std::optional<Category> category_from_code(std::string_view code) noexcept
{
    if (code.size() < 2)
        return std::nullopt;
    std::string norm;
    norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(code[0]))));
    code.remove_prefix(1);
    if (!code.empty() && code.front() == '.')
        code.remove_prefix(1);
    norm.push_back('.');
    norm.append(code);
    for (const auto& c : kCategories)
        if (c.code == norm)
            return c.id;
    return std::nullopt;
}

}  // namespace sentinel::corpus
