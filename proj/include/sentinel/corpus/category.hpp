// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace sentinel::corpus {

/// Leaf categories of the runtime bug taxonomy.
/// A: backend compilation, B: WASI robustness, C: runtime environment.
enum class Category {
    A1, A2, A3, A4, A5, A6, A7, A8, A9, A10,
    B1, B2, B3, B4, B5, B6, B7, B8,
    C1, C2, C3, C4, C5, C6, C7, C8, C9, C10, C11, C12,
};

struct CategoryInfo {
    Category id;
    std::string_view code;  // "A.2"
    std::string_view name;
    bool detector_backed;
};

/// All 30 named leaves in taxonomy order.
std::span<const CategoryInfo> all_categories() noexcept;

/// The 19 categories that have detectors, in matrix row order.
std::span<const Category> detector_categories() noexcept;

const CategoryInfo& info(Category c) noexcept;

inline std::string_view to_string(Category c) noexcept { return info(c).code; }

/// Accepts "A.2", "A2" or "a.2".
std::optional<Category> category_from_code(std::string_view code) noexcept;

}  // namespace sentinel::corpus
