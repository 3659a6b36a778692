// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sentinel/eval/value.hpp"
#include "sentinel/wat/ast.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sentinel::eval {

enum class TrapKind { Unreachable, IntegerDivideByZero, IntegerOverflow };

std::string_view to_string(TrapKind kind) noexcept;

struct EvalOutcome {
    std::vector<Value> results;
    std::optional<TrapKind> trap;

    bool trapped() const noexcept { return trap.has_value(); }
};

class EvalError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// The instruction is outside the evaluable subset (memory, host calls).
class UnsupportedInstr : public EvalError
{
    using EvalError::EvalError;
};

class SignatureMismatch : public EvalError
{
    using EvalError::EvalError;
};

class LaneOutOfRange : public EvalError
{
    using EvalError::EvalError;
};

/// Evaluates the exported function `export_name` on `args` with core numeric semantics.
///
/// Supports straight-line bodies: numeric, SIMD lane, local, global and calls to
/// non-imported functions. Memory instructions and imported calls throw UnsupportedInstr.
EvalOutcome eval_func(const wat::Module& module, std::string_view export_name, std::span<const Value> args);

/// Applies one SIMD instruction to its operands (in stack order, bottom first).
Value eval_lane_op(const wat::Instr& op, std::span<const Value> inputs);

/// True when every instruction reachable from `export_name` is in the evaluable subset.
bool is_evaluable(const wat::Module& module, std::string_view export_name);

}  // namespace sentinel::eval
