#pragma once

#include <cstdint>
#include <optional>

#include "rcmap/space.hpp"

namespace rcmap {

/// R(S) = {g : g x in S x for every x}. With `projective_only` only one
/// vector per line contributes constraints (the result is the same).
Space reflexive_closure(const Space& s, std::uint64_t budget = kDefaultElementBudget, bool projective_only = true);

struct ReducedReport {
    bool reduced = false;
    /// Nonzero x with M x = 0 for every M in S.
    std::optional<Vec> kernel_vector;
    /// Nonzero y with y^T M = 0 for every M in S (the ranges miss ker y^T).
    std::optional<Vec> range_form;
};

ReducedReport is_reduced(const Space& s);

struct ReflexReport {
    std::size_t dim = 0;
    std::size_t closure_dim = 0;
    bool is_reflexive = false;
    ReducedReport reduced;
    std::size_t hat_rc_dim = 0;
    /// dim U >= dim S dim V - 2 dim V + c, c = 3 (|K| > 2) or 4.
    bool bound_ok = false;
};

/// Throws InvariantViolation when dim R(S) differs from the K-dimension of
/// the range-compatible linear maps on the hat space.
ReflexReport reflexivity_report(const Space& s, std::uint64_t budget = kDefaultElementBudget);

/// The dimension bound alone.
bool reflexivity_bound_ok(Field f, std::size_t n, std::size_t p, std::size_t dim);

}  // namespace rcmap
