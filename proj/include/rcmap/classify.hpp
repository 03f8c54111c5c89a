#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcmap/rcmaps.hpp"
#include "rcmap/space.hpp"

namespace rcmap {

inline constexpr std::uint64_t kDefaultSearchBudget = std::uint64_t{1} << 22;

struct Equivalence {
    Mat P;
    Mat Q;
};

struct EquivalenceSearch {
    std::optional<Equivalence> found;
    /// False when the node budget ran out before the search finished.
    bool exhausted = true;
    std::uint64_t nodes = 0;
};

/// Searches (P, Q) with P S Q^{-1} = C by backtracking over the columns of
/// Q^{-1}, pruned by dim S(Q^{-1} w) = dim C w, then solving linearly for P.
/// With `scale_columns` the columns of Q^{-1} are restricted to projective
/// representatives, which is valid whenever C is stable under
/// M -> D' M D for every invertible diagonal D (with some diagonal D').
EquivalenceSearch find_equivalence(const Space& s, const Space& c, std::uint64_t budget = kDefaultSearchBudget,
                                   bool scale_columns = false);

/// Multiset (sorted) of dim Sx over projective x.
std::vector<std::size_t> sx_profile(const Space& s);
/// Multiset (sorted) of ranks over every nonzero element. Budgeted.
std::vector<std::size_t> rank_profile(const Space& s, std::uint64_t budget = kDefaultElementBudget);

struct TypeReport {
    SpaceType verdict = SpaceType::None;
    std::vector<Vec> type1_witnesses;
    std::optional<Mat> P;
    std::optional<Mat> Q;
    /// "scan" (type 1), "canonical" (already in canonical form),
    /// "invariant+search", or "prefilter" (rejected by invariants).
    std::string method;
    bool search_exhausted = true;
    std::uint64_t nodes = 0;

    TypeCertificate certificate() const;
};

/// Detects Types 1, 2 and 3. Every candidate type is tested; more than one
/// positive verdict raises InvariantViolation.
TypeReport detect_type(const Space& s, std::uint64_t budget = kDefaultSearchBudget);

struct AdaptedEntry {
    Vec y;
    std::size_t perp_dim = 0;
    std::size_t codim_formula = 0;
    std::size_t codim_direct = 0;
    bool adapted = false;
    /// codim(S mod y) <= 2(n-1) - 4.
    bool super_codim = false;
    /// dim S^perp y > 2.
    bool super_perp = false;
};

struct AdaptedReport {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t codim = 0;
    std::vector<AdaptedEntry> entries;
    /// Non-adapted vectors span a subspace of dimension <= n - 1.
    bool hyperplane_cover = false;
    /// For n = 3 without a hyperplane cover: which listed space S is
    /// equivalent to ("zero_col", "K1", "K2", "K3"), if any.
    std::optional<std::string> exceptional;
    std::optional<Equivalence> exceptional_certificate;
    bool search_exhausted = true;
    /// Formula and direct projection agree on every line.
    bool formula_consistent = true;
};

AdaptedReport adapted_vectors(const Space& s, std::uint64_t budget = kDefaultSearchBudget);

struct GateReport {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t codim = 0;
    std::size_t dn = 0;
    bool codim_le_n_minus_2 = false;
    bool codim_le_dn = false;
    bool codim_le_2n_minus_3 = false;
    bool p_ge_2 = false;
    unsigned characteristic = 0;
    bool field_gt_2 = false;
};

/// d_n(K): 2n - 3 when |K| > 2, else 2n - 4 (saturating at 0).
std::size_t d_n(Field f, std::size_t n);
GateReport theorem_gate(const Space& s);

}  // namespace rcmap
