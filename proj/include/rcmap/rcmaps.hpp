#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcmap/additive_map.hpp"
#include "rcmap/endo.hpp"
#include "rcmap/space.hpp"

namespace rcmap {

struct MapFlavor {
    enum class Kind { Linear, Additive, Semilinear };
    Kind kind = Kind::Linear;
    /// Frobenius exponent for semilinear maps, 0 <= sigma < k.
    unsigned sigma = 0;

    static MapFlavor linear() { return {Kind::Linear, 0}; }
    static MapFlavor additive() { return {Kind::Additive, 0}; }
    /// semilinear(0) is normalized to linear.
    static MapFlavor semilinear(unsigned s) { return s == 0 ? linear() : MapFlavor{Kind::Semilinear, s}; }

    /// "linear", "additive" or "semilinear:i".
    static MapFlavor parse(const std::string& text);
    std::string name() const;

    friend bool operator==(const MapFlavor&, const MapFlavor&) = default;
};

/// A GF(p)-basis of a space of homomorphisms from a Space into K^m.
///
/// The basis is canonical: the reduced echelon form of the flattened map
/// matrices. Two spaces with the same domain and target are equal iff their
/// bases coincide.
class RCMapSpace {
public:
    RCMapSpace(Space domain, std::size_t target_rows, MapFlavor flavor, std::vector<AdditiveMap> basis);

    const Space& domain() const noexcept { return domain_; }
    std::size_t target_rows() const noexcept { return m_; }
    MapFlavor flavor() const noexcept { return flavor_; }
    const std::vector<AdditiveMap>& basis() const noexcept { return basis_; }

    /// Dimension over GF(p).
    std::size_t kdim() const noexcept { return basis_.size(); }
    /// Dimension over K (linear and semilinear flavors).
    std::optional<std::size_t> Kdim() const;

    bool contains(const AdditiveMap& f) const;
    /// Same span (flavor tags are ignored).
    bool same_span(const RCMapSpace& o) const;

private:
    Space domain_;
    std::size_t m_;
    MapFlavor flavor_;
    std::vector<AdditiveMap> basis_;
};

/// Canonical GF(p)-span of maps sharing a domain and target.
std::vector<AdditiveMap> canonical_span(const Space& domain, std::size_t target_rows,
                                        const std::vector<AdditiveMap>& maps);

/// Space of range-compatible maps S -> K^n of the given flavor.
///
/// Every GF(p)-projective element of S contributes the constraints
/// y^T F(M) = 0 for y in a basis of the left kernel of M. Throws
/// BudgetExceeded when S has more than `budget` elements.
RCMapSpace rc_space(const Space& s, MapFlavor flavor, std::uint64_t budget = kDefaultElementBudget);

struct LocalSpace {
    RCMapSpace maps;
    std::vector<Vec> kernel;
};
/// The evaluation maps M -> M x, and the common kernel of S.
LocalSpace local_space(const Space& s);

struct LocalWitness {
    Vec x;
    std::vector<Vec> ambiguity;
};
/// The lexicographically smallest x with F(M) = M x on S, or nothing.
std::optional<LocalWitness> is_local(const Space& s, const AdditiveMap& f);

/// F(M) in im M for every M in the domain (full enumeration).
bool is_range_compatible(const AdditiveMap& f, std::uint64_t budget = kDefaultElementBudget);

struct Type1Kind {
    Vec x;
    AdditiveEndo alpha;
};
struct DiagKind {
    AdditiveEndo alpha;
    std::size_t r;
};

/// s -> alpha((s x)_{i0}) u, where u spans Sx with u_{i0} = 1 at its first
/// nonzero entry. Verified range-compatible before return.
AdditiveMap exceptional_map(const Type1Kind& kind, const Space& s, std::uint64_t budget = kDefaultElementBudget);
/// M -> (alpha(m_11), ..., alpha(m_rr), 0, ...). Verified range-compatible.
AdditiveMap exceptional_map(const DiagKind& kind, const Space& s, std::uint64_t budget = kDefaultElementBudget);

enum class SpaceType { None, Type1, Type2, Type3, Inconclusive };
std::string type_name(SpaceType t);

/// Evidence that a Space is of a given exceptional type: type-1 witnesses x
/// with dim Sx = 1, or (P, Q) with P S Q^{-1} equal to the canonical space.
struct TypeCertificate {
    SpaceType type = SpaceType::None;
    std::vector<Vec> type1_witnesses;
    std::optional<Mat> P;
    std::optional<Mat> Q;
};

struct ExceptionalPart {
    /// "type1" or "diag".
    std::string kind;
    /// Type-1 witness, or empty for diag parts.
    std::optional<Vec> x;
    std::size_t r = 0;
    AdditiveEndo alpha;
    AdditiveMap map;
};

struct Decomposition {
    Vec x;
    std::vector<ExceptionalPart> exceptional;
};

/// Raised when no local + exceptional decomposition exists. Carries the
/// part of F left after reducing it against every candidate generator.
class DecompositionFailure : public Error {
public:
    DecompositionFailure(const std::string& what, AdditiveMap residual)
        : Error(what), residual_(std::move(residual)) {}
    const AdditiveMap& residual() const noexcept { return residual_; }

private:
    AdditiveMap residual_;
};

/// F = eval_x + sum of exceptional maps, by one joint GF(p)-linear solve.
Decomposition decompose_rc(const Space& s, const AdditiveMap& f, const TypeCertificate& cert);

/// F mod y on S mod y, with (F mod y)(pi M) = pi F(M).
AdditiveMap project_map(const Space& s, const AdditiveMap& f, const Vec& y);

/// f coprod g on A coprod B: [X Y] -> f(X) + g(Y).
AdditiveMap join_maps(const Space& a, const Space& b, const AdditiveMap& f, const AdditiveMap& g);
/// Inverse of join_maps: X -> F([X 0]), Y -> F([0 Y]).
std::pair<AdditiveMap, AdditiveMap> split_map(const Space& a, const Space& b, const AdditiveMap& f);

}  // namespace rcmap
