#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcmap/error.hpp"
#include "rcmap/matrix.hpp"

namespace rcmap {

enum class Scalars { Field, Prime };

inline constexpr std::uint64_t kDefaultElementBudget = std::uint64_t{1} << 20;

/// Linear subspace (or, with prime scalars, additive subgroup) of Mat_{n,p}(K).
///
/// The stored basis is canonical: the reduced row echelon form of the
/// row-major flattened generators, over K for field scalars and over GF(p)
/// of the digit-flattened entries for prime scalars. Two spaces are equal iff
/// their stored bases are identical.
///
/// The GF(p)-basis (`gbasis`) orders t^j B_i at index i*k + j for field
/// scalars and coincides with the stored basis for prime scalars.
class Space {
public:
    static Space make(Field field, std::size_t rows, std::size_t cols, const std::vector<Mat>& generators,
                      Scalars scalars = Scalars::Field);

    Field field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Scalars scalars() const noexcept { return scalars_; }

    /// Dimension over the scalars.
    std::size_t dim() const noexcept { return basis_.size(); }
    /// Dimension over GF(p).
    std::size_t gdim() const noexcept { return gbasis_.size(); }
    /// Codimension in the ambient space over the same scalars.
    std::size_t codim() const noexcept;

    const std::vector<Mat>& basis() const noexcept { return basis_; }
    const std::vector<Mat>& gbasis() const noexcept { return gbasis_; }

    bool contains(const Mat& m) const;
    /// Coordinates over GF(p) in `gbasis`, or nothing when m is not a member.
    std::optional<std::vector<std::uint8_t>> gcoords(const Mat& m) const;
    /// Coordinates over K in `basis` (field scalars only).
    std::optional<std::vector<Elem>> coords(const Mat& m) const;
    Mat from_gcoords(const std::vector<std::uint8_t>& c) const;

    /// Number of elements p^gdim, saturated at UINT64_MAX.
    std::uint64_t element_count() const noexcept;
    /// Throws BudgetExceeded when element_count() exceeds `budget`.
    void require_enumerable(std::uint64_t budget, const char* what) const;

    /// Visits every element as (flat entries, GF(p) coordinates) in
    /// increasing coordinate code order, coordinate 0 least significant.
    /// With `skip_zero`, the zero element is not visited. The callback
    /// returns false to stop.
    template <class Fn>
    void for_each_element(Fn&& fn, bool skip_zero = false) const;

    bool operator==(const Space& o) const;
    bool operator!=(const Space& o) const { return !(*this == o); }
    bool is_subspace_of(const Space& o) const;

    std::string describe() const;

private:
    Space(Field f, std::size_t r, std::size_t c, Scalars s) : field_(f), rows_(r), cols_(c), scalars_(s) {}
    Field field_;
    std::size_t rows_;
    std::size_t cols_;
    Scalars scalars_;
    std::vector<Mat> basis_;
    std::vector<Mat> gbasis_;
    std::vector<std::size_t> pivots_;  // pivots in the flattened (digit-flattened for prime) layout
};

// Named constructions.
Space zero_space(Field f, std::size_t n, std::size_t p);
Space full_space(Field f, std::size_t n, std::size_t p);
Space symmetric_space(Field f, std::size_t n);
Space alternating_space(Field f, std::size_t n);
/// A v B = {[[A, C], [0, B]]}.
Space vee(const Space& a, const Space& b);
/// A coprod B = {[A B]}.
Space coprod(const Space& a, const Space& b);
Space transpose_space(const Space& s);
/// Rows appended below every matrix (embedding K^n into K^{n+extra}).
Space embed_rows(const Space& s, std::size_t extra);

/// K v Mat_{n-1,p-1}: matrices whose first column is a multiple of e_1.
Space type1_canonical(Field f, std::size_t n, std::size_t p);
/// S_2 v Mat_{n-2,p-2}.
Space type2_canonical(Field f, std::size_t n, std::size_t p);
/// S_3 coprod Mat_{3,p-3}.
Space type3_canonical(Field f, std::size_t p);
/// S_r v Mat_{n-r,p-r}.
Space symmetric_vee(Field f, std::size_t r, std::size_t n, std::size_t p);
/// {[[a, b], [0, a]]}.
Space intro_u(Field f);
/// U v Mat_{n-2,p-2}.
Space intro_u_extended(Field f, std::size_t n, std::size_t p);
/// S_2 v Mat_{n-2,p-2}, the characteristic-2 sharpness space.
Space f2_sharpness(Field f, std::size_t n, std::size_t p);
Space k_space(Field f, int index);
/// K e_1 inside Mat_{n,1}.
Space diag_line(Field f, std::size_t n);
/// {0} coprod Mat_{n,p-1}.
Space zero_column_space(Field f, std::size_t n, std::size_t p);

enum class SpaceLabel {
    Full,
    Symmetric,
    Alternating,
    Type1Canonical,
    Type2Canonical,
    Type3Canonical,
    IntroU,
    IntroUExtended,
    F2Sharpness,
    K1,
    K2,
    K3,
    K4,
    DiagLine,
    ZeroColumn,
};

struct SpaceParams {
    std::size_t n = 0;
    std::size_t p = 0;
};

SpaceLabel parse_space_label(const std::string& name);
std::string label_name(SpaceLabel label);
std::vector<std::string> label_names();
Space named_space(SpaceLabel label, Field f, SpaceParams params);

// Operations.

/// Trace-form orthogonal {N in Mat_{p,n} : tr(N M) = 0 for all M in S}.
Space orthogonal(const Space& s);
/// P S Q^{-1}.
Space act(const Mat& P, const Mat& Q, const Space& s);

struct Projection {
    Space space;  ///< S mod y, inside Mat_{n-1,p}
    Mat pi;       ///< (n-1) x n with kernel K y
};
Projection project_mod(const Space& s, const Vec& y);
/// The (n-1) x n projection killing K y (pivot-drop rule).
Mat projection_matrix(const Vec& y);

/// Span of {x -> [B_1 x | ... | B_d x]} inside Mat_{n,d}.
Space hat_space(const Space& s);
/// span{B_i x} as a subspace of Mat_{n,1}.
Space evaluate_span(const Space& s, const Vec& x);
/// {x : M x = 0 for all M in S}, basis from the nullspace.
std::vector<Vec> common_kernel(const Space& s);
/// Sum of the column spaces, as a subspace of Mat_{n,1}.
Space range_sum(const Space& s);
/// Span of the given column vectors as a subspace of Mat_{n,1}.
Space vector_span(Field f, std::size_t n, const std::vector<Vec>& vectors);

template <class Fn>
void Space::for_each_element(Fn&& fn, bool skip_zero) const {
    const std::size_t g = gbasis_.size();
    const std::size_t len = rows_ * cols_;
    const unsigned p = field_.p();
    const unsigned q = field_.q();
    const Elem* add = field_.add_table();
    std::vector<Elem> cur(len, 0);
    std::vector<std::uint8_t> c(g, 0);
    if (!skip_zero)
        if (!fn(static_cast<const std::vector<Elem>&>(cur), static_cast<const std::vector<std::uint8_t>&>(c))) return;
    if (g == 0) return;
    while (true) {
        std::size_t w = 0;
        while (true) {
            const auto& gw = gbasis_[w].entries();
            for (std::size_t i = 0; i < len; ++i)
                if (gw[i]) cur[i] = add[cur[i] * q + gw[i]];
            if (++c[w] < p) break;
            c[w] = 0;
            if (++w == g) return;
        }
        if (!fn(static_cast<const std::vector<Elem>&>(cur), static_cast<const std::vector<std::uint8_t>&>(c))) return;
    }
}

}  // namespace rcmap
