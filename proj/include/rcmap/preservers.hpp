#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcmap/additive_map.hpp"
#include "rcmap/endo.hpp"
#include "rcmap/rcmaps.hpp"

namespace rcmap {

/// Homomorphism from a Space into Mat_{rows,cols}(K).
///
/// Stored as an AdditiveMap into K^{rows*cols} with the target flattened
/// column-major: entry (i, j) sits at index j*rows + i. Column j of the
/// target is therefore a contiguous block of the underlying map.
class OpMap {
public:
    OpMap(AdditiveMap map, std::size_t rows, std::size_t cols);

    template <class Fn>
    static OpMap from_function(const Space& domain, std::size_t rows, std::size_t cols, Fn&& fn);
    /// Glues column maps (each into K^rows) side by side.
    static OpMap from_columns(const Space& domain, std::size_t rows, const std::vector<AdditiveMap>& columns);

    const Space& domain() const noexcept { return map_.domain(); }
    const AdditiveMap& map() const noexcept { return map_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Mat operator()(const Mat& m) const;
    Mat evaluate(const std::vector<std::uint8_t>& gcoords) const;
    /// The localized map M -> F(M) e_j.
    AdditiveMap column(std::size_t j) const;

    bool is_linear() const { return map_.is_linear(); }
    bool is_semilinear(unsigned i) const { return map_.is_semilinear(i); }

    friend bool operator==(const OpMap& a, const OpMap& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.map_ == b.map_;
    }

private:
    AdditiveMap map_;
    std::size_t rows_;
    std::size_t cols_;
};

/// Column-major flattening of a matrix into a column vector.
Vec flatten_columns(const Mat& m);
Mat unflatten_columns(const Vec& v, std::size_t rows, std::size_t cols);

struct RestrictingSpace {
    RCMapSpace rc;
    std::size_t q = 0;
    /// One map per (column, rc basis element), column-major.
    std::vector<OpMap> basis;
    std::size_t kdim() const noexcept { return basis.size(); }
};

/// Range-restricting maps S -> Mat_{n,q}: every column is a range-compatible map.
RestrictingSpace range_restricting_space(const Space& s, std::size_t q, MapFlavor flavor,
                                         std::uint64_t budget = kDefaultElementBudget);

enum class PreserveMode { Range, Kernel };

/// Range mode: im F(M) = im M for all M. Kernel mode: ker F(M) = ker M,
/// decided through transpose_dual and re-checked directly on the first
/// `direct_sample` elements.
bool preserving_filter(const OpMap& f, PreserveMode mode, std::uint64_t budget = kDefaultElementBudget,
                       std::uint64_t direct_sample = 256);

/// M -> F(M^T)^T on S^T.
OpMap transpose_dual(const OpMap& f);

/// M -> [M 0] Q with Q in GL_q. Verified range-preserving.
OpMap standard_preserver(const Space& s, std::size_t q, const Mat& Q, std::uint64_t budget = kDefaultElementBudget);

/// The map G on S v Mat_{m,q} built from r >= q range-compatible maps F_i:
/// G(M) = [M 0] + (top rows: 0, F_1(A(M)), ..., F_r(A(M))), with A(M) the
/// top-left n x p block. Verified range-preserving.
OpMap nonstandard_preserver(const Space& s, std::size_t m, std::size_t q, const std::vector<AdditiveMap>& maps,
                            std::uint64_t budget = kDefaultElementBudget);

/// Q in GL_q with F(M) = [M 0] Q on the domain, when F is standard.
std::optional<Mat> standard_form(const OpMap& f, std::uint64_t budget = std::uint64_t{1} << 16);

/// Normal forms of the classification of range preservers.
///
/// "standard": [M 0] Q.
/// "zero-last-column": [N 0] -> [N 0] Q on spaces whose last column vanishes.
/// "type1": [[R(m11), L + R'(m11)], [0, K]] Q with R injective.
/// "symmetric": ([M 0] + rows i < r: [0_{1 x r}, R(m_ii)]) Q with R root-linear.
struct NormalForm {
    std::string form;
    Mat Q;
    std::vector<AdditiveEndo> R;
    std::vector<AdditiveEndo> Rprime;
    std::size_t r = 0;
};

OpMap build_normal_form(const Space& s, std::size_t q, const NormalForm& nf);
/// Fits F to the named normal form; the result re-evaluates to F exactly.
std::optional<NormalForm> fit_normal_form(const OpMap& f, const std::string& form,
                                          std::uint64_t budget = std::uint64_t{1} << 16);

/// Normal form governing the preservers of S in literal coordinates, or
/// nothing when no classification result applies.
std::optional<std::string> applicable_form(const Space& s, MapFlavor flavor);
/// Whether the applicable form predicts preservers into Mat_{n,q}.
bool form_predicts_existence(const std::string& form, const Space& s, std::size_t q);

struct PreserverOptions {
    std::uint64_t budget = kDefaultElementBudget;
    std::uint64_t seed = 1;
    std::size_t samples = 200;
};

struct PreserverInstance {
    OpMap map;
    std::optional<NormalForm> fit;
};

struct SemilinearSummary {
    unsigned sigma = 0;
    std::size_t restricting_kdim = 0;
    std::uint64_t preserving_count = 0;
    bool enumerated = false;
    /// Every preserver found is K-linear.
    bool all_linear = true;
};

struct PreserverReport {
    MapFlavor flavor;
    std::size_t q = 0;
    std::size_t restricting_kdim = 0;
    bool enumerated = false;
    std::uint64_t candidates_checked = 0;
    std::uint64_t preserving_count = 0;
    /// Normal form applied, or empty.
    std::string form;
    /// "matches", "mismatch", "no preserver exists", "out of theorem range",
    /// or "inconclusive" when sampling can neither find nor rule out preservers.
    std::string verdict;
    std::vector<PreserverInstance> preservers;
    std::size_t fit_failures = 0;
    std::size_t normal_form_samples = 0;
    std::size_t normal_form_failures = 0;
    std::vector<SemilinearSummary> semilinear;
};

/// Enumerates (or samples) the range-restricting maps, keeps the
/// preservers and fits each to the applicable normal form. Random instances
/// of the normal form are checked to be preservers. For the semilinear
/// flavor every Frobenius power is scanned and summarized.
PreserverReport classify_preservers(const Space& s, std::size_t q, MapFlavor flavor,
                                    const PreserverOptions& options = {});

template <class Fn>
OpMap OpMap::from_function(const Space& domain, std::size_t rows, std::size_t cols, Fn&& fn) {
    auto m = AdditiveMap::from_function(domain, rows * cols, [&](const Mat& x) {
        const Mat v = fn(x);
        if (v.rows() != rows || v.cols() != cols) throw InvalidArgument("operator value has the wrong shape");
        return flatten_columns(v);
    });
    return OpMap(std::move(m), rows, cols);
}

}  // namespace rcmap
