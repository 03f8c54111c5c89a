#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rcmap {

/// Incremental row echelon accumulator over the prime field GF(p).
///
/// Rows are fed one at a time; the accumulator keeps one normalized row per
/// pivot column. Over GF(2) rows can be bit-packed, which is the fast path
/// for the exhaustive scans. Both backends compute the same canonical results.
class PrimeEchelon {
public:
    enum class Backend { Auto, Dense, Packed };

    PrimeEchelon(unsigned p, std::size_t ncols, Backend backend = Backend::Auto);

    /// Adds a row (entries in [0, p)). Returns true when the rank grew.
    bool add_row(std::span<const std::uint8_t> row);
    /// True when the row lies in the span of the rows added so far.
    bool contains(std::span<const std::uint8_t> row) const;
    /// The row reduced against the current pivots (zero iff contained).
    std::vector<std::uint8_t> reduce(std::span<const std::uint8_t> row) const;

    unsigned p() const noexcept { return p_; }
    std::size_t cols() const noexcept { return ncols_; }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t nullity() const noexcept { return ncols_ - rank_; }
    bool packed() const noexcept { return packed_; }

    /// Rows of the reduced row echelon form, ordered by pivot column.
    std::vector<std::vector<std::uint8_t>> rref_rows() const;
    /// Pivot columns in increasing order.
    std::vector<std::size_t> pivots() const;
    /// Basis of the right kernel, one vector per free column (increasing).
    std::vector<std::vector<std::uint8_t>> nullspace() const;

private:
    void reduce_dense(std::vector<std::uint8_t>& row) const;
    void reduce_packed(std::vector<std::uint64_t>& row) const;

    unsigned p_;
    std::size_t ncols_;
    bool packed_;
    std::size_t words_ = 0;
    std::size_t rank_ = 0;
    std::vector<std::int32_t> pivot_row_;  // column -> stored row index or -1
    std::vector<std::vector<std::uint8_t>> dense_;
    std::vector<std::vector<std::uint64_t>> bits_;
    std::vector<std::uint8_t> inv_;
};

/// Canonical basis of a GF(p) subspace given by generators: the nonzero rows
/// of the reduced row echelon form.
std::vector<std::vector<std::uint8_t>> prime_rref_basis(unsigned p, std::size_t ncols,
                                                         const std::vector<std::vector<std::uint8_t>>& gens,
                                                         PrimeEchelon::Backend backend = PrimeEchelon::Backend::Auto);

}  // namespace rcmap
