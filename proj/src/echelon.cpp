#include "rcmap/echelon.hpp"

#include <bit>

#include "rcmap/error.hpp"

namespace rcmap {

PrimeEchelon::PrimeEchelon(unsigned p, std::size_t ncols, Backend backend)
    : p_(p), ncols_(ncols), pivot_row_(ncols, -1) {
    if (p < 2 || p > 255) throw InvalidArgument("echelon prime out of range");
    if (backend == Backend::Packed && p != 2) throw InvalidArgument("packed backend requires p = 2");
    packed_ = backend == Backend::Packed || (backend == Backend::Auto && p == 2);
    words_ = (ncols + 63) / 64;
    inv_.assign(p, 0);
    for (unsigned a = 1; a < p; ++a)
        for (unsigned b = 1; b < p; ++b)
            if ((a * b) % p == 1) inv_[a] = static_cast<std::uint8_t>(b);
}

void PrimeEchelon::reduce_dense(std::vector<std::uint8_t>& row) const {
    for (std::size_t c = 0; c < ncols_; ++c) {
        const unsigned v = row[c];
        if (v == 0) continue;
        const std::int32_t r = pivot_row_[c];
        if (r < 0) continue;
        const auto& piv = dense_[static_cast<std::size_t>(r)];
        const unsigned factor = p_ - v;
        for (std::size_t j = c; j < ncols_; ++j)
            if (piv[j]) row[j] = static_cast<std::uint8_t>((row[j] + factor * piv[j]) % p_);
    }
}

void PrimeEchelon::reduce_packed(std::vector<std::uint64_t>& row) const {
    for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t pending = row[w];
        while (pending != 0) {
            const unsigned bit = static_cast<unsigned>(std::countr_zero(pending));
            const std::size_t c = w * 64 + bit;
            pending &= pending - 1;
            const std::int32_t r = pivot_row_[c];
            if (r < 0) continue;
            const auto& piv = bits_[static_cast<std::size_t>(r)];
            for (std::size_t j = w; j < words_; ++j) row[j] ^= piv[j];
            pending = row[w] & ~((std::uint64_t{2} << bit) - 1);
            if (bit == 63) pending = 0;
        }
    }
}

bool PrimeEchelon::add_row(std::span<const std::uint8_t> row) {
    if (row.size() != ncols_) throw InvalidArgument("echelon row width mismatch");
    if (rank_ == ncols_) return false;
    if (packed_) {
        std::vector<std::uint64_t> r(words_, 0);
        for (std::size_t c = 0; c < ncols_; ++c)
            if (row[c] & 1U) r[c / 64] |= std::uint64_t{1} << (c % 64);
        reduce_packed(r);
        for (std::size_t w = 0; w < words_; ++w) {
            if (r[w] == 0) continue;
            const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(r[w]));
            pivot_row_[c] = static_cast<std::int32_t>(bits_.size());
            bits_.push_back(std::move(r));
            ++rank_;
            return true;
        }
        return false;
    }
    std::vector<std::uint8_t> r(row.begin(), row.end());
    for (auto& x : r) x = static_cast<std::uint8_t>(x % p_);
    reduce_dense(r);
    for (std::size_t c = 0; c < ncols_; ++c) {
        if (r[c] == 0) continue;
        const unsigned s = inv_[r[c]];
        for (std::size_t j = c; j < ncols_; ++j) r[j] = static_cast<std::uint8_t>((r[j] * s) % p_);
        pivot_row_[c] = static_cast<std::int32_t>(dense_.size());
        dense_.push_back(std::move(r));
        ++rank_;
        return true;
    }
    return false;
}

bool PrimeEchelon::contains(std::span<const std::uint8_t> row) const {
    if (row.size() != ncols_) throw InvalidArgument("echelon row width mismatch");
    if (packed_) {
        std::vector<std::uint64_t> r(words_, 0);
        for (std::size_t c = 0; c < ncols_; ++c)
            if (row[c] & 1U) r[c / 64] |= std::uint64_t{1} << (c % 64);
        reduce_packed(r);
        for (auto w : r)
            if (w) return false;
        return true;
    }
    std::vector<std::uint8_t> r(row.begin(), row.end());
    for (auto& x : r) x = static_cast<std::uint8_t>(x % p_);
    reduce_dense(r);
    for (auto x : r)
        if (x) return false;
    return true;
}

std::vector<std::uint8_t> PrimeEchelon::reduce(std::span<const std::uint8_t> row) const {
    if (row.size() != ncols_) throw InvalidArgument("echelon row width mismatch");
    if (packed_) {
        std::vector<std::uint64_t> r(words_, 0);
        for (std::size_t c = 0; c < ncols_; ++c)
            if (row[c] & 1U) r[c / 64] |= std::uint64_t{1} << (c % 64);
        reduce_packed(r);
        std::vector<std::uint8_t> out(ncols_);
        for (std::size_t c = 0; c < ncols_; ++c) out[c] = (r[c / 64] >> (c % 64)) & 1U;
        return out;
    }
    std::vector<std::uint8_t> r(row.begin(), row.end());
    for (auto& x : r) x = static_cast<std::uint8_t>(x % p_);
    reduce_dense(r);
    return r;
}

std::vector<std::size_t> PrimeEchelon::pivots() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < ncols_; ++c)
        if (pivot_row_[c] >= 0) out.push_back(c);
    return out;
}

std::vector<std::vector<std::uint8_t>> PrimeEchelon::rref_rows() const {
    const auto piv = pivots();
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(piv.size());
    for (std::size_t c : piv) {
        const auto idx = static_cast<std::size_t>(pivot_row_[c]);
        std::vector<std::uint8_t> r(ncols_, 0);
        if (packed_) {
            for (std::size_t j = 0; j < ncols_; ++j) r[j] = (bits_[idx][j / 64] >> (j % 64)) & 1U;
        } else {
            r = dense_[idx];
        }
        rows.push_back(std::move(r));
    }
    // Back substitution, last pivot first.
    for (std::size_t i = piv.size(); i-- > 0;) {
        const std::size_t c = piv[i];
        for (std::size_t k = 0; k < i; ++k) {
            const unsigned v = rows[k][c];
            if (v == 0) continue;
            const unsigned factor = p_ - v;
            for (std::size_t j = c; j < ncols_; ++j)
                if (rows[i][j]) rows[k][j] = static_cast<std::uint8_t>((rows[k][j] + factor * rows[i][j]) % p_);
        }
    }
    return rows;
}

std::vector<std::vector<std::uint8_t>> PrimeEchelon::nullspace() const {
    const auto rows = rref_rows();
    const auto piv = pivots();
    std::vector<bool> is_piv(ncols_, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<std::uint8_t>> out;
    for (std::size_t fc = 0; fc < ncols_; ++fc) {
        if (is_piv[fc]) continue;
        std::vector<std::uint8_t> v(ncols_, 0);
        v[fc] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i)
            v[piv[i]] = static_cast<std::uint8_t>((p_ - rows[i][fc]) % p_);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> prime_rref_basis(unsigned p, std::size_t ncols,
                                                         const std::vector<std::vector<std::uint8_t>>& gens,
                                                         PrimeEchelon::Backend backend) {
    PrimeEchelon e(p, ncols, backend);
    for (const auto& g : gens) e.add_row(g);
    return e.rref_rows();
}

}  // namespace rcmap
