#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcmap/space.hpp"

namespace rcmap {

/// Group homomorphism from a Space into K^m.
///
/// Stored as a (k*m) x gdim matrix over GF(p): column b holds the digits of
/// F(G_b) for the b-th element G_b of the domain's `gbasis`, with output
/// entry r, digit j at row r*k + j.
class AdditiveMap {
public:
    /// `matrix` is row-major (k*m) x gdim with entries in [0, p).
    AdditiveMap(Space domain, std::size_t target_rows, std::vector<std::uint8_t> matrix);

    static AdditiveMap zero(Space domain, std::size_t target_rows);
    /// Tabulates `fn` (Mat -> column Vec of length target_rows) on the GF(p)-basis.
    template <class Fn>
    static AdditiveMap from_function(const Space& domain, std::size_t target_rows, Fn&& fn);
    /// M -> M x.
    static AdditiveMap evaluation(const Space& domain, const Vec& x);

    const Space& domain() const noexcept { return domain_; }
    Field field() const noexcept { return domain_.field(); }
    std::size_t target_rows() const noexcept { return m_; }
    std::size_t gdim() const noexcept { return domain_.gdim(); }
    const std::vector<std::uint8_t>& matrix() const noexcept { return a_; }

    /// Value on a member of the domain; throws InvalidArgument otherwise.
    Vec operator()(const Mat& m) const;
    /// Value on the element with the given GF(p)-coordinates.
    Vec evaluate(const std::vector<std::uint8_t>& gcoords) const;
    /// Value on the b-th GF(p)-basis element.
    Vec on_basis(std::size_t b) const;

    bool is_zero() const noexcept;
    /// F(l M) = l F(M) for every scalar l.
    bool is_linear() const;
    /// F(l M) = sigma(l) F(M) with sigma = Frobenius^i.
    bool is_semilinear(unsigned i) const;

    AdditiveMap operator+(const AdditiveMap& o) const;
    AdditiveMap operator-(const AdditiveMap& o) const;
    /// Multiplies by an element of the prime field.
    AdditiveMap scaled(unsigned c) const;
    /// Left composition with a K-matrix acting on the output: M -> T F(M).
    AdditiveMap post_multiply(const Mat& t) const;

    friend bool operator==(const AdditiveMap& a, const AdditiveMap& b) {
        return a.domain_ == b.domain_ && a.m_ == b.m_ && a.a_ == b.a_;
    }
    friend bool operator!=(const AdditiveMap& a, const AdditiveMap& b) { return !(a == b); }

    std::string to_string() const;

private:
    Space domain_;
    std::size_t m_;
    std::vector<std::uint8_t> a_;
};

/// Digit matrix of the K-linear map v -> T v: rows i*k + l, columns r*k + j.
std::vector<std::uint8_t> digit_matrix(const Mat& t);

template <class Fn>
AdditiveMap AdditiveMap::from_function(const Space& domain, std::size_t target_rows, Fn&& fn) {
    const Field f = domain.field();
    const unsigned k = f.k();
    const std::size_t g = domain.gdim();
    std::vector<std::uint8_t> a(k * target_rows * g, 0);
    for (std::size_t b = 0; b < g; ++b) {
        const Vec v = fn(domain.gbasis()[b]);
        if (v.rows() != target_rows || v.cols() != 1 || v.field() != f)
            throw InvalidArgument("map value has the wrong shape");
        for (std::size_t r = 0; r < target_rows; ++r)
            for (unsigned j = 0; j < k; ++j) a[(r * k + j) * g + b] = static_cast<std::uint8_t>(f.digit(v[r], j));
    }
    return AdditiveMap(domain, target_rows, std::move(a));
}

}  // namespace rcmap
