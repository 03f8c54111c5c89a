#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rcmap {

/// Element of a finite field, stored by its integer code.
///
/// Code c in [0, q) encodes the polynomial sum_i d_i t^i where d_i is the
/// i-th base-p digit of c (little-endian). Codes 0 and 1 are the field's
/// zero and one.
using Elem = std::uint8_t;

inline constexpr unsigned kDefaultMaxOrder = 16;
inline constexpr unsigned kHardMaxOrder = 256;

namespace detail {
struct FieldTables;
}

/// Handle to an immutable finite field GF(p^k).
///
/// Fields are interned: two handles built from the same (p, k) compare equal
/// and share their arithmetic tables. Handles are trivially copyable and the
/// referenced tables live for the whole program.
class Field {
public:
    /// Builds GF(p^k) with the fixed reduction polynomial for (p, k).
    /// Throws InvalidArgument for non-prime p, unsupported (p, k) or an
    /// order above `max_order`.
    static Field make(unsigned p, unsigned k = 1, unsigned max_order = kDefaultMaxOrder);

    /// Builds the field with q elements (q a prime power).
    static Field of_order(unsigned q, unsigned max_order = kDefaultMaxOrder);

    unsigned p() const noexcept;
    unsigned k() const noexcept;
    unsigned q() const noexcept;
    unsigned characteristic() const noexcept { return p(); }
    bool is_prime() const noexcept { return k() == 1; }

    /// Reduction polynomial coefficients, little-endian, length k; the
    /// leading coefficient of t^k is an implicit 1.
    std::span<const unsigned> poly() const noexcept;

    /// The prime subfield GF(p).
    Field prime_field() const;

    Elem add(Elem a, Elem b) const noexcept;
    Elem sub(Elem a, Elem b) const noexcept;
    Elem mul(Elem a, Elem b) const noexcept;
    Elem neg(Elem a) const noexcept;
    /// Throws InvalidArgument on zero.
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, std::uint64_t e) const noexcept;

    /// a^(p^i): the i-th power of the Frobenius automorphism.
    Elem frobenius(Elem a, unsigned i = 1) const noexcept;

    /// The generator t (code p), or 1 when k == 1.
    Elem generator() const noexcept;

    /// i-th base-p digit (coefficient of t^i).
    unsigned digit(Elem a, unsigned i) const noexcept;
    Elem from_digits(std::span<const unsigned> digits) const;

    /// Row-major k x k matrix over GF(p) of x -> a*x in the basis (1, t, ...).
    std::span<const Elem> mul_matrix(Elem a) const noexcept;

    /// Raw q x q tables for hot loops.
    const Elem* add_table() const noexcept;
    const Elem* mul_table() const noexcept;
    const Elem* neg_table() const noexcept;

    std::string name() const;

    friend bool operator==(Field a, Field b) noexcept { return a.t_ == b.t_; }
    friend bool operator!=(Field a, Field b) noexcept { return a.t_ != b.t_; }

private:
    explicit Field(const detail::FieldTables* t) : t_(t) {}
    const detail::FieldTables* t_;
};

/// True when n is prime (trial division).
bool is_prime_number(unsigned n) noexcept;

/// Unique square root in a field of characteristic 2 (inverse Frobenius).
/// Throws InvalidArgument when the characteristic is not 2.
Elem char2_sqrt(Field field, Elem a);

/// Trial-division irreducibility test of the monic polynomial
/// t^k + sum_i coeffs[i] t^i over GF(p).
bool is_irreducible(unsigned p, std::span<const unsigned> coeffs);

}  // namespace rcmap
