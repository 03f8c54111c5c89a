#pragma once

#include <string>
#include <vector>

#include "rcmap/field.hpp"

namespace rcmap {

/// Endomorphism of the additive group (K, +), stored as a k x k matrix over
/// GF(p) acting on the digit column of an element in the basis (1, t, ...).
class AdditiveEndo {
public:
    /// `matrix` is row-major k x k with entries in [0, p).
    AdditiveEndo(Field field, std::vector<Elem> matrix);

    static AdditiveEndo zero(Field field);
    static AdditiveEndo identity(Field field);
    /// x -> a*x.
    static AdditiveEndo multiplication(Field field, Elem a);
    /// x -> x^(p^i).
    static AdditiveEndo frobenius(Field field, unsigned i);
    /// The inverse Frobenius x -> sqrt(x); characteristic 2 only.
    static AdditiveEndo sqrt(Field field);
    /// Builds the matrix by evaluating `fn` on 1, t, ..., t^{k-1}.
    template <class Fn>
    static AdditiveEndo from_function(Field field, Fn&& fn);

    Field field() const noexcept { return field_; }
    const std::vector<Elem>& matrix() const noexcept { return m_; }
    Elem operator()(Elem x) const { return table_[x]; }

    bool is_zero() const noexcept;
    /// Commutes with every scalar multiplication.
    bool is_linear() const;
    /// alpha(l^2 x) = l alpha(x) for all l, x (checked over every pair).
    bool is_root_linear() const;
    bool is_injective() const;

    AdditiveEndo operator+(const AdditiveEndo& o) const;
    /// Multiplies by an element of the prime field.
    AdditiveEndo scaled(unsigned c) const;
    /// (this o other)(x) = this(other(x)).
    AdditiveEndo compose(const AdditiveEndo& other) const;

    friend bool operator==(const AdditiveEndo& a, const AdditiveEndo& b) {
        return a.field_ == b.field_ && a.m_ == b.m_;
    }

    std::string to_string() const;

private:
    void build_table();
    Field field_;
    std::vector<Elem> m_;
    std::vector<Elem> table_;
};

enum class EndoKind { Additive, Linear, RootLinear };

/// GF(p)-basis of the requested endomorphism space of (K, +).
std::vector<AdditiveEndo> endo_space(Field field, EndoKind kind);

/// Linear combination sum_i coeffs[i] * basis[i] with prime-field coefficients.
AdditiveEndo combine(Field field, const std::vector<AdditiveEndo>& basis, const std::vector<unsigned>& coeffs);

template <class Fn>
AdditiveEndo AdditiveEndo::from_function(Field field, Fn&& fn) {
    const unsigned k = field.k();
    std::vector<Elem> m(static_cast<std::size_t>(k) * k, 0);
    Elem tj = 1;
    for (unsigned j = 0; j < k; ++j) {
        const Elem y = fn(tj);
        for (unsigned i = 0; i < k; ++i) m[i * k + j] = static_cast<Elem>(field.digit(y, i));
        tj = field.mul(tj, field.generator());
    }
    return AdditiveEndo(field, std::move(m));
}

}  // namespace rcmap
