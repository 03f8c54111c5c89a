#pragma once

// Brute-force reference implementations. They share no code with the
// library beyond the element encoding and the reduction polynomial.

#include <functional>
#include <set>
#include <vector>

#include "rcmap/space.hpp"

namespace oracle {

/// Schoolbook polynomial arithmetic on base-p digit codes.
struct NaiveField {
    unsigned p, k, q;
    std::vector<unsigned> poly;  // k low coefficients of the monic modulus

    explicit NaiveField(rcmap::Field f) : p(f.p()), k(f.k()), q(f.q()), poly(f.poly().begin(), f.poly().end()) {}

    std::vector<unsigned> digits(unsigned a) const {
        std::vector<unsigned> d(k);
        for (unsigned i = 0; i < k; ++i, a /= p) d[i] = a % p;
        return d;
    }
    unsigned code(const std::vector<unsigned>& d) const {
        unsigned c = 0;
        for (unsigned i = k; i-- > 0;) c = c * p + d[i];
        return c;
    }
    unsigned add(unsigned a, unsigned b) const {
        auto x = digits(a), y = digits(b);
        for (unsigned i = 0; i < k; ++i) x[i] = (x[i] + y[i]) % p;
        return code(x);
    }
    unsigned neg(unsigned a) const {
        auto x = digits(a);
        for (auto& v : x) v = (p - v) % p;
        return code(x);
    }
    unsigned mul(unsigned a, unsigned b) const {
        auto x = digits(a), y = digits(b);
        std::vector<unsigned> prod(2 * k, 0);
        for (unsigned i = 0; i < k; ++i)
            for (unsigned j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
        // t^k = -(poly[0] + ... + poly[k-1] t^{k-1})
        for (unsigned d = 2 * k - 1; d >= k; --d) {
            const unsigned c = prod[d];
            prod[d] = 0;
            for (unsigned i = 0; i < k; ++i) prod[d - k + i] = (prod[d - k + i] + (p - c) * poly[i]) % p;
            if (d == k) break;
        }
        prod.resize(k);
        return code(prod);
    }
};

/// All linear combinations of the rows (as flat vectors) of a matrix.
inline std::set<std::vector<unsigned>> span(const NaiveField& f, const std::vector<std::vector<unsigned>>& rows,
                                            std::size_t width) {
    std::set<std::vector<unsigned>> out{std::vector<unsigned>(width, 0)};
    for (const auto& r : rows) {
        std::set<std::vector<unsigned>> next;
        for (const auto& v : out)
            for (unsigned c = 0; c < f.q; ++c) {
                auto w = v;
                for (std::size_t i = 0; i < width; ++i) w[i] = f.add(w[i], f.mul(c, r[i]));
                next.insert(w);
            }
        out = std::move(next);
    }
    return out;
}

/// Rank from the size of the row span: |span| = q^rank.
inline std::size_t rank(const rcmap::Mat& m) {
    NaiveField f(m.field());
    std::vector<std::vector<unsigned>> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::vector<unsigned> r;
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    std::size_t size = span(f, rows, m.cols()).size(), r = 0;
    while (size > 1) size /= f.q, ++r;
    return r;
}

/// v in the column space of m, by trying every coefficient vector.
inline bool in_image(const rcmap::Mat& m, const rcmap::Vec& v) {
    NaiveField f(m.field());
    const std::size_t p = m.cols();
    std::vector<unsigned> x(p, 0);
    while (true) {
        bool ok = true;
        for (std::size_t i = 0; i < m.rows() && ok; ++i) {
            unsigned acc = 0;
            for (std::size_t j = 0; j < p; ++j) acc = f.add(acc, f.mul(m(i, j), x[j]));
            ok = acc == v[i];
        }
        if (ok) return true;
        std::size_t t = 0;
        while (t < p && ++x[t] == f.q) x[t++] = 0;
        if (t == p) return false;
    }
}

/// Every element of S, from K-combinations of its basis.
inline std::vector<rcmap::Mat> elements(const rcmap::Space& s) {
    NaiveField f(s.field());
    std::vector<rcmap::Mat> out;
    const auto& b = s.basis();
    std::vector<unsigned> c(b.size(), 0);
    while (true) {
        rcmap::Mat m(s.field(), s.rows(), s.cols());
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t e = 0; e < m.size(); ++e)
                m[e] = static_cast<rcmap::Elem>(f.add(m[e], f.mul(c[i], b[i][e])));
        out.push_back(m);
        std::size_t t = 0;
        while (t < c.size() && ++c[t] == f.q) c[t++] = 0;
        if (t == c.size()) return out;
    }
}

/// Calls fn for every vector of K^n.
inline void for_each_vector(rcmap::Field field, std::size_t n, const std::function<void(const rcmap::Vec&)>& fn) {
    std::vector<unsigned> c(n, 0);
    while (true) {
        rcmap::Vec v(field, n, 1);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<rcmap::Elem>(c[i]);
        fn(v);
        std::size_t t = 0;
        while (t < n && ++c[t] == field.q()) c[t++] = 0;
        if (t == n) return;
    }
}

}  // namespace oracle
