#include "rcmap/endo.hpp"

#include <sstream>

#include "rcmap/echelon.hpp"
#include "rcmap/error.hpp"

namespace rcmap {

AdditiveEndo::AdditiveEndo(Field field, std::vector<Elem> matrix) : field_(field), m_(std::move(matrix)) {
    const unsigned k = field.k();
    if (m_.size() != static_cast<std::size_t>(k) * k) throw InvalidArgument("endomorphism matrix must be k x k");
    for (Elem x : m_)
        if (x >= field.p()) throw InvalidArgument("endomorphism matrix entries must lie in the prime field");
    build_table();
}

void AdditiveEndo::build_table() {
    const unsigned k = field_.k();
    const unsigned p = field_.p();
    table_.assign(field_.q(), 0);
    std::vector<unsigned> in(k), out(k);
    for (unsigned x = 0; x < field_.q(); ++x) {
        for (unsigned j = 0; j < k; ++j) in[j] = field_.digit(static_cast<Elem>(x), j);
        for (unsigned i = 0; i < k; ++i) {
            unsigned s = 0;
            for (unsigned j = 0; j < k; ++j) s += m_[i * k + j] * in[j];
            out[i] = s % p;
        }
        table_[x] = field_.from_digits(out);
    }
}

AdditiveEndo AdditiveEndo::zero(Field field) {
    return AdditiveEndo(field, std::vector<Elem>(static_cast<std::size_t>(field.k()) * field.k(), 0));
}

AdditiveEndo AdditiveEndo::identity(Field field) { return multiplication(field, 1); }

AdditiveEndo AdditiveEndo::multiplication(Field field, Elem a) {
    auto mm = field.mul_matrix(a);
    return AdditiveEndo(field, std::vector<Elem>(mm.begin(), mm.end()));
}

AdditiveEndo AdditiveEndo::frobenius(Field field, unsigned i) {
    return from_function(field, [&](Elem x) { return field.frobenius(x, i); });
}

AdditiveEndo AdditiveEndo::sqrt(Field field) {
    return from_function(field, [&](Elem x) { return char2_sqrt(field, x); });
}

bool AdditiveEndo::is_zero() const noexcept {
    for (Elem x : m_)
        if (x) return false;
    return true;
}

bool AdditiveEndo::is_linear() const {
    const Elem t = field_.generator();
    for (unsigned x = 0; x < field_.q(); ++x)
        if (table_[field_.mul(t, static_cast<Elem>(x))] != field_.mul(t, table_[x])) return false;
    return true;
}

bool AdditiveEndo::is_root_linear() const {
    for (unsigned l = 0; l < field_.q(); ++l) {
        const Elem l2 = field_.mul(static_cast<Elem>(l), static_cast<Elem>(l));
        for (unsigned x = 0; x < field_.q(); ++x)
            if (table_[field_.mul(l2, static_cast<Elem>(x))] != field_.mul(static_cast<Elem>(l), table_[x]))
                return false;
    }
    return true;
}

bool AdditiveEndo::is_injective() const {
    for (unsigned x = 1; x < field_.q(); ++x)
        if (table_[x] == 0) return false;
    return true;
}

AdditiveEndo AdditiveEndo::operator+(const AdditiveEndo& o) const {
    if (o.field_ != field_) throw InvalidArgument("endomorphism field mismatch");
    std::vector<Elem> m(m_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<Elem>((m_[i] + o.m_[i]) % field_.p());
    return AdditiveEndo(field_, std::move(m));
}

AdditiveEndo AdditiveEndo::scaled(unsigned c) const {
    std::vector<Elem> m(m_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<Elem>((m_[i] * c) % field_.p());
    return AdditiveEndo(field_, std::move(m));
}

AdditiveEndo AdditiveEndo::compose(const AdditiveEndo& other) const {
    return from_function(field_, [&](Elem x) { return (*this)(other(x)); });
}

std::string AdditiveEndo::to_string() const {
    std::ostringstream os;
    os << '[';
    for (unsigned x = 0; x < field_.q(); ++x) {
        if (x) os << ' ';
        os << static_cast<unsigned>(table_[x]);
    }
    os << ']';
    return os.str();
}

AdditiveEndo combine(Field field, const std::vector<AdditiveEndo>& basis, const std::vector<unsigned>& coeffs) {
    if (basis.size() != coeffs.size()) throw InvalidArgument("combination length mismatch");
    AdditiveEndo acc = AdditiveEndo::zero(field);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (coeffs[i] % field.p()) acc = acc + basis[i].scaled(coeffs[i]);
    return acc;
}

std::vector<AdditiveEndo> endo_space(Field field, EndoKind kind) {
    const unsigned k = field.k();
    const unsigned p = field.p();
    std::vector<AdditiveEndo> out;
    switch (kind) {
        case EndoKind::Additive:
            for (unsigned i = 0; i < k; ++i)
                for (unsigned j = 0; j < k; ++j) {
                    std::vector<Elem> m(static_cast<std::size_t>(k) * k, 0);
                    m[i * k + j] = 1;
                    out.emplace_back(field, std::move(m));
                }
            return out;
        case EndoKind::Linear: {
            Elem tj = 1;
            for (unsigned j = 0; j < k; ++j) {
                out.push_back(AdditiveEndo::multiplication(field, tj));
                tj = field.mul(tj, field.generator());
            }
            return out;
        }
        case EndoKind::RootLinear: {
            // Unknown alpha = k x k matrix M (index a*k + b). For every lambda and
            // basis element t^j: M digits(lambda^2 t^j) - Mul(lambda) M e_j = 0.
            const std::size_t nunk = static_cast<std::size_t>(k) * k;
            PrimeEchelon ech(p, nunk);
            std::vector<std::uint8_t> row(nunk);
            for (unsigned l = 0; l < field.q(); ++l) {
                const Elem lam = static_cast<Elem>(l);
                const Elem lam2 = field.mul(lam, lam);
                const auto mul = field.mul_matrix(lam);
                Elem tj = 1;
                for (unsigned j = 0; j < k; ++j) {
                    const Elem y = field.mul(lam2, tj);
                    for (unsigned a = 0; a < k; ++a) {
                        std::fill(row.begin(), row.end(), 0);
                        for (unsigned b = 0; b < k; ++b)
                            row[a * k + b] = static_cast<std::uint8_t>((row[a * k + b] + field.digit(y, b)) % p);
                        for (unsigned c = 0; c < k; ++c) {
                            const unsigned coef = mul[a * k + c];
                            row[c * k + j] = static_cast<std::uint8_t>((row[c * k + j] + (p - coef) % p) % p);
                        }
                        ech.add_row(row);
                    }
                    tj = field.mul(tj, field.generator());
                }
            }
            for (auto& v : ech.nullspace()) {
                std::vector<Elem> m(v.begin(), v.end());
                AdditiveEndo e(field, std::move(m));
                if (!e.is_root_linear()) throw InvariantViolation("root-linear basis element fails the defining identity");
                out.push_back(std::move(e));
            }
            return out;
        }
    }
    return out;
}

}  // namespace rcmap
