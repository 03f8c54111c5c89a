#include "rcmap/field.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "rcmap/error.hpp"

namespace rcmap {

namespace detail {

struct FieldTables {
    unsigned p = 0;
    unsigned k = 0;
    unsigned q = 0;
    std::vector<unsigned> poly;
    std::vector<Elem> add;
    std::vector<Elem> mul;
    std::vector<Elem> neg;
    std::vector<Elem> inv;
    std::vector<unsigned> digits;  // q * k
    std::vector<Elem> mulmat;      // q * k * k, row-major per element
    const FieldTables* prime = nullptr;
};

}  // namespace detail

namespace {

struct PolySpec {
    unsigned p;
    unsigned k;
    std::array<unsigned, 4> low;  // coefficients of t^0 .. t^{k-1}
};

// Fixed reduction polynomials (monic, leading term implicit).
constexpr std::array<PolySpec, 8> kPolynomials{{
    {2, 2, {1, 1, 0, 0}},  // t^2 + t + 1
    {2, 3, {1, 1, 0, 0}},  // t^3 + t + 1
    {2, 4, {1, 1, 0, 0}},  // t^4 + t + 1
    {3, 2, {2, 2, 0, 0}},  // t^2 + 2t + 2
    {3, 3, {1, 2, 0, 0}},  // t^3 + 2t + 1
    {5, 2, {2, 1, 0, 0}},  // t^2 + t + 2
    {7, 2, {3, 1, 0, 0}},  // t^2 + t + 3
    {3, 4, {2, 1, 0, 0}},  // t^4 + t + 2
}};

unsigned ipow(unsigned b, unsigned e) {
    unsigned r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Polynomial product of two digit vectors reduced modulo the monic poly.
std::vector<unsigned> poly_mulmod(const std::vector<unsigned>& a, const std::vector<unsigned>& b,
                                  const std::vector<unsigned>& low, unsigned p) {
    const std::size_t k = low.size();
    std::vector<unsigned> prod(2 * k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    for (std::size_t d = 2 * k - 1; d >= k; --d) {
        const unsigned c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        // t^d = t^{d-k} * t^k and t^k = -sum low[i] t^i
        for (std::size_t i = 0; i < k; ++i)
            prod[d - k + i] = (prod[d - k + i] + (p - low[i] % p) * c) % p;
    }
    prod.resize(k);
    return prod;
}

std::unique_ptr<detail::FieldTables> build_tables(unsigned p, unsigned k,
                                                  const std::vector<unsigned>& low) {
    auto t = std::make_unique<detail::FieldTables>();
    t->p = p;
    t->k = k;
    t->q = ipow(p, k);
    t->poly = low;
    const unsigned q = t->q;
    t->digits.resize(static_cast<std::size_t>(q) * k);
    for (unsigned c = 0; c < q; ++c) {
        unsigned x = c;
        for (unsigned i = 0; i < k; ++i) {
            t->digits[c * k + i] = x % p;
            x /= p;
        }
    }
    auto code_of = [&](const std::vector<unsigned>& d) {
        unsigned c = 0;
        for (std::size_t i = d.size(); i-- > 0;) c = c * p + d[i];
        return static_cast<Elem>(c);
    };
    auto digits_of = [&](unsigned c) {
        return std::vector<unsigned>(t->digits.begin() + c * k, t->digits.begin() + (c + 1) * k);
    };
    t->add.resize(static_cast<std::size_t>(q) * q);
    t->mul.resize(static_cast<std::size_t>(q) * q);
    t->neg.resize(q);
    t->inv.assign(q, 0);
    for (unsigned a = 0; a < q; ++a) {
        const auto da = digits_of(a);
        std::vector<unsigned> dn(k);
        for (unsigned i = 0; i < k; ++i) dn[i] = (p - da[i]) % p;
        t->neg[a] = code_of(dn);
        for (unsigned b = 0; b < q; ++b) {
            const auto db = digits_of(b);
            std::vector<unsigned> ds(k);
            for (unsigned i = 0; i < k; ++i) ds[i] = (da[i] + db[i]) % p;
            t->add[a * q + b] = code_of(ds);
            t->mul[a * q + b] = k == 1 ? static_cast<Elem>((a * b) % p)
                                       : code_of(poly_mulmod(da, db, low, p));
        }
    }
    for (unsigned a = 1; a < q; ++a)
        for (unsigned b = 1; b < q; ++b)
            if (t->mul[a * q + b] == 1) t->inv[a] = static_cast<Elem>(b);
    for (unsigned a = 1; a < q; ++a)
        if (t->inv[a] == 0) throw InvariantViolation("field tables: element without inverse");

    t->mulmat.resize(static_cast<std::size_t>(q) * k * k);
    for (unsigned a = 0; a < q; ++a) {
        unsigned tj = 1;  // code of t^j
        const unsigned gen = k == 1 ? 1 : p;
        for (unsigned j = 0; j < k; ++j) {
            const Elem prod = t->mul[a * q + tj];
            for (unsigned i = 0; i < k; ++i)
                t->mulmat[(static_cast<std::size_t>(a) * k + i) * k + j] =
                    static_cast<Elem>(t->digits[prod * k + i]);
            tj = t->mul[tj * q + gen];
        }
    }
    return t;
}

struct Registry {
    std::mutex mutex;
    std::map<std::pair<unsigned, unsigned>, std::unique_ptr<detail::FieldTables>> fields;
};

Registry& registry() {
    static Registry r;
    return r;
}

const detail::FieldTables* intern(unsigned p, unsigned k) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    auto it = reg.fields.find({p, k});
    if (it != reg.fields.end()) return it->second.get();

    std::vector<unsigned> low(k, 0);
    if (k == 1) {
        low = {0};
    } else {
        bool found = false;
        for (const auto& spec : kPolynomials) {
            if (spec.p == p && spec.k == k) {
                low.assign(spec.low.begin(), spec.low.begin() + k);
                found = true;
                break;
            }
        }
        if (!found) {
            // Orders outside the table: the first irreducible polynomial in
            // increasing code order of its low coefficients.
            const unsigned count = ipow(p, k);
            for (unsigned code = 1; code < count && !found; ++code) {
                for (unsigned i = 0, c = code; i < k; ++i, c /= p) low[i] = c % p;
                found = low[0] != 0 && is_irreducible(p, low);
            }
            if (!found)
                throw InvalidArgument("unsupported field GF(" + std::to_string(p) + "^" + std::to_string(k) + ")");
        }
        if (!is_irreducible(p, low))
            throw InvariantViolation("fixed reduction polynomial is reducible");
    }
    auto tables = build_tables(p, k, low);
    auto* raw = tables.get();
    reg.fields.emplace(std::make_pair(p, k), std::move(tables));
    if (k == 1) {
        raw->prime = raw;
    } else {
        auto pit = reg.fields.find({p, 1});
        if (pit == reg.fields.end()) {
            auto prime = build_tables(p, 1, {0});
            prime->prime = prime.get();
            raw->prime = prime.get();
            reg.fields.emplace(std::make_pair(p, 1u), std::move(prime));
        } else {
            raw->prime = pit->second.get();
        }
    }
    return raw;
}

}  // namespace

bool is_prime_number(unsigned n) noexcept {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool is_irreducible(unsigned p, std::span<const unsigned> coeffs) {
    const std::size_t k = coeffs.size();
    if (k <= 1) return true;
    // Full polynomial little-endian with leading 1.
    std::vector<unsigned> f(coeffs.begin(), coeffs.end());
    f.push_back(1);
    // Trial division by every monic polynomial of degree 1..k/2.
    for (std::size_t d = 1; d <= k / 2; ++d) {
        const unsigned count = ipow(p, static_cast<unsigned>(d));
        for (unsigned code = 0; code < count; ++code) {
            std::vector<unsigned> g(d + 1);
            unsigned x = code;
            for (std::size_t i = 0; i < d; ++i) {
                g[i] = x % p;
                x /= p;
            }
            g[d] = 1;
            std::vector<unsigned> r = f;
            for (std::size_t top = r.size() - 1; top >= d; --top) {
                const unsigned c = r[top] % p;
                if (c != 0)
                    for (std::size_t i = 0; i <= d; ++i)
                        r[top - d + i] = (r[top - d + i] + (p - (c * g[i]) % p)) % p;
                if (top == d) break;
            }
            bool zero = true;
            for (std::size_t i = 0; i < d; ++i) zero = zero && (r[i] % p == 0);
            if (zero) return false;
        }
    }
    return true;
}

Field Field::make(unsigned p, unsigned k, unsigned max_order) {
    if (!is_prime_number(p)) throw InvalidArgument("field characteristic " + std::to_string(p) + " is not prime");
    if (k == 0) throw InvalidArgument("field degree must be at least 1");
    if (max_order > kHardMaxOrder) max_order = kHardMaxOrder;
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) {
        q *= p;
        if (q > max_order)
            throw InvalidArgument("field order " + std::to_string(p) + "^" + std::to_string(k) +
                                  " exceeds configured bound " + std::to_string(max_order));
    }
    return Field(intern(p, k));
}

Field Field::of_order(unsigned q, unsigned max_order) {
    if (q < 2) throw InvalidArgument("field order must be at least 2");
    unsigned p = 2;
    while (q % p != 0) ++p;
    unsigned k = 0;
    unsigned x = q;
    while (x % p == 0) {
        x /= p;
        ++k;
    }
    if (x != 1) throw InvalidArgument("field order " + std::to_string(q) + " is not a prime power");
    return make(p, k, max_order);
}

unsigned Field::p() const noexcept { return t_->p; }
unsigned Field::k() const noexcept { return t_->k; }
unsigned Field::q() const noexcept { return t_->q; }
std::span<const unsigned> Field::poly() const noexcept { return t_->poly; }
Field Field::prime_field() const { return Field(t_->prime); }

Elem Field::add(Elem a, Elem b) const noexcept { return t_->add[a * t_->q + b]; }
Elem Field::sub(Elem a, Elem b) const noexcept { return t_->add[a * t_->q + t_->neg[b]]; }
Elem Field::mul(Elem a, Elem b) const noexcept { return t_->mul[a * t_->q + b]; }
Elem Field::neg(Elem a) const noexcept { return t_->neg[a]; }

Elem Field::inv(Elem a) const {
    if (a == 0) throw InvalidArgument("division by zero in " + name());
    return t_->inv[a];
}

Elem Field::pow(Elem a, std::uint64_t e) const noexcept {
    Elem r = 1;
    Elem b = a;
    while (e > 0) {
        if (e & 1U) r = mul(r, b);
        b = mul(b, b);
        e >>= 1U;
    }
    return r;
}

Elem Field::frobenius(Elem a, unsigned i) const noexcept {
    Elem r = a;
    for (unsigned s = 0; s < i % t_->k; ++s) r = pow(r, t_->p);
    return r;
}

Elem Field::generator() const noexcept { return static_cast<Elem>(t_->k == 1 ? 1 : t_->p); }

unsigned Field::digit(Elem a, unsigned i) const noexcept { return t_->digits[a * t_->k + i]; }

Elem Field::from_digits(std::span<const unsigned> digits) const {
    if (digits.size() != t_->k) throw InvalidArgument("digit vector length differs from field degree");
    unsigned c = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (digits[i] >= t_->p) throw InvalidArgument("digit out of range");
        c = c * t_->p + digits[i];
    }
    return static_cast<Elem>(c);
}

std::span<const Elem> Field::mul_matrix(Elem a) const noexcept {
    const std::size_t kk = static_cast<std::size_t>(t_->k) * t_->k;
    return {t_->mulmat.data() + a * kk, kk};
}

const Elem* Field::add_table() const noexcept { return t_->add.data(); }
const Elem* Field::mul_table() const noexcept { return t_->mul.data(); }
const Elem* Field::neg_table() const noexcept { return t_->neg.data(); }

std::string Field::name() const {
    return "F" + std::to_string(t_->q);
}

Elem char2_sqrt(Field field, Elem a) {
    if (field.p() != 2) throw InvalidArgument("square root map requires characteristic 2, got " + field.name());
    // Inverse Frobenius: a^(2^(k-1)).
    return field.frobenius(a, field.k() - 1);
}

}  // namespace rcmap
