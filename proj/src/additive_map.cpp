#include "rcmap/additive_map.hpp"

#include <sstream>

namespace rcmap {

AdditiveMap::AdditiveMap(Space domain, std::size_t target_rows, std::vector<std::uint8_t> matrix)
    : domain_(std::move(domain)), m_(target_rows), a_(std::move(matrix)) {
    const Field f = domain_.field();
    if (a_.size() != f.k() * m_ * domain_.gdim()) throw InvalidArgument("map matrix has the wrong size");
    for (auto x : a_)
        if (x >= f.p()) throw InvalidArgument("map matrix entries must lie in the prime field");
}

AdditiveMap AdditiveMap::zero(Space domain, std::size_t target_rows) {
    const std::size_t len = domain.field().k() * target_rows * domain.gdim();
    return AdditiveMap(std::move(domain), target_rows, std::vector<std::uint8_t>(len, 0));
}

AdditiveMap AdditiveMap::evaluation(const Space& domain, const Vec& x) {
    if (x.rows() != domain.cols() || x.cols() != 1) throw InvalidArgument("evaluation vector length mismatch");
    return from_function(domain, domain.rows(), [&](const Mat& m) { return m * x; });
}

Vec AdditiveMap::evaluate(const std::vector<std::uint8_t>& c) const {
    const Field f = field();
    const unsigned k = f.k();
    const unsigned p = f.p();
    const std::size_t g = gdim();
    if (c.size() != g) throw InvalidArgument("coordinate vector length mismatch");
    Vec out(f, m_, 1);
    std::vector<unsigned> d(k);
    for (std::size_t r = 0; r < m_; ++r) {
        for (unsigned j = 0; j < k; ++j) {
            unsigned s = 0;
            const std::uint8_t* row = &a_[(r * k + j) * g];
            for (std::size_t b = 0; b < g; ++b) s += row[b] * c[b];
            d[j] = s % p;
        }
        out[r] = f.from_digits(d);
    }
    return out;
}

Vec AdditiveMap::operator()(const Mat& m) const {
    auto c = domain_.gcoords(m);
    if (!c) throw InvalidArgument("matrix is not in the domain of the map");
    return evaluate(*c);
}

Vec AdditiveMap::on_basis(std::size_t b) const {
    std::vector<std::uint8_t> c(gdim(), 0);
    c.at(b) = 1;
    return evaluate(c);
}

bool AdditiveMap::is_zero() const noexcept {
    for (auto x : a_)
        if (x) return false;
    return true;
}

bool AdditiveMap::is_semilinear(unsigned i) const {
    const Field f = field();
    const Elem t = f.generator();
    const Elem st = f.frobenius(t, i);
    for (std::size_t b = 0; b < gdim(); ++b) {
        const Mat& g = domain_.gbasis()[b];
        auto c = domain_.gcoords(g.scaled(t));
        if (!c) return false;
        if (evaluate(*c) != on_basis(b).scaled(st)) return false;
    }
    return true;
}

bool AdditiveMap::is_linear() const { return is_semilinear(0); }

AdditiveMap AdditiveMap::operator+(const AdditiveMap& o) const {
    if (o.domain_ != domain_ || o.m_ != m_) throw InvalidArgument("map shape mismatch");
    const unsigned p = field().p();
    std::vector<std::uint8_t> a(a_.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::uint8_t>((a_[i] + o.a_[i]) % p);
    return AdditiveMap(domain_, m_, std::move(a));
}

AdditiveMap AdditiveMap::operator-(const AdditiveMap& o) const {
    const unsigned p = field().p();
    return *this + o.scaled(p - 1);
}

AdditiveMap AdditiveMap::scaled(unsigned c) const {
    const unsigned p = field().p();
    std::vector<std::uint8_t> a(a_.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::uint8_t>((a_[i] * (c % p)) % p);
    return AdditiveMap(domain_, m_, std::move(a));
}

AdditiveMap AdditiveMap::post_multiply(const Mat& t) const {
    if (t.cols() != m_) throw InvalidArgument("post_multiply: shape mismatch");
    return from_function(domain_, t.rows(), [&](const Mat& m) { return t * (*this)(m); });
}

std::string AdditiveMap::to_string() const {
    std::ostringstream os;
    os << "map " << domain_.describe() << " -> " << field().name() << '^' << m_ << " :";
    for (std::size_t b = 0; b < gdim(); ++b) {
        os << ' ';
        const Vec v = on_basis(b);
        for (std::size_t r = 0; r < m_; ++r) os << (r ? "," : "(") << static_cast<unsigned>(v[r]);
        os << ')';
    }
    return os.str();
}

std::vector<std::uint8_t> digit_matrix(const Mat& t) {
    const Field f = t.field();
    const unsigned k = f.k();
    const std::size_t cols = t.cols() * k;
    std::vector<std::uint8_t> out(t.rows() * k * cols, 0);
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t r = 0; r < t.cols(); ++r) {
            const auto mm = f.mul_matrix(t(i, r));
            for (unsigned l = 0; l < k; ++l)
                for (unsigned j = 0; j < k; ++j) out[(i * k + l) * cols + r * k + j] = mm[l * k + j];
        }
    return out;
}

}  // namespace rcmap
