#include "rcmap/space.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "rcmap/echelon.hpp"

namespace rcmap {

namespace {

Mat unflatten(Field f, std::size_t rows, std::size_t cols, const std::vector<Elem>& flat) {
    return Mat(f, rows, cols, flat);
}

std::vector<std::uint8_t> digit_flatten(const Mat& m) {
    const Field f = m.field();
    const unsigned k = f.k();
    std::vector<std::uint8_t> out(m.size() * k);
    for (std::size_t e = 0; e < m.size(); ++e)
        for (unsigned d = 0; d < k; ++d) out[e * k + d] = static_cast<std::uint8_t>(f.digit(m[e], d));
    return out;
}

Mat digit_unflatten(Field f, std::size_t rows, std::size_t cols, const std::vector<std::uint8_t>& v) {
    const unsigned k = f.k();
    Mat m(f, rows, cols);
    std::vector<unsigned> d(k);
    for (std::size_t e = 0; e < rows * cols; ++e) {
        for (unsigned i = 0; i < k; ++i) d[i] = v[e * k + i];
        m[e] = f.from_digits(d);
    }
    return m;
}

}  // namespace

Space Space::make(Field field, std::size_t rows, std::size_t cols, const std::vector<Mat>& generators,
                  Scalars scalars) {
    for (const auto& g : generators)
        if (g.field() != field || g.rows() != rows || g.cols() != cols)
            throw InvalidArgument("generator shape or field does not match the space");
    Space s(field, rows, cols, scalars);
    const std::size_t len = rows * cols;
    const unsigned k = field.k();
    if (scalars == Scalars::Field) {
        Mat stacked(field, generators.size(), len);
        for (std::size_t i = 0; i < generators.size(); ++i)
            for (std::size_t j = 0; j < len; ++j) stacked(i, j) = generators[i][j];
        const auto rr = rref(stacked);
        s.pivots_ = rr.pivots;
        for (std::size_t i = 0; i < rr.rank; ++i) {
            std::vector<Elem> flat(rr.R.entries().begin() + static_cast<std::ptrdiff_t>(i * len),
                                   rr.R.entries().begin() + static_cast<std::ptrdiff_t>((i + 1) * len));
            s.basis_.push_back(unflatten(field, rows, cols, flat));
        }
        for (const auto& b : s.basis_) {
            Elem tj = 1;
            for (unsigned j = 0; j < k; ++j) {
                s.gbasis_.push_back(b.scaled(tj));
                tj = field.mul(tj, field.generator());
            }
        }
    } else {
        std::vector<std::vector<std::uint8_t>> gens;
        gens.reserve(generators.size());
        for (const auto& g : generators) gens.push_back(digit_flatten(g));
        PrimeEchelon e(field.p(), len * k);
        for (const auto& g : gens) e.add_row(g);
        s.pivots_ = e.pivots();
        for (const auto& row : e.rref_rows()) s.basis_.push_back(digit_unflatten(field, rows, cols, row));
        s.gbasis_ = s.basis_;
    }
    return s;
}

std::size_t Space::codim() const noexcept {
    const std::size_t ambient = rows_ * cols_ * (scalars_ == Scalars::Field ? 1 : field_.k());
    return ambient - basis_.size();
}

std::optional<std::vector<Elem>> Space::coords(const Mat& m) const {
    if (scalars_ != Scalars::Field) throw InvalidArgument("K-coordinates need field scalars");
    if (m.field() != field_ || m.rows() != rows_ || m.cols() != cols_) return std::nullopt;
    std::vector<Elem> c(basis_.size());
    Mat acc(field_, rows_, cols_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        c[i] = m[pivots_[i]];
        if (c[i]) acc += basis_[i].scaled(c[i]);
    }
    if (acc != m) return std::nullopt;
    return c;
}

std::optional<std::vector<std::uint8_t>> Space::gcoords(const Mat& m) const {
    if (m.field() != field_ || m.rows() != rows_ || m.cols() != cols_) return std::nullopt;
    const unsigned k = field_.k();
    std::vector<std::uint8_t> g(gbasis_.size(), 0);
    if (scalars_ == Scalars::Field) {
        auto c = coords(m);
        if (!c) return std::nullopt;
        for (std::size_t i = 0; i < c->size(); ++i)
            for (unsigned j = 0; j < k; ++j) g[i * k + j] = static_cast<std::uint8_t>(field_.digit((*c)[i], j));
        return g;
    }
    Mat acc(field_, rows_, cols_);
    for (std::size_t b = 0; b < gbasis_.size(); ++b) {
        const std::size_t pos = pivots_[b];
        g[b] = static_cast<std::uint8_t>(field_.digit(m[pos / k], static_cast<unsigned>(pos % k)));
        for (unsigned t = 0; t < g[b]; ++t) acc += gbasis_[b];
    }
    if (acc != m) return std::nullopt;
    return g;
}

Mat Space::from_gcoords(const std::vector<std::uint8_t>& c) const {
    if (c.size() != gbasis_.size()) throw InvalidArgument("coordinate vector length mismatch");
    Mat acc(field_, rows_, cols_);
    for (std::size_t b = 0; b < c.size(); ++b)
        for (unsigned t = 0; t < c[b] % field_.p(); ++t) acc += gbasis_[b];
    return acc;
}

bool Space::contains(const Mat& m) const { return gcoords(m).has_value(); }

std::uint64_t Space::element_count() const noexcept {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < gbasis_.size(); ++i) {
        if (n > std::numeric_limits<std::uint64_t>::max() / field_.p()) return std::numeric_limits<std::uint64_t>::max();
        n *= field_.p();
    }
    return n;
}

void Space::require_enumerable(std::uint64_t budget, const char* what) const {
    const auto n = element_count();
    if (n > budget) throw BudgetExceeded(std::string(what) + ": enumeration of " + describe() + " refused", n, budget);
}

bool Space::operator==(const Space& o) const {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && scalars_ == o.scalars_ &&
           basis_ == o.basis_;
}

bool Space::is_subspace_of(const Space& o) const {
    if (field_ != o.field_ || rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (const auto& b : gbasis_)
        if (!o.contains(b)) return false;
    return true;
}

std::string Space::describe() const {
    std::ostringstream os;
    os << "subspace of Mat_{" << rows_ << ',' << cols_ << "}(" << field_.name() << ") of dim " << dim()
       << (scalars_ == Scalars::Prime ? " over the prime field" : "");
    return os.str();
}

Space zero_space(Field f, std::size_t n, std::size_t p) { return Space::make(f, n, p, {}); }

Space full_space(Field f, std::size_t n, std::size_t p) {
    std::vector<Mat> g;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) g.push_back(Mat::unit(f, n, p, i, j));
    return Space::make(f, n, p, g);
}

Space symmetric_space(Field f, std::size_t n) {
    std::vector<Mat> g;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Mat m(f, n, n);
            m(i, j) = 1;
            m(j, i) = 1;
            g.push_back(m);
        }
    return Space::make(f, n, n, g);
}

Space alternating_space(Field f, std::size_t n) {
    std::vector<Mat> g;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Mat m(f, n, n);
            m(i, j) = 1;
            m(j, i) = f.neg(1);
            g.push_back(m);
        }
    return Space::make(f, n, n, g);
}

Space vee(const Space& a, const Space& b) {
    if (a.field() != b.field()) throw InvalidArgument("vee: field mismatch");
    if (a.scalars() != Scalars::Field || b.scalars() != Scalars::Field)
        throw InvalidArgument("vee is defined for linear subspaces");
    const Field f = a.field();
    const std::size_t m = a.rows(), p = a.cols(), n = b.rows(), q = b.cols();
    std::vector<Mat> g;
    for (const auto& x : a.basis()) {
        Mat t(f, m + n, p + q);
        t.set_block(0, 0, x);
        g.push_back(t);
    }
    for (const auto& x : b.basis()) {
        Mat t(f, m + n, p + q);
        t.set_block(m, p, x);
        g.push_back(t);
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < q; ++j) g.push_back(Mat::unit(f, m + n, p + q, i, p + j));
    return Space::make(f, m + n, p + q, g);
}

Space coprod(const Space& a, const Space& b) {
    if (a.field() != b.field() || a.rows() != b.rows()) throw InvalidArgument("coprod: shape mismatch");
    if (a.scalars() != b.scalars()) throw InvalidArgument("coprod: scalar mismatch");
    const Field f = a.field();
    const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
    std::vector<Mat> g;
    for (const auto& x : a.basis()) {
        Mat t(f, n, p + q);
        t.set_block(0, 0, x);
        g.push_back(t);
    }
    for (const auto& x : b.basis()) {
        Mat t(f, n, p + q);
        t.set_block(0, p, x);
        g.push_back(t);
    }
    return Space::make(f, n, p + q, g, a.scalars());
}

Space transpose_space(const Space& s) {
    std::vector<Mat> g;
    for (const auto& b : s.basis()) g.push_back(b.transpose());
    return Space::make(s.field(), s.cols(), s.rows(), g, s.scalars());
}

Space embed_rows(const Space& s, std::size_t extra) {
    std::vector<Mat> g;
    for (const auto& b : s.basis()) {
        Mat t(s.field(), s.rows() + extra, s.cols());
        t.set_block(0, 0, b);
        g.push_back(t);
    }
    return Space::make(s.field(), s.rows() + extra, s.cols(), g, s.scalars());
}

Space type1_canonical(Field f, std::size_t n, std::size_t p) {
    if (n < 1 || p < 1) throw InvalidArgument("type1_canonical needs n, p >= 1");
    return vee(full_space(f, 1, 1), full_space(f, n - 1, p - 1));
}

Space symmetric_vee(Field f, std::size_t r, std::size_t n, std::size_t p) {
    if (r > n || r > p) throw InvalidArgument("symmetric block larger than the matrix");
    return vee(symmetric_space(f, r), full_space(f, n - r, p - r));
}

Space type2_canonical(Field f, std::size_t n, std::size_t p) {
    if (n < 2 || p < 2) throw InvalidArgument("type2_canonical needs n, p >= 2");
    return symmetric_vee(f, 2, n, p);
}

Space type3_canonical(Field f, std::size_t p) {
    if (p < 3) throw InvalidArgument("type3_canonical needs p >= 3");
    return coprod(symmetric_space(f, 3), full_space(f, 3, p - 3));
}

Space intro_u(Field f) {
    Mat a = Mat::identity(f, 2);
    Mat b = Mat::unit(f, 2, 2, 0, 1);
    return Space::make(f, 2, 2, {a, b});
}

Space intro_u_extended(Field f, std::size_t n, std::size_t p) {
    if (n < 2 || p < 2) throw InvalidArgument("intro_U_extended needs n, p >= 2");
    return vee(intro_u(f), full_space(f, n - 2, p - 2));
}

Space f2_sharpness(Field f, std::size_t n, std::size_t p) {
    if (n < 2 || p < 2) throw InvalidArgument("f2_sharpness needs n, p >= 2");
    return symmetric_vee(f, 2, n, p);
}

Space k_space(Field f, int index) {
    std::vector<Mat> g;
    switch (index) {
        case 1: {
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    if (i != j) g.push_back(Mat::unit(f, 3, 3, i, j));
            return Space::make(f, 3, 3, g);
        }
        case 2:
            g = {Mat::unit(f, 3, 2, 0, 0), Mat::unit(f, 3, 2, 1, 1), Mat::unit(f, 3, 2, 2, 1)};
            return Space::make(f, 3, 2, g);
        case 3: {
            Mat c(f, 3, 2);
            c(2, 0) = 1;
            c(2, 1) = 1;
            g = {Mat::unit(f, 3, 2, 0, 0), Mat::unit(f, 3, 2, 1, 1), c};
            return Space::make(f, 3, 2, g);
        }
        case 4: {
            Mat a(f, 3, 2);
            a(1, 0) = 1;
            a(2, 1) = 1;
            g = {a, Mat::unit(f, 3, 2, 0, 0), Mat::unit(f, 3, 2, 0, 1)};
            return Space::make(f, 3, 2, g);
        }
        default:
            throw InvalidArgument("K-space index must be 1..4");
    }
}

Space diag_line(Field f, std::size_t n) {
    if (n < 1) throw InvalidArgument("diag_line needs n >= 1");
    return Space::make(f, n, 1, {Mat::unit(f, n, 1, 0, 0)});
}

Space zero_column_space(Field f, std::size_t n, std::size_t p) {
    if (p < 1) throw InvalidArgument("zero column space needs p >= 1");
    return coprod(zero_space(f, n, 1), full_space(f, n, p - 1));
}

namespace {
struct LabelName {
    SpaceLabel label;
    const char* name;
};
constexpr LabelName kLabels[] = {
    {SpaceLabel::Full, "full"},
    {SpaceLabel::Symmetric, "symmetric"},
    {SpaceLabel::Alternating, "alternating"},
    {SpaceLabel::Type1Canonical, "type1"},
    {SpaceLabel::Type2Canonical, "type2"},
    {SpaceLabel::Type3Canonical, "type3"},
    {SpaceLabel::IntroU, "intro_U"},
    {SpaceLabel::IntroUExtended, "intro_U_extended"},
    {SpaceLabel::F2Sharpness, "f2_sharpness"},
    {SpaceLabel::K1, "K1"},
    {SpaceLabel::K2, "K2"},
    {SpaceLabel::K3, "K3"},
    {SpaceLabel::K4, "K4"},
    {SpaceLabel::DiagLine, "diag_line"},
    {SpaceLabel::ZeroColumn, "zero_col"},
};
}  // namespace

SpaceLabel parse_space_label(const std::string& name) {
    for (const auto& l : kLabels)
        if (name == l.name) return l.label;
    throw InvalidArgument("unknown space label '" + name + "'");
}

std::string label_name(SpaceLabel label) {
    for (const auto& l : kLabels)
        if (l.label == label) return l.name;
    return "?";
}

std::vector<std::string> label_names() {
    std::vector<std::string> out;
    for (const auto& l : kLabels) out.emplace_back(l.name);
    return out;
}

Space named_space(SpaceLabel label, Field f, SpaceParams pr) {
    switch (label) {
        case SpaceLabel::Full: return full_space(f, pr.n, pr.p);
        case SpaceLabel::Symmetric: return symmetric_space(f, pr.n);
        case SpaceLabel::Alternating: return alternating_space(f, pr.n);
        case SpaceLabel::Type1Canonical: return type1_canonical(f, pr.n, pr.p);
        case SpaceLabel::Type2Canonical: return type2_canonical(f, pr.n, pr.p);
        case SpaceLabel::Type3Canonical: return type3_canonical(f, pr.p);
        case SpaceLabel::IntroU: return intro_u(f);
        case SpaceLabel::IntroUExtended: return intro_u_extended(f, pr.n, pr.p);
        case SpaceLabel::F2Sharpness: return f2_sharpness(f, pr.n, pr.p);
        case SpaceLabel::K1: return k_space(f, 1);
        case SpaceLabel::K2: return k_space(f, 2);
        case SpaceLabel::K3: return k_space(f, 3);
        case SpaceLabel::K4: return k_space(f, 4);
        case SpaceLabel::DiagLine: return diag_line(f, pr.n);
        case SpaceLabel::ZeroColumn: return zero_column_space(f, pr.n, pr.p);
    }
    throw InvalidArgument("unknown space label");
}

Space orthogonal(const Space& s) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("orthogonal needs a K-linear subspace");
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols();
    // Unknown N in Mat_{p,n}, index j*n + i for N(j, i); tr(N M) = sum N(j,i) M(i,j).
    Mat sys(f, s.dim(), n * p);
    for (std::size_t r = 0; r < s.dim(); ++r) {
        const Mat& b = s.basis()[r];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) sys(r, j * n + i) = b(i, j);
    }
    std::vector<Mat> g;
    for (const auto& v : nullspace(sys)) g.push_back(Mat(f, p, n, v.entries()));
    return Space::make(f, p, n, g);
}

Space act(const Mat& P, const Mat& Q, const Space& s) {
    if (P.rows() != s.rows() || Q.rows() != s.cols()) throw InvalidArgument("act: shape mismatch");
    const Mat Qi = inverse_or_throw(Q, "Q");
    if (!is_invertible(P)) throw InvalidArgument("P is not invertible");
    std::vector<Mat> g;
    for (const auto& b : s.basis()) g.push_back(P * b * Qi);
    return Space::make(s.field(), s.rows(), s.cols(), g, s.scalars());
}

Mat projection_matrix(const Vec& y0) {
    const Field f = y0.field();
    if (y0.cols() != 1 || y0.is_zero()) throw InvalidArgument("projection needs a nonzero column vector");
    const Vec y = normalize_projective(y0);
    const std::size_t n = y.rows();
    std::size_t i0 = 0;
    while (y[i0] == 0) ++i0;
    Mat pi(f, n - 1, n);
    std::size_t r = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i0) continue;
        pi(r, j) = 1;
        pi(r, i0) = f.neg(y[j]);
        ++r;
    }
    return pi;
}

Projection project_mod(const Space& s, const Vec& y) {
    if (y.rows() != s.rows()) throw InvalidArgument("project_mod: vector length mismatch");
    Mat pi = projection_matrix(y);
    std::vector<Mat> g;
    for (const auto& b : s.basis()) g.push_back(pi * b);
    return {Space::make(s.field(), s.rows() - 1, s.cols(), g, s.scalars()), pi};
}

Space hat_space(const Space& s) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("hat space needs a K-linear subspace");
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols(), d = s.dim();
    std::vector<Mat> g;
    for (std::size_t l = 0; l < p; ++l) {
        Mat m(f, n, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t r = 0; r < n; ++r) m(r, i) = s.basis()[i](r, l);
        g.push_back(m);
    }
    return Space::make(f, n, d, g);
}

Space evaluate_span(const Space& s, const Vec& x) {
    if (x.rows() != s.cols() || x.cols() != 1) throw InvalidArgument("evaluate_span: vector length mismatch");
    std::vector<Mat> g;
    for (const auto& b : s.basis()) g.push_back(b * x);
    return Space::make(s.field(), s.rows(), 1, g, s.scalars());
}

std::vector<Vec> common_kernel(const Space& s) {
    const Field f = s.field();
    Mat stacked(f, s.gdim() * s.rows(), s.cols());
    for (std::size_t i = 0; i < s.gdim(); ++i) stacked.set_block(i * s.rows(), 0, s.gbasis()[i]);
    return nullspace(stacked);
}

Space range_sum(const Space& s) {
    std::vector<Mat> g;
    for (const auto& b : s.gbasis())
        for (std::size_t j = 0; j < s.cols(); ++j) g.push_back(b.col(j));
    return Space::make(s.field(), s.rows(), 1, g);
}

Space vector_span(Field f, std::size_t n, const std::vector<Vec>& vectors) {
    return Space::make(f, n, 1, vectors);
}

}  // namespace rcmap
