#include "rcmap/matrix.hpp"

#include <algorithm>
#include <sstream>

#include "rcmap/error.hpp"

namespace rcmap {

Mat::Mat(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), e_(rows * cols, 0) {}

Mat::Mat(Field field, std::size_t rows, std::size_t cols, std::vector<Elem> entries)
    : field_(field), rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != rows * cols) throw InvalidArgument("matrix entry count does not match shape");
    for (Elem x : e_)
        if (x >= field.q()) throw InvalidArgument("matrix entry outside the field");
}

Mat Mat::identity(Field field, std::size_t n) {
    Mat m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Mat Mat::unit(Field field, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
    Mat m(field, rows, cols);
    m(i, j) = 1;
    return m;
}

Mat Mat::column(Field field, std::vector<Elem> entries) {
    const std::size_t n = entries.size();
    return Mat(field, n, 1, std::move(entries));
}

Mat Mat::basis_vector(Field field, std::size_t n, std::size_t i) {
    Mat v(field, n, 1);
    v[i] = 1;
    return v;
}

bool Mat::is_zero() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](Elem x) { return x == 0; });
}

Mat Mat::transpose() const {
    Mat t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::scaled(Elem s) const {
    Mat r = *this;
    for (auto& x : r.e_) x = field_.mul(s, x);
    return r;
}

Mat Mat::frobenius(unsigned i) const {
    Mat r = *this;
    for (auto& x : r.e_) x = field_.frobenius(x, i);
    return r;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const {
    if (r0 + nrows > rows_ || c0 + ncols > cols_) throw InvalidArgument("block outside matrix");
    Mat b(field_, nrows, ncols);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw InvalidArgument("block outside matrix");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Mat Mat::operator+(const Mat& o) const {
    Mat r = *this;
    r += o;
    return r;
}

Mat& Mat::operator+=(const Mat& o) {
    if (o.field_ != field_ || o.rows_ != rows_ || o.cols_ != cols_)
        throw InvalidArgument("matrix sum shape mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] = field_.add(e_[i], o.e_[i]);
    return *this;
}

Mat Mat::operator-() const {
    Mat r = *this;
    for (auto& x : r.e_) x = field_.neg(x);
    return r;
}

Mat Mat::operator-(const Mat& o) const { return *this + (-o); }

Mat Mat::operator*(const Mat& o) const {
    if (o.field_ != field_ || cols_ != o.rows_) throw InvalidArgument("matrix product shape mismatch");
    Mat r(field_, rows_, o.cols_);
    const Elem* add = field_.add_table();
    const Elem* mul = field_.mul_table();
    const unsigned q = field_.q();
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t l = 0; l < cols_; ++l) {
            const Elem a = (*this)(i, l);
            if (a == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) {
                Elem& t = r(i, j);
                t = add[t * q + mul[a * q + o(l, j)]];
            }
        }
    return r;
}

bool operator<(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
    if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
    return a.e_ < b.e_;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ' ';
            os << static_cast<unsigned>((*this)(i, j));
        }
    }
    os << ']';
    return os.str();
}

Mat hstack(const Mat& a, const Mat& b) {
    if (a.field() != b.field() || a.rows() != b.rows()) throw InvalidArgument("hstack shape mismatch");
    Mat r(a.field(), a.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(0, a.cols(), b);
    return r;
}

Mat vstack(const Mat& a, const Mat& b) {
    if (a.field() != b.field() || a.cols() != b.cols()) throw InvalidArgument("vstack shape mismatch");
    Mat r(a.field(), a.rows() + b.rows(), a.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), 0, b);
    return r;
}

RrefResult rref(const Mat& m) {
    const Field f = m.field();
    const Elem* add = f.add_table();
    const Elem* mul = f.mul_table();
    const Elem* neg = f.neg_table();
    const unsigned q = f.q();
    RrefResult res{m, 0, {}};
    Mat& R = res.R;
    const std::size_t rows = R.rows();
    const std::size_t cols = R.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && R(piv, c) == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(R(piv, j), R(r, j));
        const Elem s = f.inv(R(r, c));
        for (std::size_t j = c; j < cols; ++j) R(r, j) = mul[s * q + R(r, j)];
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || R(i, c) == 0) continue;
            const Elem factor = neg[R(i, c)];
            for (std::size_t j = c; j < cols; ++j)
                R(i, j) = add[R(i, j) * q + mul[factor * q + R(r, j)]];
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

std::size_t rank(const Mat& m) { return rref(m).rank; }

SolveResult solve(const Mat& a, const Mat& b) {
    if (a.field() != b.field() || a.rows() != b.rows()) throw InvalidArgument("solve shape mismatch");
    const Field f = a.field();
    const std::size_t n = a.cols();
    const auto rr = rref(hstack(a, b));
    SolveResult out;
    bool consistent = true;
    std::vector<std::size_t> apiv;
    for (std::size_t pc : rr.pivots) {
        if (pc >= n) {
            consistent = false;
            break;
        }
        apiv.push_back(pc);
    }
    if (consistent) {
        Mat x(f, n, b.cols());
        for (std::size_t i = 0; i < apiv.size(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) x(apiv[i], j) = rr.R(i, n + j);
        out.particular = std::move(x);
    }
    // Nullspace from the rref of A alone (pivots of A are the same columns).
    std::vector<bool> is_piv(n, false);
    const auto ra = rref(a);
    for (std::size_t pc : ra.pivots) is_piv[pc] = true;
    for (std::size_t fc = 0; fc < n; ++fc) {
        if (is_piv[fc]) continue;
        Vec v(f, n, 1);
        v[fc] = 1;
        for (std::size_t i = 0; i < ra.pivots.size(); ++i) v[ra.pivots[i]] = f.neg(ra.R(i, fc));
        out.nullspace.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> nullspace(const Mat& a) {
    const Field f = a.field();
    const std::size_t n = a.cols();
    const auto ra = rref(a);
    std::vector<bool> is_piv(n, false);
    for (std::size_t pc : ra.pivots) is_piv[pc] = true;
    std::vector<Vec> out;
    for (std::size_t fc = 0; fc < n; ++fc) {
        if (is_piv[fc]) continue;
        Vec v(f, n, 1);
        v[fc] = 1;
        for (std::size_t i = 0; i < ra.pivots.size(); ++i) v[ra.pivots[i]] = f.neg(ra.R(i, fc));
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> left_nullspace(const Mat& a) { return nullspace(a.transpose()); }

bool in_column_space(const Mat& m, const Vec& v) {
    if (m.field() != v.field() || v.rows() != m.rows() || v.cols() != 1)
        throw InvalidArgument("in_column_space shape mismatch");
    return rank(hstack(m, v)) == rank(m);
}

std::optional<Mat> inverse(const Mat& m) {
    if (!m.is_square()) return std::nullopt;
    const std::size_t n = m.rows();
    const auto rr = rref(hstack(m, Mat::identity(m.field(), n)));
    if (rr.rank < n || (n > 0 && rr.pivots[n - 1] != n - 1)) return std::nullopt;
    return rr.R.block(0, n, n, n);
}

Mat inverse_or_throw(const Mat& m, const char* what) {
    auto inv = inverse(m);
    if (!inv) throw InvalidArgument(std::string(what) + " is not invertible");
    return *inv;
}

bool is_invertible(const Mat& m) { return m.is_square() && rank(m) == m.rows(); }

Vec normalize_projective(const Vec& v) {
    const Field f = v.field();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) return v.scaled(f.inv(v[i]));
    throw InvalidArgument("cannot normalize the zero vector");
}

std::vector<Vec> all_vectors(Field field, std::size_t n) {
    std::vector<Vec> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= field.q();
    out.reserve(total);
    Vec v(field, n, 1);
    for (std::size_t c = 0; c < total; ++c) {
        out.push_back(v);
        for (std::size_t i = 0; i < n; ++i) {
            if (++v[i] < field.q()) break;
            v[i] = 0;
        }
    }
    return out;
}

std::vector<Vec> projective_points(Field field, std::size_t n) {
    std::vector<Vec> out;
    for (auto& v : all_vectors(field, n)) {
        std::size_t i = 0;
        while (i < n && v[i] == 0) ++i;
        if (i < n && v[i] == 1) out.push_back(std::move(v));
    }
    return out;
}

Mat rows_of(Field field, std::size_t width, const std::vector<Vec>& vectors) {
    Mat m(field, vectors.size(), width);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != width) throw InvalidArgument("rows_of width mismatch");
        for (std::size_t j = 0; j < width; ++j) m(i, j) = vectors[i][j];
    }
    return m;
}

}  // namespace rcmap
