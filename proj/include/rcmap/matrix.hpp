#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rcmap/field.hpp"

namespace rcmap {

/// Dense matrix over a finite field, row-major.
class Mat {
public:
    Mat(Field field, std::size_t rows, std::size_t cols);
    Mat(Field field, std::size_t rows, std::size_t cols, std::vector<Elem> entries);

    static Mat identity(Field field, std::size_t n);
    /// E_{i,j} in Mat_{rows,cols}.
    static Mat unit(Field field, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);
    /// Column vector from entries.
    static Mat column(Field field, std::vector<Elem> entries);
    static Mat basis_vector(Field field, std::size_t n, std::size_t i);

    Field field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return e_.size(); }

    Elem operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
    Elem& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    /// Flat access, for vectors in particular.
    Elem operator[](std::size_t i) const { return e_[i]; }
    Elem& operator[](std::size_t i) { return e_[i]; }

    const std::vector<Elem>& entries() const noexcept { return e_; }
    std::vector<Elem>& entries() noexcept { return e_; }

    bool is_zero() const noexcept;
    bool is_square() const noexcept { return rows_ == cols_; }

    Mat transpose() const;
    Mat scaled(Elem s) const;
    /// Entrywise field automorphism x -> x^(p^i).
    Mat frobenius(unsigned i) const;
    Mat block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;
    void set_block(std::size_t r0, std::size_t c0, const Mat& b);
    Mat row(std::size_t i) const { return block(i, 0, 1, cols_); }
    Mat col(std::size_t j) const { return block(0, j, rows_, 1); }

    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const Mat& o) const;
    Mat operator-() const;
    Mat& operator+=(const Mat& o);

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }
    friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }
    /// Lexicographic on (rows, cols, entries).
    friend bool operator<(const Mat& a, const Mat& b);

    std::string to_string() const;

private:
    Field field_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Elem> e_;
};

using Vec = Mat;

Mat hstack(const Mat& a, const Mat& b);
Mat vstack(const Mat& a, const Mat& b);

struct RrefResult {
    Mat R;
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form; leftmost pivot, smallest row index.
RrefResult rref(const Mat& m);
std::size_t rank(const Mat& m);

struct SolveResult {
    std::optional<Mat> particular;
    std::vector<Vec> nullspace;
};

/// Solves A X = B. The particular solution has free variables set to 0; the
/// nullspace basis is ordered by free column index.
SolveResult solve(const Mat& a, const Mat& b);
/// Basis of ker A (column vectors), ordered by free column index.
std::vector<Vec> nullspace(const Mat& a);
/// Basis of the left kernel {y : y^T A = 0}, as column vectors.
std::vector<Vec> left_nullspace(const Mat& a);

bool in_column_space(const Mat& m, const Vec& v);
std::optional<Mat> inverse(const Mat& m);
/// Throws InvalidArgument when m is singular or not square.
Mat inverse_or_throw(const Mat& m, const char* what);
bool is_invertible(const Mat& m);

/// Scales a nonzero vector so that its first nonzero entry is 1.
Vec normalize_projective(const Vec& v);

/// All projective representatives of K^n (first nonzero entry 1), in
/// increasing order of their integer encoding.
std::vector<Vec> projective_points(Field field, std::size_t n);
/// All vectors of K^n in increasing code order (entry 0 least significant).
std::vector<Vec> all_vectors(Field field, std::size_t n);

/// Stacks the rows of `vectors` (each flattened) into a matrix.
Mat rows_of(Field field, std::size_t width, const std::vector<Vec>& vectors);

}  // namespace rcmap
