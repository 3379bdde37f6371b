#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace adaptsim {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double nrm2(const Vec& a);
double inf_norm(const Vec& a);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
// y += s*x
void axpy(double s, const Vec& x, Vec& y);
bool all_finite(const Vec& a);

/// Dense row-major matrix. Everything in this library is tiny (d <= 16),
/// so there is no attempt at being clever.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static Mat identity(int n);
    static Mat diag(const Vec& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    Vec operator*(const Vec& v) const;
    Mat transposed() const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(double s) const;

    double max_abs() const;
    /// Max |a_ij - a_ji| over the matrix (0 for exactly symmetric input).
    double asymmetry() const;
    void symmetrize();

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix,
/// or nullopt when the factorization breaks down.
std::optional<Mat> cholesky(const Mat& a);

/// Solves A x = b given the Cholesky factor L of A.
Vec chol_solve(const Mat& chol_lower, const Vec& b);

/// v' A^{-1} v given the Cholesky factor of A.
double quad_form_inv(const Mat& chol_lower, const Vec& v);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vec jacobi_eigenvalues(Mat a, int max_sweeps = 64);

}  // namespace adaptsim
