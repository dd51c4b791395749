#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rds {

using Vec = std::vector<double>;

double norm2(const Vec& v);
double dot(const Vec& a, const Vec& b);

// Dense row-major matrix, small orders only.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    Mat(int r, int c, std::initializer_list<double> vals);

    static Mat identity(int n);

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Mat operator*(const Mat& A, const Mat& B);
Mat operator+(const Mat& A, const Mat& B);
Mat operator-(const Mat& A, const Mat& B);
Mat operator*(double s, const Mat& A);
Mat transpose(const Mat& A);
Vec mat_vec(const Mat& A, const Vec& x);
double max_abs(const Mat& A);
double fro_norm(const Mat& A);

struct NotSymmetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroVector : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric matrix; input is symmetrized, rejecting anything whose
// asymmetry exceeds 1e-12 relative to the largest entry.
struct SymMatrix {
    int n = 0;
    Mat m;

    SymMatrix() = default;
    explicit SymMatrix(const Mat& raw);
    static SymMatrix identity(int n) { return SymMatrix(Mat::identity(n)); }
    static SymMatrix scaled_identity(int n, double s);

    double operator()(int i, int j) const { return m(i, j); }
};

struct EigenSym {
    Vec values;   // ascending
    Mat vectors;  // orthonormal columns, vectors.col(i) pairs with values[i]
};

// Cyclic Jacobi rotations; off-diagonal Frobenius norm driven below
// 1e-12 * ||A||_F. Throws NoConvergence after 100 sweeps.
EigenSym eigen_sym(const SymMatrix& A);

double lambda_min(const SymMatrix& A);
double lambda_max(const SymMatrix& A);

// Orthonormal basis of the null space of a 1xn row vector; n x (n-1).
Mat null_basis(const Vec& c);

struct DefinitenessResult {
    bool negative_definite = false;
    double lambda_max = 0.0;
};

// True iff lambda_max(A) < -margin.
DefinitenessResult is_negative_definite(const SymMatrix& A, double margin);

}  // namespace rds
