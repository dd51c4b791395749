#include "rds/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rds {

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Mat::Mat(int r, int c, std::initializer_list<double> vals) : rows(r), cols(c), a(vals) {
    if (static_cast<int>(a.size()) != r * c)
        throw DimensionMismatch("Mat initializer size mismatch");
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat operator*(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw DimensionMismatch("Mat multiply");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Mat operator+(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw DimensionMismatch("Mat add");
    Mat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
    return C;
}

Mat operator-(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw DimensionMismatch("Mat sub");
    Mat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
    return C;
}

Mat operator*(double s, const Mat& A) {
    Mat C = A;
    for (double& x : C.a) x *= s;
    return C;
}

Mat transpose(const Mat& A) {
    Mat T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

Vec mat_vec(const Mat& A, const Vec& x) {
    if (A.cols != static_cast<int>(x.size())) throw DimensionMismatch("mat_vec");
    Vec y(A.rows, 0.0);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) y[i] += A(i, j) * x[j];
    return y;
}

double max_abs(const Mat& A) {
    double m = 0.0;
    for (double x : A.a) m = std::max(m, std::abs(x));
    return m;
}

double fro_norm(const Mat& A) {
    double s = 0.0;
    for (double x : A.a) s += x * x;
    return std::sqrt(s);
}

SymMatrix::SymMatrix(const Mat& raw) : n(raw.rows), m(raw) {
    if (raw.rows != raw.cols) throw DimensionMismatch("SymMatrix: not square");
    double scale = std::max(1.0, max_abs(raw));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = std::abs(raw(i, j) - raw(j, i));
            if (d >= 1e-12 * scale) throw NotSymmetric("SymMatrix: asymmetry above tolerance");
            double avg = 0.5 * (raw(i, j) + raw(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }
}

SymMatrix SymMatrix::scaled_identity(int n, double s) {
    return SymMatrix(s * Mat::identity(n));
}

EigenSym eigen_sym(const SymMatrix& A) {
    const int n = A.n;
    Mat a = A.m;
    Mat v = Mat::identity(n);
    const double anorm = fro_norm(a);

    auto offdiag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (offdiag() > 1e-12 * anorm && anorm > 0.0) {
        if (++sweep > 100) throw NoConvergence("eigen_sym: no convergence after 100 sweeps");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenSym out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        int src = order[j];
        out.values[j] = a(src, src);
        // sign convention: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(imax, src))) imax = i;
        double sgn = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) out.vectors(i, j) = sgn * v(i, src);
    }
    return out;
}

double lambda_min(const SymMatrix& A) { return eigen_sym(A).values.front(); }
double lambda_max(const SymMatrix& A) { return eigen_sym(A).values.back(); }

Mat null_basis(const Vec& c) {
    const int n = static_cast<int>(c.size());
    double cn = norm2(c);
    if (cn == 0.0) throw ZeroVector("null_basis: zero row vector");
    Vec u(c);
    for (double& x : u) x /= cn;

    Mat theta(n, n - 1);
    int col = 0;
    std::vector<Vec> accepted;
    for (int i = 0; i < n && col < n - 1; ++i) {
        Vec w(n, 0.0);
        w[i] = 1.0;
        double proj = dot(w, u);
        for (int k = 0; k < n; ++k) w[k] -= proj * u[k];
        for (const Vec& q : accepted) {
            double p = dot(w, q);
            for (int k = 0; k < n; ++k) w[k] -= p * q[k];
        }
        double wn = norm2(w);
        if (wn < 1e-8) continue;
        for (double& x : w) x /= wn;
        for (int k = 0; k < n; ++k) theta(k, col) = w[k];
        accepted.push_back(w);
        ++col;
    }
    if (col != n - 1) throw NoConvergence("null_basis: rank deficiency");
    return theta;
}

DefinitenessResult is_negative_definite(const SymMatrix& A, double margin) {
    DefinitenessResult r;
    r.lambda_max = lambda_max(A);
    r.negative_definite = r.lambda_max < -margin;
    return r;
}

}  // namespace rds
