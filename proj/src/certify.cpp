#include "rds/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace rds {

namespace {
constexpr double kJumpSlack = 1e-10;
constexpr double kEigenFloor = 1e-2;
}  // namespace

void LTIResetSpec::validate() const {
    const int n = A.rows;
    if (n <= 0 || A.cols != n || Ad.rows != n || Ad.cols != n || Ar.rows != n || Ar.cols != n ||
        static_cast<int>(C.size()) != n)
        throw DimensionMismatch("LTIResetSpec: inconsistent dimensions");
    if (norm2(C) == 0.0) throw ZeroVector("LTIResetSpec: C must be nonzero");
    if (h <= 0.0) throw InvalidConfig("LTIResetSpec: h must be positive");
}

SymMatrix build_flow_lmi(const LTIResetSpec& spec, const SymMatrix& P, const SymMatrix& Q) {
    const int n = spec.dim();
    if (P.n != n || Q.n != n) throw DimensionMismatch("build_flow_lmi: order mismatch");
    Mat top = transpose(spec.A) * P.m + P.m * spec.A + Q.m;
    Mat off = P.m * spec.Ad;
    Mat M(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            M(i, j) = top(i, j);
            M(i, n + j) = off(i, j);
            M(n + j, i) = off(i, j);
            M(n + i, n + j) = -Q.m(i, j);
        }
    return SymMatrix(M);
}

SymMatrix build_jump_block(const LTIResetSpec& spec, const SymMatrix& P) {
    const int n = spec.dim();
    if (P.n != n) throw DimensionMismatch("build_jump_block: order mismatch");
    Mat theta = null_basis(spec.C);
    Mat inner = transpose(spec.Ar) * P.m * spec.Ar - P.m;
    return SymMatrix(transpose(theta) * inner * theta);
}

CertificateVerdict verify(const LTIResetSpec& spec, const SymMatrix& P, const SymMatrix& Q,
                          double margin) {
    spec.validate();
    const int n = spec.dim();
    CertificateVerdict v;
    v.lambda_min_P = lambda_min(P);
    v.lambda_min_Q = lambda_min(Q);
    SymMatrix M = build_flow_lmi(spec, P, Q);
    v.lambda_flow = lambda_max(M);
    v.lambda_jump = 0.0;
    if (n > 1) {
        SymMatrix J = build_jump_block(spec, P);
        v.lambda_jump = lambda_max(J);
    }

    if (v.lambda_min_P <= 0.0) {
        v.failed_condition = "P";
        return v;
    }
    if (v.lambda_min_Q <= 0.0) {
        v.failed_condition = "Q";
        return v;
    }
    if (!(v.lambda_flow < -margin)) {
        v.failed_condition = "flow-lmi";
        return v;
    }
    if (!(v.lambda_jump <= kJumpSlack)) {
        v.failed_condition = "jump-condition";
        return v;
    }

    v.pass = true;
    StabilityCertificate cert;
    cert.P = P;
    cert.Q = Q;
    cert.theta = n > 1 ? null_basis(spec.C) : Mat(n, 0);
    cert.flow_margin = -v.lambda_flow;
    cert.jump_margin = -v.lambda_jump;
    cert.u_coeff = v.lambda_min_P;
    cert.v_coeff = lambda_max(P) + spec.h * lambda_max(Q);
    cert.w_coeff = -v.lambda_flow;  // lambda_min(-M)
    cert.h = spec.h;
    v.certificate = std::move(cert);
    return v;
}

namespace {

Mat sym_outer(const Vec& a, const Vec& b) {
    const int n = static_cast<int>(a.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a[i] * b[j] + b[i] * a[j];
    return m;
}

Mat eigen_floor(const Mat& raw, double floor_val) {
    SymMatrix s(0.5 * (raw + transpose(raw)));
    EigenSym e = eigen_sym(s);
    const int n = s.n;
    Mat out(n, n);
    for (int k = 0; k < n; ++k) {
        double lam = std::max(e.values[k], floor_val);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) += lam * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

Vec column(const Mat& m, int j) {
    Vec v(m.rows);
    for (int i = 0; i < m.rows; ++i) v[i] = m(i, j);
    return v;
}

}  // namespace

SearchResult search(const LTIResetSpec& spec, double margin, int budget, unsigned seed) {
    spec.validate();
    if (budget < 1) throw InvalidConfig("search: budget must be >= 1");
    const int n = spec.dim();
    const Mat theta = n > 1 ? null_basis(spec.C) : Mat(n, 0);

    SearchResult result;
    result.best_objective = std::numeric_limits<double>::infinity();

    const int restarts = 3;
    const int per_restart = std::max(1, budget / restarts);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-0.1, 0.1);

    for (int restart = 0; restart < restarts; ++restart) {
        Mat P = Mat::identity(n);
        Mat Q = Mat::identity(n);
        if (restart > 0) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double p = unif(rng), q = unif(rng);
                    P(i, j) += p;
                    P(j, i) = P(i, j);
                    Q(i, j) += q;
                    Q(j, i) = Q(i, j);
                }
            P = eigen_floor(P, kEigenFloor);
            Q = eigen_floor(Q, kEigenFloor);
        }

        for (int iter = 0; iter < per_restart; ++iter) {
            ++result.iterations;
            SymMatrix sp(P), sq(Q);
            SymMatrix M = build_flow_lmi(spec, sp, sq);
            EigenSym em = eigen_sym(M);
            const double f_flow = em.values.back() + margin;

            double f_jump = -std::numeric_limits<double>::infinity();
            EigenSym ej;
            if (n > 1) {
                SymMatrix J(transpose(theta) * (transpose(spec.Ar) * P * spec.Ar - P) * theta);
                ej = eigen_sym(J);
                f_jump = ej.values.back() - kJumpSlack;
            }

            const double obj = std::max(f_flow, f_jump);
            if (obj < result.best_objective) {
                result.best_objective = obj;
                result.blocking_condition = (f_flow >= f_jump) ? "flow-lmi" : "jump-condition";
            }
            if (f_flow <= 0.0 && f_jump <= 0.0) {
                CertificateVerdict v = verify(spec, sp, sq, margin);
                if (v.pass) {
                    result.feasible = true;
                    result.certificate = v.certificate;
                    return result;
                }
            }

            Mat gP(n, n), gQ(n, n);
            if (f_flow >= f_jump) {
                Vec top = column(em.vectors, 2 * n - 1);
                Vec v1(top.begin(), top.begin() + n);
                Vec v2(top.begin() + n, top.end());
                Vec Av1 = mat_vec(spec.A, v1);
                Vec Adv2 = mat_vec(spec.Ad, v2);
                gP = sym_outer(Av1, v1) + sym_outer(v1, Adv2);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) gQ(i, j) = v1[i] * v1[j] - v2[i] * v2[j];
            } else {
                Vec y = column(ej.vectors, static_cast<int>(ej.values.size()) - 1);
                Vec z = mat_vec(theta, y);
                Vec Arz = mat_vec(spec.Ar, z);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) gP(i, j) = Arz[i] * Arz[j] - z[i] * z[j];
            }

            const double alpha = 0.5 / std::sqrt(1.0 + iter);
            double np = fro_norm(gP), nq = fro_norm(gQ);
            if (np > 0.0) P = P - (alpha / std::max(1.0, np)) * gP;
            if (nq > 0.0) Q = Q - (alpha / std::max(1.0, nq)) * gQ;
            P = eigen_floor(P, kEigenFloor);
            Q = eigen_floor(Q, kEigenFloor);
        }
    }
    return result;
}

LKFunctional certificate_to_functional(const StabilityCertificate& cert,
                                       const LTIResetSpec& spec) {
    LKFunctional fn = make_quadratic_functional(cert.P, cert.Q, cert.h);
    fn.name = "certificate";
    const double uc = cert.u_coeff, vc = cert.v_coeff, wc = cert.w_coeff;
    fn.u = [uc](double s) { return uc * s * s; };
    fn.v = [vc](double s) { return vc * s * s; };
    fn.w = [wc](double s) { return wc * s * s; };
    Mat inner = transpose(spec.Ar) * cert.P.m * spec.Ar - cert.P.m;
    fn.jump_increment = [inner](double, const Vec& pre) { return dot(pre, mat_vec(inner, pre)); };
    return fn;
}

namespace {

void write_row_major(std::ostream& os, const char* key, const Mat& m) {
    char buf[32];
    os << key << " =";
    for (double x : m.a) {
        std::snprintf(buf, sizeof(buf), " %.17g", x);
        os << buf;
    }
    os << "\n";
}

}  // namespace

void write_certificate(std::ostream& os, const StabilityCertificate& cert) {
    char buf[64];
    os << "rds-certificate v1\n";
    os << "n = " << cert.P.n << "\n";
    std::snprintf(buf, sizeof(buf), "h = %.17g\n", cert.h);
    os << buf;
    write_row_major(os, "P", cert.P.m);
    write_row_major(os, "Q", cert.Q.m);
    write_row_major(os, "theta", cert.theta);
    auto scalar = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
        os << buf;
    };
    scalar("flow_margin", cert.flow_margin);
    scalar("jump_margin", cert.jump_margin);
    scalar("u_coeff", cert.u_coeff);
    scalar("v_coeff", cert.v_coeff);
    scalar("w_coeff", cert.w_coeff);
}

StabilityCertificate read_certificate(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("rds-certificate", 0) != 0)
        throw InvalidConfig("read_certificate: bad header");
    StabilityCertificate cert;
    int n = 0;
    Mat p, q, th;
    auto parse_values = [](const std::string& rest) {
        std::istringstream ss(rest);
        std::vector<double> vals;
        double x;
        while (ss >> x) vals.push_back(x);
        return vals;
    };
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string rest = line.substr(eq + 1);
        auto vals = parse_values(rest);
        if (key == "n") {
            n = static_cast<int>(vals.at(0));
        } else if (key == "h") {
            cert.h = vals.at(0);
        } else if (key == "P") {
            p = Mat(n, n);
            p.a = vals;
        } else if (key == "Q") {
            q = Mat(n, n);
            q.a = vals;
        } else if (key == "theta") {
            th = Mat(n, n - 1);
            th.a = vals;
        } else if (key == "flow_margin") {
            cert.flow_margin = vals.at(0);
        } else if (key == "jump_margin") {
            cert.jump_margin = vals.at(0);
        } else if (key == "u_coeff") {
            cert.u_coeff = vals.at(0);
        } else if (key == "v_coeff") {
            cert.v_coeff = vals.at(0);
        } else if (key == "w_coeff") {
            cert.w_coeff = vals.at(0);
        }
    }
    if (n == 0 || p.a.size() != static_cast<size_t>(n) * n || q.a.size() != p.a.size())
        throw InvalidConfig("read_certificate: incomplete matrices");
    cert.P = SymMatrix(p);
    cert.Q = SymMatrix(q);
    cert.theta = th;
    return cert;
}

}  // namespace rds
