#include "rds/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rds {

namespace {

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};

double time_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

}  // namespace

double integrate_window(const HistoryFunction& hist, double a, double b,
                        const std::function<double(double, const Vec&)>& f) {
    if (b <= a) return 0.0;
    auto pts = hist.breakpoints(a, b);
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) {
            double theta = mid + half * kGaussX[k];
            acc += kGaussW[k] * f(theta, hist.evaluate(theta));
        }
        total += half * acc;
    }
    return total;
}

double evaluate_quadratic(const SymMatrix& P, const SymMatrix& Q, const HistoryFunction& hist,
                          double t, double h, Side side) {
    if (P.n != hist.dim() || Q.n != hist.dim())
        throw DimensionMismatch("evaluate_quadratic: matrix order vs history dimension");
    if (t - h < hist.earliest() - time_tol(t))
        throw QueryOutOfWindow("evaluate_quadratic: window not fully recorded");
    Vec psi0 = side == Side::Left ? hist.evaluate(t) : hist.evaluate_right(t);
    double val = dot(psi0, mat_vec(P.m, psi0));
    val += integrate_window(hist, t - h, t,
                            [&](double, const Vec& x) { return dot(x, mat_vec(Q.m, x)); });
    return val;
}

LKFunctional make_quadratic_functional(const SymMatrix& P, const SymMatrix& Q, double h) {
    LKFunctional fn;
    fn.name = "quadratic";
    fn.dim = P.n;
    fn.h = h;
    fn.value = [P, Q, h](double t, const HistoryFunction& hist, Side side) {
        return evaluate_quadratic(P, Q, hist, t, h, side);
    };
    return fn;
}

double evaluate_example42(const HistoryFunction& hist, double t, double h, double delta,
                          Side side) {
    if (hist.dim() != 2) throw DimensionMismatch("evaluate_example42: requires n = 2");
    if (t - h < hist.earliest() - time_tol(t))
        throw QueryOutOfWindow("evaluate_example42: window not fully recorded");
    Vec x0 = side == Side::Left ? hist.evaluate(t) : hist.evaluate_right(t);
    double val = std::pow(x0[0], 4) / 4.0 + x0[1] * x0[1] / 2.0;
    val += 0.5 * delta *
           integrate_window(hist, t - h, t, [](double, const Vec& x) {
               return std::pow(x[0], 6) + x[1] * x[1];
           });
    return val;
}

SymMatrix example42_bound_matrix(double delta) {
    const double a = -0.5 * delta, b = 0.25 * delta;
    Mat m(4, 4,
          {a, b, b, 0,
           b, a, 0, 0,
           b, 0, a, b,
           0, 0, b, a});
    return SymMatrix(m);
}

LKFunctional make_example42_functional(double delta, double h) {
    LKFunctional fn;
    fn.name = "example42";
    fn.dim = 2;
    fn.h = h;
    fn.gamma = std::sqrt(0.2);
    fn.value = [delta, h](double t, const HistoryFunction& hist, Side side) {
        return evaluate_example42(hist, t, h, delta, side);
    };
    fn.u = [](double s) { return 0.25 * std::pow(s, 4); };
    fn.v = [](double s) { return 2.0 * s * s; };
    const double wm = -lambda_max(example42_bound_matrix(delta));
    fn.w = [wm](double s) { return wm * std::pow(s, 6); };
    fn.jump_increment = [](double, const Vec& pre) { return -0.5 * pre[1] * pre[1]; };
    return fn;
}

std::string to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::LowerBound: return "lower-bound";
        case ViolationKind::UpperBound: return "upper-bound";
        case ViolationKind::FlowIncrease: return "flow-increase";
        case ViolationKind::JumpIncrease: return "jump-increase";
    }
    return "?";
}

MonitorReport monitor(const Trajectory& traj, const LKFunctional& fn, double sample_step) {
    MonitorReport rep;
    const auto& hist = traj.archive;
    const double fd_off = std::max(1e-7 * traj.h, std::min(sample_step / 8.0, 1e-4 * traj.h));

    auto near_reset = [&](double lo, double hi) {
        for (const auto& r : traj.resets)
            if (r.t > lo && r.t <= hi) return true;
        return false;
    };

    for (double t = traj.t0; t <= traj.t_end + time_tol(traj.t_end); t += sample_step) {
        if (t > traj.t_end) t = traj.t_end;
        bool at_reset = false;
        for (const auto& r : traj.resets)
            if (std::abs(t - r.t) <= fd_off) at_reset = true;
        if (at_reset) continue;

        MonitorSample s;
        s.t = t;
        s.V = fn.value(t, hist, Side::Left);
        s.norm_x0 = norm2(hist.evaluate(t));
        s.norm_window = hist.sup_norm(t - traj.h, t);
        s.in_region = s.norm_window < fn.gamma;
        if (!s.in_region) ++rep.out_of_region_count;

        s.fd_valid = (t + 2.0 * fd_off <= traj.t_end) && !near_reset(t - fd_off, t + 2.0 * fd_off);
        double tol_flow = 0.0;
        if (s.fd_valid) {
            double v1 = fn.value(t + fd_off, hist, Side::Left);
            double v2 = fn.value(t + 2.0 * fd_off, hist, Side::Left);
            s.fd = (v1 - s.V) / fd_off;
            double second = (v2 - 2.0 * v1 + s.V) / (fd_off * fd_off);
            tol_flow = 1e-6 * (1.0 + std::abs(s.V)) + 2.0 * fd_off * std::abs(second) +
                       1e-13 * (1.0 + std::abs(s.V)) / fd_off;
            rep.max_flow_derivative = std::max(rep.max_flow_derivative, s.fd);
        }

        if (s.in_region) {
            if (s.fd_valid) {
                double rhs = fn.w ? -fn.w(s.norm_x0) : 0.0;
                if (s.fd > rhs + tol_flow)
                    rep.violations.push_back({ViolationKind::FlowIncrease, t, s.fd - rhs});
            }
            if (fn.u && s.V + 1e-9 < fn.u(s.norm_x0))
                rep.violations.push_back({ViolationKind::LowerBound, t, fn.u(s.norm_x0) - s.V});
            if (fn.v && s.V > fn.v(s.norm_window) + 1e-9)
                rep.violations.push_back({ViolationKind::UpperBound, t, s.V - fn.v(s.norm_window)});
        }
        rep.samples.push_back(s);
        if (t >= traj.t_end) break;
    }

    const auto& jumps = hist.jump_times();
    for (const auto& r : traj.resets) {
        bool registered = false;
        for (double j : jumps)
            if (std::abs(j - r.t) <= time_tol(r.t)) registered = true;
        if (!registered) continue;  // reset at the very end of the record

        JumpRecord jr;
        jr.t = r.t;
        jr.v_pre = fn.value(r.t, hist, Side::Left);
        jr.v_post = fn.value(r.t, hist, Side::Right);
        jr.dv = jr.v_post - jr.v_pre;
        if (fn.jump_increment) {
            jr.has_analytic = true;
            jr.analytic = fn.jump_increment(r.t, r.pre);
            jr.analytic_mismatch = std::abs(jr.dv - jr.analytic) > 1e-6 * (1.0 + std::abs(jr.v_pre));
        }
        bool in_region = hist.sup_norm(r.t - traj.h, r.t) < fn.gamma;
        if (in_region && jr.dv > 1e-9 * (1.0 + std::abs(jr.v_pre)))
            rep.violations.push_back({ViolationKind::JumpIncrease, r.t, jr.dv});
        rep.jumps.push_back(jr);
    }
    return rep;
}

std::vector<Violation> check_sandwich(const LKFunctional& fn, const HistoryFunction& hist,
                                      const std::vector<double>& times) {
    std::vector<Violation> out;
    for (double t : times) {
        double V = fn.value(t, hist, Side::Left);
        double n0 = norm2(hist.evaluate(t));
        double nw = hist.sup_norm(t - fn.h, t);
        if (nw >= fn.gamma) continue;
        if (fn.u && V + 1e-9 < fn.u(n0))
            out.push_back({ViolationKind::LowerBound, t, fn.u(n0) - V});
        if (fn.v && V > fn.v(nw) + 1e-9)
            out.push_back({ViolationKind::UpperBound, t, V - fn.v(nw)});
    }
    return out;
}

void write_functional_csv(std::ostream& os, const MonitorReport& report) {
    os << "t,V,phase\n";
    char buf[96];
    size_t j = 0;
    auto emit = [&](double t, double V, const char* phase) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s\n", t, V, phase);
        os << buf;
    };
    for (const auto& s : report.samples) {
        while (j < report.jumps.size() && report.jumps[j].t < s.t) {
            emit(report.jumps[j].t, report.jumps[j].v_pre, "pre");
            emit(report.jumps[j].t, report.jumps[j].v_post, "post");
            ++j;
        }
        emit(s.t, s.V, "flow");
    }
    for (; j < report.jumps.size(); ++j) {
        emit(report.jumps[j].t, report.jumps[j].v_pre, "pre");
        emit(report.jumps[j].t, report.jumps[j].v_post, "post");
    }
}

std::string report_summary(const MonitorReport& report) {
    std::ostringstream os;
    os << "samples: " << report.samples.size() << "\n";
    os << "jumps: " << report.jumps.size() << "\n";
    os << "out-of-region samples: " << report.out_of_region_count << "\n";
    os << "max flow derivative: " << report.max_flow_derivative << "\n";
    os << "violations: " << report.violations.size() << "\n";
    for (const auto& v : report.violations)
        os << "  " << to_string(v.kind) << " at t=" << v.t << " magnitude=" << v.magnitude << "\n";
    int mism = 0;
    for (const auto& j : report.jumps)
        if (j.analytic_mismatch) ++mism;
    if (mism > 0) os << "analytic jump mismatches: " << mism << "\n";
    return os.str();
}

}  // namespace rds
