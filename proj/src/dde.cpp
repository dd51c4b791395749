#include "rds/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rds {

namespace {
double time_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }
}  // namespace

ResetSystemSpec make_lti_system(const Mat& A, const Mat& Ad, const Mat& Ar, const Vec& C,
                                double h, double delta, double t0) {
    const int n = A.rows;
    if (A.cols != n || Ad.rows != n || Ad.cols != n || Ar.rows != n || Ar.cols != n ||
        static_cast<int>(C.size()) != n)
        throw DimensionMismatch("make_lti_system: inconsistent dimensions");
    ResetSystemSpec s;
    s.dim = n;
    s.h = h;
    s.delta = delta;
    s.t0 = t0;
    s.flow = [A, Ad](double, const Vec& x, const Vec& xd) {
        Vec out = mat_vec(A, x);
        Vec d = mat_vec(Ad, xd);
        for (size_t i = 0; i < out.size(); ++i) out[i] += d[i];
        return out;
    };
    s.reset_map = [Ar](double, const Vec& x) { return mat_vec(Ar, x); };
    s.surface = [C](const Vec& x) { return dot(C, x); };
    return s;
}

IntegratorConfig IntegratorConfig::defaults(double h, double horizon) {
    IntegratorConfig c;
    c.dt = h / 100.0;
    c.eps_t = 1e-10 * h;
    c.horizon = horizon;
    return c;
}

double Trajectory::min_reset_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    double prev = t0;
    for (const auto& r : resets) {
        gap = std::min(gap, r.t - prev);
        prev = r.t;
    }
    return gap;
}

int Trajectory::segment_index(double t) const {
    int idx = 0;
    for (const auto& r : resets) {
        if (r.t < t - time_tol(t)) ++idx;
        else break;
    }
    return idx;
}

double locate_event(const ResetSystemSpec& spec, const HistNode& a, const HistNode& b,
                    double eps_t, double eps_g) {
    auto g_at = [&](double t) { return spec.surface(hermite_eval(a, b, t)); };

    const int kScan = 64;
    const double lo0 = a.t, hi0 = b.t;
    double lo = lo0, hi = hi0;
    double g_lo = g_at(lo0);
    bool found = false;
    if (std::abs(g_lo) < eps_g) return lo0;
    for (int i = 1; i <= kScan; ++i) {
        double t = lo0 + (hi0 - lo0) * i / kScan;
        double g = g_at(t);
        if (std::abs(g) < eps_g) return t;  // node-level hit
        if (g_lo * g < 0.0) {
            hi = t;
            found = true;
            break;
        }
        lo = t;
        g_lo = g;
    }
    if (!found) throw NoSignChange("locate_event: no sign change in bracket");

    for (int it = 0; it < 200 && hi - lo > eps_t; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // cannot split further in floating point
        double gm = g_at(mid);
        if (g_lo * gm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            g_lo = gm;
        }
    }
    if (hi - lo > std::max(eps_t, 4.0 * time_tol(hi)) * 1.0001 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)))
        throw StepUnderflow("locate_event: bracket did not collapse to eps_t");
    return 0.5 * (lo + hi);
}

Vec apply_reset(const ResetSystemSpec& spec, double t_event, const Vec& pre) {
    return spec.reset_map(t_event, pre);
}

namespace {

struct RK4Out {
    Vec x;
    Vec k1;
};

RK4Out rk4_step(const ResetSystemSpec& spec, const HistoryFunction& hist, double t, const Vec& x,
                double t_next) {
    const double dt = t_next - t;
    const int n = spec.dim;
    auto f = [&](double tau, const Vec& xx) {
        return spec.flow(tau, xx, hist.evaluate(tau - spec.h));
    };
    Vec k1 = f(t, x);
    Vec tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    Vec k2 = f(t + 0.5 * dt, tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    Vec k3 = f(t + 0.5 * dt, tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    Vec k4 = f(t_next, tmp);
    RK4Out out;
    out.x.resize(n);
    for (int i = 0; i < n; ++i)
        out.x[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.k1 = std::move(k1);
    return out;
}

// Next method-of-steps alignment time strictly after t: recorded jump
// times (and the initial instant) aged by h.
double next_alignment(const ResetSystemSpec& spec, const HistoryFunction& hist, double t) {
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double src) {
        double al = src + spec.h;
        if (al > t + time_tol(t)) best = std::min(best, al);
    };
    consider(spec.t0);
    for (double j : hist.jump_times()) consider(j);
    return best;
}

}  // namespace

SegmentRun integrate_segment(const ResetSystemSpec& spec, HistoryFunction& hist, double t_start,
                             const Vec& x_start, double t_stop, const IntegratorConfig& cfg,
                             double blackout_until, bool first_is_jump) {
    const double eps_t = cfg.eps_t > 0.0 ? cfg.eps_t : 1e-10 * spec.h;
    double t = t_start;
    Vec x = x_start;
    Vec dx = spec.flow(t, x, hist.evaluate(t - spec.h));
    double g_prev = spec.surface(x);
    bool pending_jump = first_is_jump;
    int conv_countdown = 0;

    while (t < t_stop - time_tol(t_stop)) {
        double t_next = std::min(t + cfg.dt, t_stop);
        double t_align = next_alignment(spec, hist, t);
        if (t_align < t_next - time_tol(t_next)) t_next = t_align;
        if (t_next - t < 4.0 * time_tol(t)) t_next = t + 4.0 * time_tol(t);

        RK4Out step = rk4_step(spec, hist, t, x, t_next);
        if (norm2(step.x) > cfg.blowup_guard)
            throw StateBlowup("integrate_segment: state norm exceeded overflow guard");
        Vec dx_next = spec.flow(t_next, step.x, hist.evaluate(t_next - spec.h));
        double g_next = spec.surface(step.x);
        const double eps_g = cfg.eps_g_rel * (1.0 + norm2(step.x));

        bool sign_change = g_prev * g_next < 0.0;
        // the origin is an equilibrium of both flow and reset map; a surface
        // hit there is vacuous and would otherwise retrigger every delta
        bool node_hit = std::abs(g_next) < eps_g && norm2(step.x) > 0.0;
        if (sign_change || node_hit) {
            HistNode na{t, x, dx};
            HistNode nb{t_next, step.x, dx_next};
            double t_ev = sign_change ? locate_event(spec, na, nb, eps_t, eps_g) : t_next;
            if (t_ev > blackout_until + time_tol(t_ev)) {
                if (t_ev <= t + time_tol(t)) t_ev = t + std::max(eps_t, 4.0 * time_tol(t));
                Vec x_ev;
                Vec dx_ev;
                if (t_ev < t_next - 0.5 * eps_t) {
                    // the interpolant state is what the root was refined on;
                    // recording it keeps |g(pre)| within the surface tolerance
                    x_ev = hermite_eval(na, nb, t_ev);
                } else {
                    t_ev = t_next;
                    x_ev = step.x;
                }
                dx_ev = spec.flow(t_ev, x_ev, hist.evaluate(t_ev - spec.h));
                hist.push_segment({na, HistNode{t_ev, x_ev, dx_ev}}, pending_jump);
                return SegmentRun{StopCause::Event, t_ev, x_ev};
            }
        }

        hist.push_segment({HistNode{t, x, dx}, HistNode{t_next, step.x, dx_next}}, pending_jump);
        pending_jump = false;
        t = t_next;
        x = step.x;
        dx = std::move(dx_next);
        g_prev = g_next;

        if (cfg.eps_conv > 0.0 && norm2(x) < cfg.eps_conv && t - spec.h > hist.earliest()) {
            if (--conv_countdown <= 0) {
                conv_countdown = 16;  // sup-norm scan is not free; check sparsely
                if (hist.sup_norm(t - spec.h, t) < cfg.eps_conv)
                    return SegmentRun{StopCause::Converged, t, x};
            }
        }
    }
    return SegmentRun{StopCause::ReachedStop, t, x};
}

Trajectory simulate(const ResetSystemSpec& spec, const InitialCondition& phi,
                    const IntegratorConfig& cfg) {
    if (spec.dim <= 0 || spec.h <= 0.0) throw InvalidConfig("simulate: bad system dimensions");
    if (phi.dim != spec.dim) throw InvalidConfig("simulate: initial condition dimension");
    if (cfg.dt <= 0.0 || cfg.dt > spec.h / 10.0 * (1.0 + 1e-9))
        throw InvalidConfig("simulate: step must satisfy 0 < dt <= h/10");
    if (spec.delta <= 0.0) throw InvalidConfig("simulate: time regularization delta must be > 0");
    const double eps_t = cfg.eps_t > 0.0 ? cfg.eps_t : 1e-10 * spec.h;
    if (eps_t >= spec.delta) throw InvalidConfig("simulate: eps_t must be below delta");
    if (cfg.horizon <= spec.t0) throw InvalidConfig("simulate: horizon before initial time");

    // zero-solution assumption, probed at a few instants
    Vec zero(spec.dim, 0.0);
    for (double tp : {spec.t0, spec.t0 + 0.37 * spec.h, spec.t0 + spec.h}) {
        if (norm2(spec.flow(tp, zero, zero)) > 1e-9 || norm2(spec.reset_map(tp, zero)) > 1e-9)
            throw InvalidConfig("simulate: flow/reset must vanish at the origin");
    }

    Trajectory traj;
    traj.dim = spec.dim;
    traj.h = spec.h;
    traj.t0 = spec.t0;
    traj.archive = HistoryFunction::from_initial(phi, spec.h, spec.t0, cfg.dt);

    double t = spec.t0;
    Vec x = traj.archive.evaluate(spec.t0);
    double last_reset = spec.t0;  // blackout anchored at t0: t0 is never a reset instant
    bool first_is_jump = false;
    int k = 1;

    while (t < cfg.horizon - time_tol(cfg.horizon)) {
        SegmentRun run = integrate_segment(spec, traj.archive, t, x, cfg.horizon, cfg,
                                           last_reset + spec.delta, first_is_jump);
        first_is_jump = false;
        t = run.t_end;
        x = run.x_end;
        if (run.cause == StopCause::Event) {
            Vec post = apply_reset(spec, t, x);
            traj.resets.push_back(ResetRecord{k++, t, x, post});
            last_reset = t;
            x = post;
            first_is_jump = true;
            continue;
        }
        if (run.cause == StopCause::Converged) {
            traj.reason = Termination::Converged;
            traj.t_end = t;
            return traj;
        }
        break;
    }
    traj.reason = Termination::Horizon;
    traj.t_end = t;
    return traj;
}

}  // namespace rds
