#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rds/history.hpp"
#include "rds/linalg.hpp"

namespace rds {

struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StateBlowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flow f(t, x(t), x(t-h)), reset map I(t, x), surface g with reset set
// {x : g(x) = 0}, and time regularization: consecutive resets are
// separated by more than delta.
struct ResetSystemSpec {
    int dim = 0;
    double h = 0.0;
    double delta = 0.0;
    double t0 = 0.0;
    std::function<Vec(double, const Vec&, const Vec&)> flow;
    std::function<Vec(double, const Vec&)> reset_map;
    std::function<double(const Vec&)> surface;
};

ResetSystemSpec make_lti_system(const Mat& A, const Mat& Ad, const Mat& Ar, const Vec& C,
                                double h, double delta, double t0 = 0.0);

struct IntegratorConfig {
    double dt = 0.0;
    double horizon = 0.0;
    double eps_g_rel = 1e-9;   // surface tolerance: eps_g_rel * (1 + ||x||)
    double eps_t = 0.0;        // event time tolerance; 0 -> 1e-10 * h
    double eps_conv = 0.0;     // 0 disables convergence termination
    double blowup_guard = 1e12;

    static IntegratorConfig defaults(double h, double horizon);
};

struct ResetRecord {
    int k = 0;
    double t = 0.0;
    Vec pre;
    Vec post;
};

enum class Termination { Horizon, Converged };

struct Trajectory {
    int dim = 0;
    double h = 0.0;
    double t0 = 0.0;
    double t_end = 0.0;
    Termination reason = Termination::Horizon;
    HistoryFunction archive;  // full record from t0 - h, jumps registered
    std::vector<ResetRecord> resets;

    Vec state(double t) const { return archive.evaluate(t); }
    Vec state_right(double t) const { return archive.evaluate_right(t); }
    double min_reset_gap() const;     // includes gap from t0 to first reset
    int segment_index(double t) const;  // 0 before first reset
};

enum class StopCause { ReachedStop, Event, Converged };

struct SegmentRun {
    StopCause cause = StopCause::ReachedStop;
    double t_end = 0.0;
    Vec x_end;
};

// Steps from (t_start, hist end state) to t_stop with classical RK4,
// delayed argument from hist, steps split so that t - h lands exactly on
// recorded jump times. Pushes computed nodes into hist as it goes.
// Stops early (cause Event) when the surface is crossed after
// blackout_until; the final pushed node then lies on the refined event
// time.
SegmentRun integrate_segment(const ResetSystemSpec& spec, HistoryFunction& hist, double t_start,
                             const Vec& x_start, double t_stop, const IntegratorConfig& cfg,
                             double blackout_until, bool first_is_jump = false);

// Earliest root of g along the Hermite interpolant between two nodes,
// refined by scan + bisection to width eps_t.
double locate_event(const ResetSystemSpec& spec, const HistNode& a, const HistNode& b,
                    double eps_t, double eps_g);

Vec apply_reset(const ResetSystemSpec& spec, double t_event, const Vec& pre);

Trajectory simulate(const ResetSystemSpec& spec, const InitialCondition& phi,
                    const IntegratorConfig& cfg);

}  // namespace rds
