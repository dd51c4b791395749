#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "rds/dde.hpp"
#include "rds/history.hpp"
#include "rds/linalg.hpp"

namespace rds {

enum class Side { Left, Right };

// Functional V(t, psi) on the distributed state, with optional class-K
// sandwich bounds u, v, flow decrease rate w, and analytic jump increment.
// Conditions are only claimed inside the region ||psi|| < gamma.
struct LKFunctional {
    std::string name;
    int dim = 0;
    double h = 0.0;
    double gamma = std::numeric_limits<double>::infinity();
    std::function<double(double, const HistoryFunction&, Side)> value;
    std::function<double(double)> u;  // lower sandwich bound, class K
    std::function<double(double)> v;  // upper sandwich bound, class K
    std::function<double(double)> w;  // flow decrease rate
    std::function<double(double, const Vec&)> jump_increment;  // (t, pre-state)
};

// Integral of f(theta, x(theta)) over [a, b] along the history, split at
// node and jump times, Gauss-Legendre per subinterval (exact to round-off
// for polynomial integrands of the interpolant up to degree 9).
double integrate_window(const HistoryFunction& hist, double a, double b,
                        const std::function<double(double, const Vec&)>& f);

// psi(0)' P psi(0) + integral of psi' Q psi over the trailing window of
// length h ending at t.
double evaluate_quadratic(const SymMatrix& P, const SymMatrix& Q, const HistoryFunction& hist,
                          double t, double h, Side side = Side::Left);

LKFunctional make_quadratic_functional(const SymMatrix& P, const SymMatrix& Q, double h);

// x1^4/4 + x2^2/2 + (delta/2) * integral of (x1^6 + x2^2).
double evaluate_example42(const HistoryFunction& hist, double t, double h, double delta,
                          Side side = Side::Left);

// Quadratic-form coefficient matrix bounding the derivative of the
// nonlinear functional in xi = (|x1|^3, |x1(t-h)|^3, |x2|, |x2(t-h)|).
SymMatrix example42_bound_matrix(double delta);

LKFunctional make_example42_functional(double delta, double h);

enum class ViolationKind { LowerBound, UpperBound, FlowIncrease, JumpIncrease };

std::string to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    double t;
    double magnitude;
};

struct MonitorSample {
    double t = 0.0;
    double V = 0.0;
    double fd = 0.0;  // forward-difference dV/dt
    bool fd_valid = false;
    double norm_x0 = 0.0;      // ||x(t)||
    double norm_window = 0.0;  // sup ||x|| over [t-h, t]
    bool in_region = false;
};

struct JumpRecord {
    double t = 0.0;
    double v_pre = 0.0;
    double v_post = 0.0;
    double dv = 0.0;
    double analytic = 0.0;
    bool has_analytic = false;
    bool analytic_mismatch = false;
};

struct MonitorReport {
    std::vector<MonitorSample> samples;
    std::vector<JumpRecord> jumps;
    std::vector<Violation> violations;
    double max_flow_derivative = -std::numeric_limits<double>::infinity();
    int out_of_region_count = 0;

    bool clean() const { return violations.empty(); }
};

// Samples V along the trajectory on a grid avoiding reset instants,
// checks flow decrease, jump non-increase and (when bounds are present)
// the sandwich condition. Findings are report entries, never errors.
MonitorReport monitor(const Trajectory& traj, const LKFunctional& fn, double sample_step);

// Sandwich check at explicit sample times; absolute slack 1e-9.
std::vector<Violation> check_sandwich(const LKFunctional& fn, const HistoryFunction& hist,
                                      const std::vector<double>& times);

void write_functional_csv(std::ostream& os, const MonitorReport& report);
std::string report_summary(const MonitorReport& report);

}  // namespace rds
