#include "rds/scenarios.hpp"

#include <cmath>

namespace rds {

Scenario example_41(double a1, double a2, double a3, Vec C) {
    Scenario sc;
    sc.name = "4.1";
    sc.description = "LTI base system with one delay, partial state reset";
    LTIResetSpec lti;
    lti.A = Mat(2, 2, {-2.0, 0.0, 0.0, -0.9});
    lti.Ad = Mat(2, 2, {-1.0, 1.0, -1.0, -0.5});
    lti.Ar = Mat(2, 2, {a1, 0.0, a2, a3});
    lti.C = std::move(C);
    lti.h = 1.0;
    lti.validate();

    sc.cfg = IntegratorConfig::defaults(lti.h, 20.0);
    const double delta_reg = 10.0 * sc.cfg.dt;
    sc.system = make_lti_system(lti.A, lti.Ad, lti.Ar, lti.C, lti.h, delta_reg);
    sc.lti = std::move(lti);
    sc.phi = InitialCondition::constant({1.0, 1.0});
    sc.expected = "decay";
    return sc;
}

Scenario example_42(double delta) {
    if (delta <= 0.51) throw DeltaTooSmall("example_42: coefficient bounds need delta > 0.51");
    Scenario sc;
    sc.name = "4.2";
    sc.description = "nonlinear time-varying base system, x2 zeroed on reset";
    const double h = 1.0;

    ResetSystemSpec sys;
    sys.dim = 2;
    sys.h = h;
    sys.t0 = 0.0;
    sys.flow = [delta](double t, const Vec& x, const Vec& xd) {
        const double a1 = 50.0 * std::exp(-t) - 100.0 * delta;
        const double b1 = 0.5 * delta * std::sin(t);
        const double c1 = 0.25 * delta;
        const double a2 = -std::exp(-t) - delta;
        const double b2 = -0.5 * delta;
        const double c2 = 0.25 * delta * std::sin(t);
        const double x1c = x[0] * x[0] * x[0];
        const double x1dc = xd[0] * xd[0] * xd[0];
        return Vec{a1 * x1c + b1 * x1dc + c1 * x[1], a2 * x[1] + b2 * xd[1] + c2 * x1c};
    };
    sys.reset_map = [](double, const Vec& x) { return Vec{x[0], 0.0}; };
    sys.surface = [](const Vec& x) { return -5.0 * x[0] + x[1]; };

    sc.cfg = IntegratorConfig::defaults(h, 15.0);
    sys.delta = 10.0 * sc.cfg.dt;
    sc.system = std::move(sys);

    const double c = 1.0 / (2.0 * std::sqrt(5.0));
    sc.phi = InitialCondition::constant({c, -c});
    sc.functional = make_example42_functional(delta, h);
    sc.expected = "decay";
    return sc;
}

std::vector<std::string> scenario_names() { return {"4.1", "4.2"}; }

Scenario scenario_by_name(const std::string& name) {
    if (name == "4.1") return example_41();
    if (name == "4.2") return example_42();
    throw InvalidConfig("unknown example: " + name);
}

}  // namespace rds
