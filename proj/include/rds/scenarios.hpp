#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rds/certify.hpp"
#include "rds/dde.hpp"
#include "rds/functional.hpp"

namespace rds {

struct DeltaTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string name;
    std::string description;
    ResetSystemSpec system;
    std::optional<LTIResetSpec> lti;  // set when the base system is LTI
    InitialCondition phi;
    IntegratorConfig cfg;
    std::optional<LKFunctional> functional;
    std::string expected;  // qualitative outcome tag
};

// Two-state LTI reset system: A = [[-2, 0], [0, -0.9]],
// Ad = [[-1, 1], [-1, -0.5]], Ar = [[a1, 0], [a2, a3]], h = 1.
// Shipped defaults (1, 0, 0) with C = (-2, 1) and phi = (1, 1).
Scenario example_41(double a1 = 1.0, double a2 = 0.0, double a3 = 0.0, Vec C = {-2.0, 1.0});

// Nonlinear time-varying two-state reset system with cubic coupling,
// reset x2 -> 0 on the surface -5 x1 + x2 = 0, h = 1, t0 = 0, and the
// quartic-plus-integral functional attached. Requires delta > 0.51.
Scenario example_42(double delta = 0.52);

std::vector<std::string> scenario_names();
Scenario scenario_by_name(const std::string& name);

}  // namespace rds
