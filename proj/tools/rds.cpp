#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rds/io.hpp"

namespace fs = std::filesystem;
using namespace rds;

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitNoFunctional = 4;

struct CommonOpts {
    std::string example;
    std::string config_path;
    std::string out_dir = ".";
    double horizon = -1.0;
    double step = -1.0;
    double delta = -1.0;
    unsigned seed = 0;
    double margin = 1e-6;
    int budget = 5000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--example", o.example, "built-in example id (4.1 or 4.2)");
    cmd->add_option("--config", o.config_path, "scenario config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--horizon", o.horizon, "simulation end time (s)");
    cmd->add_option("--step", o.step, "integrator step (s)");
    cmd->add_option("--delta", o.delta, "time regularization (s)");
    cmd->add_option("--seed", o.seed, "seed for certificate search restarts");
    cmd->add_option("--margin", o.margin, "strictness margin for the flow LMI");
    cmd->add_option("--budget", o.budget, "certificate search iteration budget");
}

LoadedConfig load(const CommonOpts& o) {
    LoadedConfig lc;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw InvalidConfig("cannot open config file: " + o.config_path);
        lc = scenario_from_config(ConfigFile::parse(in));
    } else if (!o.example.empty()) {
        lc.scenario = scenario_by_name(o.example);
    } else {
        throw InvalidConfig("need --example or --config");
    }
    if (o.horizon > 0.0) lc.scenario.cfg.horizon = o.horizon;
    if (o.step > 0.0) lc.scenario.cfg.dt = o.step;
    if (o.delta > 0.0) lc.scenario.system.delta = o.delta;
    fs::create_directories(o.out_dir);
    return lc;
}

std::ofstream open_out(const CommonOpts& o, const std::string& name) {
    fs::path p = fs::path(o.out_dir) / name;
    std::ofstream f(p);
    if (!f) throw InvalidConfig("cannot write " + p.string());
    return f;
}

const char* reason_name(Termination r) {
    return r == Termination::Horizon ? "horizon" : "converged";
}

int cmd_simulate(const CommonOpts& o) {
    LoadedConfig lc = load(o);
    Trajectory traj = simulate(lc.scenario.system, lc.scenario.phi, lc.scenario.cfg);
    {
        auto f = open_out(o, "trajectory.csv");
        write_trajectory_csv(f, traj);
    }
    {
        auto f = open_out(o, "resets.csv");
        write_resets_csv(f, traj);
    }
    std::cout << "RESULT: resets=" << traj.resets.size() << " terminal_time=" << traj.t_end
              << " reason=" << reason_name(traj.reason) << "\n";
    return 0;
}

// Functional selection order: scenario-attached, then user-supplied (P, Q),
// then a certificate found by search.
LKFunctional pick_functional(const LoadedConfig& lc, const CommonOpts& o) {
    if (lc.scenario.functional) return *lc.scenario.functional;
    if (!lc.scenario.lti) throw std::runtime_error("no functional available");
    const LTIResetSpec& lti = *lc.scenario.lti;
    if (lc.P && lc.Q) {
        LKFunctional fn = make_quadratic_functional(*lc.P, *lc.Q, lti.h);
        fn.u = [uc = lambda_min(*lc.P)](double s) { return uc * s * s; };
        SymMatrix M = build_flow_lmi(lti, *lc.P, *lc.Q);
        double lmax = lambda_max(M);
        if (lmax < 0.0) fn.w = [wc = -lmax](double s) { return wc * s * s; };
        fn.v = [vc = lambda_max(*lc.P) + lti.h * lambda_max(*lc.Q)](double s) { return vc * s * s; };
        Mat inner = transpose(lti.Ar) * lc.P->m * lti.Ar - lc.P->m;
        fn.jump_increment = [inner](double, const Vec& pre) {
            return dot(pre, mat_vec(inner, pre));
        };
        return fn;
    }
    SearchResult sr = search(lti, o.margin, o.budget, o.seed);
    if (!sr.feasible)
        throw std::runtime_error("no functional available: certificate search infeasible");
    return certificate_to_functional(*sr.certificate, lti);
}

int cmd_monitor(const CommonOpts& o) {
    LoadedConfig lc = load(o);
    LKFunctional fn;
    try {
        fn = pick_functional(lc, o);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoFunctional;
    }
    Trajectory traj = simulate(lc.scenario.system, lc.scenario.phi, lc.scenario.cfg);
    MonitorReport rep = monitor(traj, fn, 5.0 * lc.scenario.cfg.dt);
    {
        auto f = open_out(o, "functional.csv");
        write_functional_csv(f, rep);
    }
    {
        auto f = open_out(o, "monitor_report.txt");
        f << "functional: " << fn.name << "\n" << report_summary(rep);
    }
    std::cout << "RESULT: violations=" << rep.violations.size() << " jumps=" << rep.jumps.size()
              << " samples=" << rep.samples.size() << "\n";
    return 0;
}

int cmd_certify(const CommonOpts& o) {
    LoadedConfig lc = load(o);
    if (!lc.scenario.lti) {
        std::cerr << "error: certify requires an LTI-base scenario\n";
        return kExitConfigError;
    }
    const LTIResetSpec& lti = *lc.scenario.lti;

    if (lc.P && lc.Q) {
        CertificateVerdict v = verify(lti, *lc.P, *lc.Q, o.margin);
        if (v.pass) {
            auto f = open_out(o, "certificate.txt");
            write_certificate(f, *v.certificate);
            std::cout << "RESULT: feasible flow_margin=" << v.certificate->flow_margin
                      << " jump_margin=" << v.certificate->jump_margin << "\n";
            return 0;
        }
        std::cout << "RESULT: infeasible failed=" << v.failed_condition
                  << " lambda_flow=" << v.lambda_flow << " lambda_jump=" << v.lambda_jump << "\n";
        return kExitInfeasible;
    }

    SearchResult sr = search(lti, o.margin, o.budget, o.seed);
    if (sr.feasible) {
        auto f = open_out(o, "certificate.txt");
        write_certificate(f, *sr.certificate);
        std::cout << "RESULT: feasible flow_margin=" << sr.certificate->flow_margin
                  << " jump_margin=" << sr.certificate->jump_margin
                  << " iterations=" << sr.iterations << "\n";
        return 0;
    }
    std::cout << "RESULT: infeasible blocking=" << sr.blocking_condition
              << " best_objective=" << sr.best_objective << " iterations=" << sr.iterations
              << "\n";
    return kExitInfeasible;
}

int cmd_list() {
    for (const auto& name : scenario_names()) {
        Scenario sc = scenario_by_name(name);
        std::cout << name << "  " << sc.description << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-delay reset system simulator, monitor, and certifier"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* sim = app.add_subcommand("simulate", "integrate a scenario and write trajectory CSVs");
    add_common(sim, opts);
    auto* mon = app.add_subcommand("monitor", "check a Lyapunov-Krasovskii functional along a run");
    add_common(mon, opts);
    auto* cert = app.add_subcommand("certify", "find or verify a stability certificate");
    add_common(cert, opts);
    app.add_subcommand("list-examples", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(opts);
        if (mon->parsed()) return cmd_monitor(opts);
        if (cert->parsed()) return cmd_certify(opts);
        return cmd_list();
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DeltaTooSmall& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DimensionMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolverError;
    }
}
