#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "rds/scenarios.hpp"

namespace rds {

// trajectory.csv: t,x1,...,xn,segment_id; one row per dense node, two rows
// at each reset (pre, then post with the next segment id). 17 significant
// digits so a round trip is bit-exact.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// resets.csv: k,t_k,pre1..pren,post1..postn
void write_resets_csv(std::ostream& os, const Trajectory& traj);

struct TrajectoryRow {
    double t;
    Vec x;
    int segment_id;
};

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is);

// Key/value config with [section] headers; values are whitespace-separated
// tokens. '#' starts a comment.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse(std::istream& is);
    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    Vec get_vec(const std::string& section, const std::string& key) const;
};

struct LoadedConfig {
    Scenario scenario;
    std::optional<SymMatrix> P;  // optional user-supplied certificate pair
    std::optional<SymMatrix> Q;
};

// Builds a scenario from a config file: either `example = <id>` (optionally
// overridden by an [lti] section) or a fully specified [lti] system, plus
// optional [phi] and [certificate] sections and top-level integrator keys.
LoadedConfig scenario_from_config(const ConfigFile& cf);

}  // namespace rds
