#include "rds/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rds {

namespace {

void emit_row(std::ostream& os, double t, const Vec& x, int id) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    os << buf;
    for (double v : x) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        os << buf;
    }
    os << ',' << id << '\n';
}

bool is_jump_time(const HistoryFunction& hist, double t) {
    for (double j : hist.jump_times())
        if (std::abs(j - t) <= 1e-12 * std::max(1.0, std::abs(t))) return true;
    return false;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int i = 1; i <= traj.dim; ++i) os << ",x" << i;
    os << ",segment_id\n";

    const auto& segs = traj.archive.segments();
    int id = 0;
    bool first = true;
    for (const auto& seg : segs) {
        if (first) {
            emit_row(os, seg.t_begin(), seg.nodes.front().x, id);
            first = false;
        } else if (seg.t_begin() >= traj.t0 && is_jump_time(traj.archive, seg.t_begin())) {
            ++id;  // pre row was the previous segment's closing node
            emit_row(os, seg.t_begin(), seg.nodes.front().x, id);
        }
        for (size_t i = 1; i < seg.nodes.size(); ++i)
            emit_row(os, seg.nodes[i].t, seg.nodes[i].x, id);
    }
}

void write_resets_csv(std::ostream& os, const Trajectory& traj) {
    os << "k,t_k";
    for (int i = 1; i <= traj.dim; ++i) os << ",pre" << i;
    for (int i = 1; i <= traj.dim; ++i) os << ",post" << i;
    os << "\n";
    char buf[64];
    for (const auto& r : traj.resets) {
        os << r.k;
        std::snprintf(buf, sizeof(buf), ",%.17g", r.t);
        os << buf;
        for (double v : r.pre) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        for (double v : r.post) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        os << '\n';
    }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is) {
    std::vector<TrajectoryRow> rows;
    std::string line;
    if (!std::getline(is, line)) return rows;  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        TrajectoryRow row;
        ss >> row.t;
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (vals.empty()) continue;
        row.segment_id = static_cast<int>(vals.back());
        vals.pop_back();
        row.x = vals;
        rows.push_back(std::move(row));
    }
    return rows;
}

ConfigFile ConfigFile::parse(std::istream& is) {
    ConfigFile cf;
    std::string section;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            auto close = line.find(']');
            if (close == std::string::npos) throw InvalidConfig("config: unterminated section");
            section = trim(line.substr(1, close - 1));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidConfig("config: expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        cf.sections[section][key] = val;
    }
    return cf;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    return it != sections.end() && it->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    if (it == sections.end() || !it->second.count(key))
        throw InvalidConfig("config: missing key '" + key + "'");
    return it->second.at(key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    std::istringstream ss(get_string(section, key));
    double v;
    if (!(ss >> v)) throw InvalidConfig("config: key '" + key + "' is not a number");
    return v;
}

Vec ConfigFile::get_vec(const std::string& section, const std::string& key) const {
    std::istringstream ss(get_string(section, key));
    Vec vals;
    double v;
    while (ss >> v) vals.push_back(v);
    return vals;
}

namespace {

Mat square_from_vec(const Vec& vals, const std::string& key) {
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(vals.size()))));
    if (static_cast<size_t>(n) * n != vals.size())
        throw InvalidConfig("config: '" + key + "' is not a square matrix");
    Mat m(n, n);
    m.a = vals;
    return m;
}

}  // namespace

LoadedConfig scenario_from_config(const ConfigFile& cf) {
    LoadedConfig out;
    bool have_base = false;

    if (cf.has("", "example")) {
        out.scenario = scenario_by_name(cf.get_string("", "example"));
        have_base = true;
        if (cf.has("example42", "delta"))
            out.scenario = example_42(cf.get_double("example42", "delta"));
    }

    if (cf.sections.count("lti")) {
        LTIResetSpec lti;
        if (have_base && out.scenario.lti) lti = *out.scenario.lti;
        auto grab = [&](const char* key, Mat& dst) {
            if (cf.has("lti", key)) dst = square_from_vec(cf.get_vec("lti", key), key);
        };
        grab("A", lti.A);
        grab("Ad", lti.Ad);
        grab("Ar", lti.Ar);
        if (cf.has("lti", "C")) lti.C = cf.get_vec("lti", "C");
        if (cf.has("lti", "h")) lti.h = cf.get_double("lti", "h");
        lti.validate();

        if (!have_base) {
            out.scenario.name = cf.has("", "name") ? cf.get_string("", "name") : "config";
            out.scenario.cfg = IntegratorConfig::defaults(lti.h, 20.0);
            out.scenario.phi = InitialCondition::constant(Vec(lti.dim(), 1.0));
            out.scenario.expected = "unspecified";
        }
        double delta_reg = 10.0 * out.scenario.cfg.dt;
        if (out.scenario.system.delta > 0.0) delta_reg = out.scenario.system.delta;
        out.scenario.system = make_lti_system(lti.A, lti.Ad, lti.Ar, lti.C, lti.h, delta_reg);
        out.scenario.lti = std::move(lti);
        have_base = true;
    }

    if (!have_base) throw InvalidConfig("config: needs 'example = <id>' or an [lti] section");

    if (cf.has("phi", "constant")) {
        Vec c = cf.get_vec("phi", "constant");
        if (static_cast<int>(c.size()) != out.scenario.system.dim)
            throw InvalidConfig("config: phi dimension mismatch");
        out.scenario.phi = InitialCondition::constant(c);
    }

    if (cf.has("", "horizon")) out.scenario.cfg.horizon = cf.get_double("", "horizon");
    if (cf.has("", "step")) out.scenario.cfg.dt = cf.get_double("", "step");
    if (cf.has("", "delta")) out.scenario.system.delta = cf.get_double("", "delta");
    if (cf.has("", "eps_conv")) out.scenario.cfg.eps_conv = cf.get_double("", "eps_conv");

    if (cf.has("certificate", "P")) {
        out.P = SymMatrix(square_from_vec(cf.get_vec("certificate", "P"), "P"));
        out.Q = SymMatrix(square_from_vec(cf.get_vec("certificate", "Q"), "Q"));
    }
    return out;
}

}  // namespace rds
