#include "magpend/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace magpend {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile f;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            f.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        f.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return f;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config value [" + section + "] " + key +
                                    " is not a number: " + v);
    return x;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    return static_cast<int>(std::stol(get_string(section, key, "")));
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config value [" + section + "] " + key +
                                " is not a boolean: " + v);
}

AppConfig app_config_defaults() { return AppConfig{}; }

PlantParams plant_from_config(const ConfigFile& f) {
    PlantParams p;
    p.M = f.get_double("plant", "M", p.M);
    p.m = f.get_double("plant", "m", p.m);
    p.m_j = f.get_double("plant", "m_j", p.m_j);
    p.m_m = f.get_double("plant", "m_m", p.m_m);
    p.L = f.get_double("plant", "L", p.L);
    p.l = f.get_double("plant", "l", p.l);
    p.l_m = f.get_double("plant", "l_m", p.l_m);
    p.d = f.get_double("plant", "d", p.d);
    p.m_dip = f.get_double("plant", "m_dip", p.m_dip);
    p.b_mag = f.get_double("plant", "b_mag", p.b_mag);
    p.g = f.get_double("plant", "g", p.g);
    p.validate();
    return p;
}

std::string serialize_plant(const PlantParams& p) {
    std::ostringstream os;
    os.precision(17);
    os << "[plant]\n"
       << "M = " << p.M << "\nm = " << p.m << "\nm_j = " << p.m_j << "\nm_m = " << p.m_m
       << "\nL = " << p.L << "\nl = " << p.l << "\nl_m = " << p.l_m << "\nd = " << p.d
       << "\nm_dip = " << p.m_dip << "\nb_mag = " << p.b_mag << "\ng = " << p.g << "\n";
    return os.str();
}

AppConfig app_config_from(const ConfigFile& f) {
    AppConfig c;
    c.sim.plant = plant_from_config(f);

    c.sim.Ts = f.get_double("control", "Ts", c.sim.Ts);
    c.weights.Rw = f.get_double("control", "rw", c.weights.Rw);
    Eigen::Vector4d qd(f.get_double("control", "q_alpha", 10.0),
                       f.get_double("control", "q_phi", 100.0),
                       f.get_double("control", "q_alpha_dot", 1.0),
                       f.get_double("control", "q_phi_dot", 1.0));
    c.weights.Qw = qd.asDiagonal();

    c.sim.dt = f.get_double("sim", "dt", c.sim.dt);
    c.sim.delay_steps = f.get_int("sim", "delay_steps", c.sim.delay_steps);
    c.sim.noise_std = f.get_double("sim", "noise_std", c.sim.noise_std);
    c.sim.xi = f.get_double("sim", "xi", c.sim.xi);
    c.sim.u_d = f.get_double("sim", "u_d", c.sim.u_d);
    c.sim.c1 = f.get_double("sim", "c1", c.sim.c1);
    c.sim.c2 = f.get_double("sim", "c2", c.sim.c2);
    c.sim.duration = f.get_double("sim", "duration", c.sim.duration);
    c.sim.init_a.a = f.get_double("sim", "init_alpha", 0.0);
    c.sim.init_a.p = f.get_double("sim", "init_phi", 0.0);
    c.sim.init_b.a = f.get_double("sim", "init_beta", 0.0);
    c.sim.init_b.p = f.get_double("sim", "init_theta", 0.0);

    c.sim.compensation = f.get_bool("compensation", "enabled", c.sim.compensation);
    c.sim.comp_cutoff_hz = f.get_double("compensation", "cutoff_hz", c.sim.comp_cutoff_hz);
    c.sim.comp_gate = f.get_double("compensation", "gate_rate", c.sim.comp_gate);

    c.multisine.f_min = f.get_double("sysid", "f_min", c.multisine.f_min);
    c.multisine.f_max = f.get_double("sysid", "f_max", c.multisine.f_max);
    c.multisine.fs = f.get_double("sysid", "fs", c.multisine.fs);
    c.multisine.N = f.get_int("sysid", "N", c.multisine.N);
    c.multisine.r = f.get_int("sysid", "r", c.multisine.r);
    c.multisine.p_total = f.get_int("sysid", "p_total", c.multisine.p_total);
    c.multisine.p_discard = f.get_int("sysid", "p_discard", c.multisine.p_discard);
    c.multisine.amp = f.get_double("sysid", "amp", c.multisine.amp);

    c.ilc_w_e = f.get_double("ilc", "w_e", c.ilc_w_e);
    c.ilc_w_du = f.get_double("ilc", "w_du", c.ilc_w_du);
    c.ilc_iterations = f.get_int("ilc", "iterations", c.ilc_iterations);

    c.traj_kind = trajectory_kind_from_string(f.get_string("trajectory", "kind", "circle"));
    c.traj_amplitude =
        f.get_double("trajectory", "amplitude_deg", c.traj_amplitude * 180.0 / M_PI) * M_PI /
        180.0;
    c.traj_period = f.get_double("trajectory", "period", c.traj_period);

    c.actuation_matrix_path = f.get_string("field", "actuation_matrix", "");
    return c;
}

AppConfig app_config_from_file(const std::string& path) {
    return app_config_from(ConfigFile::parse_file(path));
}

}  // namespace magpend
