#pragma once

#include <map>
#include <string>

#include "magpend/sim.hpp"

namespace magpend {

// Minimal "[section] key = value" config file support. '#' and ';' start
// comments; keys outside any section live in the "" section.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse(const std::string& text);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
};

// Everything the CLI subcommands need, resolved against defaults.
struct AppConfig {
    SimConfig sim;
    LqrWeights weights;
    MultisineConfig multisine;
    double ilc_w_e = 100.0;
    double ilc_w_du = 10.0;
    int ilc_iterations = 4;
    TrajectoryKind traj_kind = TrajectoryKind::circle;
    double traj_amplitude = 5.0 * M_PI / 180.0;  // rad
    double traj_period = 10.0;                   // s
    std::string actuation_matrix_path;           // empty = synthetic
};

AppConfig app_config_defaults();
AppConfig app_config_from(const ConfigFile& f);
AppConfig app_config_from_file(const std::string& path);

// Round-trips PlantParams through the [plant] section.
std::string serialize_plant(const PlantParams& p);
PlantParams plant_from_config(const ConfigFile& f);

}  // namespace magpend
