#pragma once

#include <cstdint>
#include <string>

#include "magpend/config.hpp"

namespace magpend {

// App-level entry points shared by the C API and the CLI. Each writes its
// CSV outputs into out_dir (created if missing) and returns a short summary.

std::string run_balance(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir);
std::string run_sysid(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir);
std::string run_ilc(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir);

// Closed-form steady-state maps for unit disturbances; also written to
// <out_dir>/steady_state.csv when out_dir is non-empty.
std::string steady_state_report(const AppConfig& cfg, const std::string& out_dir);

}  // namespace magpend
