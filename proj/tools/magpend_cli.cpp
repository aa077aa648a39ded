// Command-line harness; talks to the toolkit exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "magpend/magpend.h"

namespace {

struct CommonOpts {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "config file ([section] key = value)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out, "output directory");
}

int fail(magpend_status st) {
    std::fprintf(stderr, "error (%d): %s\n", static_cast<int>(st), magpend_last_error());
    return 1;
}

magpend_status load_config(const CommonOpts& o, magpend_config** cfg) {
    return o.config.empty() ? magpend_config_default(cfg)
                            : magpend_config_load(o.config.c_str(), cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magpend: magnetically actuated 3D inverted pendulum toolkit"};
    app.require_subcommand(1);

    CommonOpts balance_o, sysid_o, ilc_o, ss_o;
    auto* balance = app.add_subcommand("balance", "stabilization run, writes trace.csv");
    add_common(balance, balance_o);
    auto* sysid = app.add_subcommand("sysid", "frequency-domain identification of the actuator");
    add_common(sysid, sysid_o);
    auto* ilc = app.add_subcommand("ilc", "iterative learning session on a periodic trajectory");
    add_common(ilc, ilc_o);
    auto* ss = app.add_subcommand("steady-state", "print steady-state disturbance maps");
    add_common(ss, ss_o);

    CLI11_PARSE(app, argc, argv);

    magpend_config* cfg = nullptr;
    magpend_status st = MAGPEND_OK;
    if (balance->parsed()) {
        if ((st = load_config(balance_o, &cfg)) != MAGPEND_OK) return fail(st);
        st = magpend_run_balance(cfg, balance_o.seed, balance_o.out.c_str());
    } else if (sysid->parsed()) {
        if ((st = load_config(sysid_o, &cfg)) != MAGPEND_OK) return fail(st);
        st = magpend_run_sysid(cfg, sysid_o.seed, sysid_o.out.c_str());
    } else if (ilc->parsed()) {
        if ((st = load_config(ilc_o, &cfg)) != MAGPEND_OK) return fail(st);
        st = magpend_run_ilc(cfg, ilc_o.seed, ilc_o.out.c_str());
    } else if (ss->parsed()) {
        if ((st = load_config(ss_o, &cfg)) != MAGPEND_OK) return fail(st);
        char buf[2048];
        st = magpend_steady_state_report(cfg, ss_o.out.c_str(), buf, sizeof(buf));
        if (st == MAGPEND_OK) std::fputs(buf, stdout);
    }

    magpend_config_free(cfg);
    if (st != MAGPEND_OK) return fail(st);
    return 0;
}
