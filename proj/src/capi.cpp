#include "magpend/magpend.h"

#include <cstring>
#include <string>

#include "magpend/config.hpp"
#include "magpend/runner.hpp"
#include "magpend/sim.hpp"

struct magpend_config {
    magpend::ConfigFile file;   // raw key/value view, kept for magpend_config_set
    magpend::AppConfig resolved;
};

namespace {

thread_local std::string g_last_error = "no error";

template <typename Fn>
magpend_status guarded(Fn&& fn) {
    try {
        fn();
        return MAGPEND_OK;
    } catch (const magpend::DivergenceError& e) {
        g_last_error = e.what();
        return MAGPEND_ERR_DIVERGED;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return MAGPEND_ERR_INVALID_ARGUMENT;
    } catch (const std::ios_base::failure& e) {
        g_last_error = e.what();
        return MAGPEND_ERR_IO;
    } catch (const std::runtime_error& e) {
        g_last_error = e.what();
        const std::string msg = e.what();
        if (msg.find("open") != std::string::npos || msg.find("write") != std::string::npos)
            return MAGPEND_ERR_IO;
        return MAGPEND_ERR_NUMERICAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MAGPEND_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MAGPEND_ERR_INTERNAL;
    }
}

magpend_status require(bool cond, const char* msg) {
    if (cond) return MAGPEND_OK;
    g_last_error = msg;
    return MAGPEND_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* magpend_version(void) { return "1.0.0"; }

const char* magpend_last_error(void) { return g_last_error.c_str(); }

magpend_status magpend_config_default(magpend_config** out) {
    if (require(out != nullptr, "out must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new magpend_config{magpend::ConfigFile{}, magpend::app_config_defaults()};
    });
}

magpend_status magpend_config_load(const char* path, magpend_config** out) {
    if (require(path != nullptr && out != nullptr, "path and out must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto file = magpend::ConfigFile::parse_file(path);
        auto resolved = magpend::app_config_from(file);
        *out = new magpend_config{std::move(file), std::move(resolved)};
    });
}

magpend_status magpend_config_set(magpend_config* cfg, const char* section, const char* key,
                                  const char* value) {
    if (require(cfg && section && key && value, "all arguments must be non-NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        magpend::ConfigFile trial = cfg->file;
        trial.sections[section][key] = value;
        cfg->resolved = magpend::app_config_from(trial);  // validate before committing
        cfg->file = std::move(trial);
    });
}

void magpend_config_free(magpend_config* cfg) { delete cfg; }

magpend_status magpend_run_balance(const magpend_config* cfg, uint64_t seed,
                                   const char* out_dir) {
    if (require(cfg && out_dir, "cfg and out_dir must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] { magpend::run_balance(cfg->resolved, seed, out_dir); });
}

magpend_status magpend_run_sysid(const magpend_config* cfg, uint64_t seed, const char* out_dir) {
    if (require(cfg && out_dir, "cfg and out_dir must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] { magpend::run_sysid(cfg->resolved, seed, out_dir); });
}

magpend_status magpend_run_ilc(const magpend_config* cfg, uint64_t seed, const char* out_dir) {
    if (require(cfg && out_dir, "cfg and out_dir must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] { magpend::run_ilc(cfg->resolved, seed, out_dir); });
}

magpend_status magpend_steady_state_report(const magpend_config* cfg, const char* out_dir,
                                           char* buf, size_t buf_len) {
    if (require(cfg != nullptr, "cfg must not be NULL") != MAGPEND_OK)
        return MAGPEND_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const std::string report =
            magpend::steady_state_report(cfg->resolved, out_dir ? out_dir : "");
        if (buf && buf_len > 0) {
            const size_t n = std::min(buf_len - 1, report.size());
            std::memcpy(buf, report.data(), n);
            buf[n] = '\0';
        }
    });
}

}  // extern "C"
