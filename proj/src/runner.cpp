#include "magpend/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magpend/sim.hpp"

namespace magpend {

namespace {

ActuationMatrix actuation_from(const AppConfig& cfg) {
    return cfg.actuation_matrix_path.empty() ? ActuationMatrix::synthetic()
                                             : ActuationMatrix::load_csv(cfg.actuation_matrix_path);
}

std::filesystem::path ensure_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    if (dir.empty()) throw std::invalid_argument("output directory must not be empty");
    std::filesystem::create_directories(dir);
    return dir;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    char buf[32];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << buf << (i + 1 < row.size() ? "," : "\n");
        }
    }
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

}  // namespace

std::string run_balance(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    const auto dir = ensure_dir(out_dir);
    SimConfig sim = cfg.sim;
    sim.seed = seed;

    const LinearModel model = linearized_model(sim.plant, sim.Ts);
    const Controller ctrl = make_controller(model, cfg.weights);
    const auto A = actuation_from(cfg);

    // balance regulates to the origin regardless of the configured trajectory
    const Trajectory traj = generate_trajectory(TrajectoryKind::constant, 0.0, 1.0,
                                                sim.duration, sim.Ts);
    const Trace tr = simulate_closed_loop(sim, ctrl, ctrl, traj, A);
    export_trace(tr, (dir / "trace.csv").string());

    std::ostringstream os;
    os << "balance: " << tr.size() << " steps, final |alpha| = "
       << std::abs(tr.alpha.back()) << " rad, trace.csv written to " << dir.string();
    return os.str();
}

std::string run_sysid(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    const auto dir = ensure_dir(out_dir);
    SimConfig sim = cfg.sim;
    sim.seed = seed;

    const SysidResult res = run_sysid_experiment(sim, cfg.multisine);

    std::vector<std::vector<double>> frf_rows;
    for (std::size_t k = 0; k < res.frf.freqs.size(); ++k)
        frf_rows.push_back({res.frf.freqs[k], res.frf.G_bla[k].real(), res.frf.G_bla[k].imag(),
                            res.frf.sigma_nl[k], res.frf.W[k]});
    write_csv(dir / "frf.csv", {"f_hz", "re_g", "im_g", "sigma_nl", "weight"}, frf_rows);

    write_csv(dir / "sysid_fit.csv",
              {"b0", "a1", "a0", "T", "residual", "d_hat", "m_dip_hat", "consistency_residual"},
              {{res.fit.b0, res.fit.a1, res.fit.a0, res.fit.T, res.fit.residual,
                res.physical.d, res.physical.m_dip, res.physical.consistency_residual}});

    for (std::size_t l = 0; l < res.records.size(); ++l) {
        const auto& rec = res.records[l];
        std::vector<std::vector<double>> rows(rec.time.size());
        for (std::size_t k = 0; k < rec.time.size(); ++k)
            rows[k] = {rec.time[k], rec.input[k], rec.output[k]};
        write_csv(dir / ("sysid_rec_" + std::to_string(l) + ".csv"),
                  {"time", "input", "output"}, rows);
    }

    std::ostringstream os;
    os << "sysid: d_hat = " << res.physical.d << " N*m*s/rad, m_dip_hat = " << res.physical.m_dip
       << " A*m^2, T = " << res.fit.T << " s; outputs in " << dir.string();
    return os.str();
}

std::string run_ilc(const AppConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    const auto dir = ensure_dir(out_dir);
    SimConfig sim = cfg.sim;
    sim.seed = seed;

    const LinearModel model = linearized_model(sim.plant, sim.Ts);
    const Controller ctrl = make_controller(model, cfg.weights);
    const auto A = actuation_from(cfg);
    const Trajectory traj = generate_trajectory(cfg.traj_kind, cfg.traj_amplitude,
                                                cfg.traj_period, cfg.traj_period, sim.Ts);

    const IlcSessionResult res = run_ilc_session(sim, ctrl, ctrl, traj, A, cfg.ilc_w_e,
                                                 cfg.ilc_w_du, cfg.ilc_iterations);

    std::vector<std::vector<double>> summary;
    for (std::size_t n = 0; n < res.traces.size(); ++n) {
        summary.push_back({static_cast<double>(n), res.rms_alpha[n], res.rms_beta[n],
                           res.rms_total[n]});
        export_trace(res.traces[n], (dir / ("trace_iter_" + std::to_string(n) + ".csv")).string());
        std::vector<std::vector<double>> corr(res.corr_a[n].size());
        for (Eigen::Index k = 0; k < res.corr_a[n].size(); ++k)
            corr[k] = {k * sim.Ts, res.corr_a[n][k], res.corr_b[n][k]};
        write_csv(dir / ("corrections_iter_" + std::to_string(n) + ".csv"),
                  {"t", "u_corr_alpha", "u_corr_beta"}, corr);
    }
    write_csv(dir / "ilc_summary.csv", {"iteration", "rms_alpha", "rms_beta", "rms_total"},
              summary);

    std::ostringstream os;
    os << "ilc: rms error " << res.rms_total.front() << " rad (iteration 0) -> "
       << res.rms_total.back() << " rad (iteration " << res.traces.size() - 1
       << "); outputs in " << dir.string();
    return os.str();
}

std::string steady_state_report(const AppConfig& cfg, const std::string& out_dir) {
    const LinearModel model = linearized_model(cfg.sim.plant, cfg.sim.Ts);
    const Controller ctrl = make_controller(model, cfg.weights);

    const double deg = M_PI / 180.0;
    const Eigen::Vector4d x_xi = steady_state_output_dist(model, ctrl.K, deg);
    const Eigen::Vector4d x_ud = steady_state_input_dist(model, ctrl.K, deg);

    std::ostringstream os;
    os << "steady-state maps for unit (1 deg) disturbances, per plane\n";
    os << "K = [" << ctrl.K << "], F = " << ctrl.F << "\n";
    os << "misalignment xi = 1 deg     -> x_ss = [" << x_xi.transpose() / deg << "] deg\n";
    os << "input offset u_d = 1 deg    -> x_ss = [" << x_ud.transpose() / deg << "] deg\n";
    os << "amplification |x_ss(xi)| / |x_ss(u_d)| = " << x_xi.norm() / x_ud.norm() << "\n";

    if (!out_dir.empty()) {
        const auto dir = ensure_dir(out_dir);
        write_csv(dir / "steady_state.csv",
                  {"disturbance", "alpha", "phi", "alpha_dot", "phi_dot"},
                  {{0.0, x_xi[0], x_xi[1], x_xi[2], x_xi[3]},
                   {1.0, x_ud[0], x_ud[1], x_ud[2], x_ud[3]}});
    }
    return os.str();
}

}  // namespace magpend
