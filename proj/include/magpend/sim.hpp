#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magpend/compensation.hpp"
#include "magpend/control.hpp"
#include "magpend/field.hpp"
#include "magpend/ilc.hpp"
#include "magpend/plant.hpp"
#include "magpend/sysid.hpp"
#include "magpend/trajectory.hpp"

namespace magpend {

struct SimConfig {
    PlantParams plant;
    double Ts = 0.01;          // control period (s)
    double dt = 1e-4;          // RK4 substep (s), must divide Ts
    int delay_steps = 2;       // input delay in control steps
    double noise_std = 8.72664625997164788e-4;  // 0.05 deg angle noise (rad)
    double xi = 0.0;           // motion-capture misalignment (rad)
    double u_d = 0.0;          // field-calibration offset (rad)
    double c1 = 0.01;          // gradient disturbance, linear term (N*m/rad)
    double c2 = 0.04;          // gradient disturbance, quadratic term (N*m/rad^2)
    double duration = 10.0;    // s
    std::uint64_t seed = 0;
    bool compensation = false;
    double comp_cutoff_hz = 0.05;  // offset-estimator low-pass cutoff
    double comp_gate = 0.05;       // rate threshold for steady-state gating (rad/s)
    PlanarState init_a;        // initial state, alpha plane
    PlanarState init_b;        // initial state, beta plane

    void validate() const;
};

// Uniformly sampled closed-loop record; column schema is fixed (see
// Trace::columns and the README).
struct Trace {
    std::vector<double> t;
    std::vector<double> alpha, phi, beta, theta;
    std::vector<double> alpha_meas, phi_meas, beta_meas, theta_meas;
    std::vector<double> alpha_sp, beta_sp;
    std::vector<double> u_alpha, u_beta;
    std::vector<double> bx, by, bz;
    std::vector<Vector8d> currents;
    std::vector<double> phi_ss_hat, u_d_hat_a, u_d_hat_b;

    std::size_t size() const { return t.size(); }
    static const std::vector<std::string>& columns();
    std::vector<double> row(std::size_t k) const;
};

// Thrown when the divergence guard trips; carries the partial trace.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, Trace partial)
        : std::runtime_error(msg), trace(std::move(partial)) {}
    Trace trace;
};

// Full closed-loop step: measure (+ misalignment + noise), correct angles,
// finite-difference velocities, prefiltered setpoint, state feedback, ILC
// correction, input-offset correction, calibration offset and input delay,
// field/current allocation, RK4 integration of both planes with the gradient
// disturbance torque c1*a + c2*a^2 on each actuator.
Trace simulate_closed_loop(const SimConfig& cfg, const Controller& ctrl_a,
                           const Controller& ctrl_b, const Trajectory& traj,
                           const ActuationMatrix& A,
                           const std::vector<double>* ilc_corr_a = nullptr,
                           const std::vector<double>* ilc_corr_b = nullptr);

void export_trace(const Trace& trace, const std::string& path);
Trace parse_trace(const std::string& path);

// One multisine record of the actuator-only open-loop experiment.
struct SysidRecord {
    std::vector<double> time;    // s
    std::vector<double> input;   // commanded field angle (rad)
    std::vector<double> output;  // measured actuator angle (rad)
};

struct SysidResult {
    FrfEstimate frf;
    SosDelayFit fit;
    PhysicalFit physical;
    std::vector<SysidRecord> records;  // one per realization
};

// Full identification pipeline on the detached actuator (M = 0): simulate
// p_total periods per realization through the delayed nonlinear actuator,
// discard transients, average, then BLA -> weights -> fit -> physical params.
SysidResult run_sysid_experiment(const SimConfig& cfg, const MultisineConfig& ms);

struct IlcSessionResult {
    std::vector<Trace> traces;          // per iteration, 0 = no learning
    std::vector<double> rms_alpha;      // RMS alpha tracking error (rad)
    std::vector<double> rms_beta;
    std::vector<double> rms_total;
    std::vector<Eigen::VectorXd> corr_a, corr_b;  // corrections used per iteration
};

// Repeated execution of one periodic trajectory with per-plane norm-optimal
// updates between iterations. N = period/Ts steps per iteration.
IlcSessionResult run_ilc_session(const SimConfig& cfg, const Controller& ctrl_a,
                                 const Controller& ctrl_b, const Trajectory& traj,
                                 const ActuationMatrix& A, double w_e, double w_du,
                                 int n_iters);

}  // namespace magpend
