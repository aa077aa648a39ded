#pragma once

#include <Eigen/Dense>

#include "magpend/control.hpp"
#include "magpend/plant.hpp"

namespace magpend {

// Steady state under a constant measurement-frame misalignment xi entering as
// the additive state disturbance (xi, xi, 0, 0): x_ss = -Abar^-1 B K d.
Eigen::Vector4d steady_state_output_dist(const LinearModel& model,
                                         const Eigen::Matrix<double, 1, 4>& K, double xi);

// Steady state under a constant input offset u_d (applied field lagging the
// command by u_d): x_ss = -Abar^-1 B u_d.
Eigen::Vector4d steady_state_input_dist(const LinearModel& model,
                                        const Eigen::Matrix<double, 1, 4>& K, double u_d);

// Least-squares inversion of the input-offset map: u_d_hat = -pinv(Abar^-1 B) x_ss.
double estimate_input_offset(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K,
                             const Eigen::Vector4d& x_ss);

// First-order IIR coefficient for a given cutoff at sample time Ts.
double lp_coeff_from_cutoff(double cutoff_hz, double Ts);

// Online estimator of the measurement-frame misalignment (low-passed pendulum
// angle) and of the field-calibration input offset. Advanced by exactly one
// owner per control loop.
struct OffsetEstimator {
    double phi_ss = 0.0;    // low-passed pendulum angle (rad)
    double u_d_hat = 0.0;   // estimated input offset (rad)
    double lp_alpha = 0.0;  // IIR coefficient, in (0,1)
    bool enabled = false;

    OffsetEstimator() = default;
    OffsetEstimator(double cutoff_hz, double Ts, bool enabled_);

    // phi_ss <- (1 - lp_alpha) phi_ss + lp_alpha * phi_meas
    void update_misalignment(double phi_meas);

    // Accumulates the residual offset visible in the corrected steady-state
    // measurement, low-passed with the same coefficient.
    void update_input_offset(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K,
                             const Eigen::Vector4d& x_meas);
};

// a' = a - phi_ss, p' = p - phi_ss
std::pair<double, double> correct_angles(double a, double p, double phi_ss);

// u - u_d_hat
double correct_input(double u, double u_d_hat);

}  // namespace magpend
