#pragma once

#include <Eigen/Dense>

namespace magpend {

// Lumped inertia and first moment of the actuator assembly about its pivot.
struct LumpedParams {
    double J;    // kg*m^2
    double eta;  // kg*m
};

// Physical constants of the actuator-pendulum-magnet assembly plus the
// magnitude of the external field. Defaults follow the desk-scale platform;
// d and m_dip are synthetic defaults (not published) chosen to satisfy the
// stabilizability margin at b_mag = 35 mT and can be overridden via config.
struct PlantParams {
    double M = 4.4e-3;     // pendulum mass (kg)
    double m = 2.4e-3;     // actuator mass (kg)
    double m_j = 2.0e-3;   // joint mass (kg)
    double m_m = 12.7e-3;  // magnet mass (kg)
    double L = 0.405;      // pendulum length (m)
    double l = 0.218;      // actuator length (m)
    double l_m = 0.038;    // magnet offset from pivot (m)
    double d = 1.0e-4;     // viscous damping (N*m*s/rad), synthetic default
    double m_dip = 1.5;    // dipole moment magnitude (A*m^2), synthetic default
    double b_mag = 0.035;  // field magnitude (T)
    double g = 9.81;       // gravity (m/s^2)

    // Throws std::invalid_argument on non-positive masses/lengths, d < 0, etc.
    void validate() const;

    // Positive linearized actuator stiffness: m_dip*b_mag > (eta + M*l)*g.
    bool stabilizable() const;
};

// One plane's state x = (actuator angle, pendulum angle, and their rates).
// Angles are plain reals relative to the inertial vertical, never wrapped.
struct PlanarState {
    double a = 0.0;      // actuator angle alpha (rad)
    double p = 0.0;      // pendulum angle phi (rad)
    double a_dot = 0.0;  // rad/s
    double p_dot = 0.0;  // rad/s

    Eigen::Vector4d vec() const { return {a, p, a_dot, p_dot}; }
    static PlanarState from_vec(const Eigen::Vector4d& v) {
        return {v[0], v[1], v[2], v[3]};
    }
};

// Continuous and exactly discretized per-plane state-space model with the
// angle output matrix C and the output-controllable selector C_tilde.
struct LinearModel {
    Eigen::Matrix4d A_c;
    Eigen::Vector4d B_c;
    Eigen::Matrix4d A;
    Eigen::Vector4d B;
    Eigen::Matrix<double, 2, 4> C;
    Eigen::Matrix<double, 1, 4> C_tilde;
    double Ts = 0.0;
};

LumpedParams lumped_params(const PlantParams& p);

// Potential energy of the dipole in the external field: -m_dip*b_mag*cos(u_a - a).
double magnetic_potential(double u_a, double a, const PlantParams& p);

// Accelerations (alpha_dd, phi_dd) solving the 2x2 Euler-Lagrange system of
// the full nonlinear plane, with viscous damping -d*alpha_dot on the actuator
// and an optional extra torque on the actuator coordinate (disturbances).
Eigen::Vector2d nonlinear_accel(const PlanarState& s, double u_a, const PlantParams& p,
                                double extra_actuator_torque = 0.0);

// Kinetic plus potential energy (including the magnetic term).
double total_energy(const PlanarState& s, double u_a, const PlantParams& p);

// Linearization about the upright equilibrium, discretized exactly at Ts.
LinearModel linearized_model(const PlantParams& p, double Ts);

// Actuator-only plant (pendulum detached, M = 0): scalar second order
// J*add + d*ad + (m_dip*b_mag - eta*g)*a = m_dip*b_mag*u in the linear regime.
double actuator_accel(double a, double a_dot, double u_a, const PlantParams& p);

// 2-state linear model of the detached actuator, discretized exactly at Ts.
struct ActuatorModel {
    Eigen::Matrix2d A_c;
    Eigen::Vector2d B_c;
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
    double Ts = 0.0;
    // Continuous transfer-function coefficients G(s) = b0/(s^2 + a1 s + a0).
    double b0 = 0.0, a1 = 0.0, a0 = 0.0;
};

ActuatorModel actuator_linear_model(const PlantParams& p, double Ts);

}  // namespace magpend
