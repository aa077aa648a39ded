#pragma once

#include <Eigen/Dense>

#include "magpend/plant.hpp"

namespace magpend {

struct LqrWeights {
    // Defaults are tuned so the loop stays stable with the default 20 ms
    // input delay and backward-difference velocity estimates.
    Eigen::Matrix4d Qw = Eigen::Vector4d(10.0, 100.0, 0.01, 0.01).asDiagonal();
    double Rw = 300.0;
};

struct Controller {
    Eigen::Matrix<double, 1, 4> K;
    double F = 0.0;         // prefilter gain
    Eigen::Matrix4d P_dare;
    LinearModel model;
};

// Exact zero-order-hold discretization via the matrix exponential of the
// augmented block matrix [[A_c, B_c], [0, 0]].
void discretize_exact(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double Ts,
                      Eigen::MatrixXd& A, Eigen::MatrixXd& B);

// Stabilizing solution of the discrete algebraic Riccati equation
//   A'PA - P - A'PB(Rw + B'PB)^-1 B'PA + Qw = 0
// by the structured doubling algorithm. Returns (P, K) with
// K = (Rw + B'PB)^-1 B'PA. Throws on non-convergence.
void solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                const Eigen::MatrixXd& Qw, const Eigen::MatrixXd& Rw,
                Eigen::MatrixXd& P, Eigen::MatrixXd& K);

// Prefilter F = (C~ Abar^-1 B K C~')^-1 with Abar = I - A + BK.
double prefilter_gain(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K);

// u = K (x_sp - x)
double feedback(const PlanarState& x_sp, const PlanarState& x,
                const Eigen::Matrix<double, 1, 4>& K);

double finite_diff_velocity(double prev, double curr, double Ts);

// DARE synthesis plus prefilter for one plane.
Controller make_controller(const LinearModel& model, const LqrWeights& w);

}  // namespace magpend
