#pragma once

#include <Eigen/Dense>

#include "magpend/control.hpp"
#include "magpend/plant.hpp"

namespace magpend {

// Block-lower-triangular lifted map of the closed loop: block (i,j) is the
// 2x1 matrix C (A - BK)^(i-j) B for i >= j, zero above the block diagonal.
struct LiftedSystem {
    Eigen::MatrixXd P;  // 2N x N
    int N = 0;
};

LiftedSystem build_lifted(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K, int N);

// Forward-difference operator: -1 on the diagonal, +1 on the superdiagonal.
Eigen::MatrixXd derivative_operator(int N);

struct IlcGains {
    Eigen::MatrixXd Q_mat;  // N x N
    Eigen::MatrixXd L_mat;  // N x 2N
    double w_e = 0.0;
    double w_du = 0.0;
};

// Closed-form norm-optimal update gains:
//   Q = (w_e P'P + I + w_du D'D)^-1 (w_e P'P + I)
//   L = (w_e P'P + I + w_du D'D)^-1 P' w_e
IlcGains ilc_gains(const Eigen::MatrixXd& P, const Eigen::MatrixXd& D, double w_e, double w_du);

struct IlcIterate {
    Eigen::VectorXd u_n;  // N
    Eigen::VectorXd e_n;  // 2N
    int n = 0;
};

// u_{n+1} = Q u_n + L e_n
Eigen::VectorXd ilc_update(const IlcIterate& it, const IlcGains& gains);

}  // namespace magpend
