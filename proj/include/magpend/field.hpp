#pragma once

#include <string>

#include <Eigen/Dense>

namespace magpend {

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

struct FieldAngles {
    double u_a;    // rad
    double u_b;    // rad
    double b_mag;  // T
};

// 8x8 map from coil currents to (b, g5) at the workspace center. The five
// gradient terms are ordered (dbx/dx, dbx/dy, dbx/dz, dby/dy, dby/dz).
struct ActuationMatrix {
    Eigen::Matrix<double, 8, 8> A_mat;
    double cond = 0.0;

    // Synthetic 8-coil matrix from a point-dipole coil model at cube-corner
    // poses, stand-in for an unpublished calibrated matrix.
    static ActuationMatrix synthetic();

    // Plain-text CSV, 8 rows x 8 columns, row-major, SI units.
    static ActuationMatrix load_csv(const std::string& path);

    static ActuationMatrix from_matrix(const Eigen::Matrix<double, 8, 8>& A);
};

// Psi_B: b = b_mag * (sin(u_a)cos(u_b), sin(u_b), cos(u_a)cos(u_b)).
Eigen::Vector3d allocate_field(double u_a, double u_b, double b_mag);

// Inverse of Psi_B for u_b in (-pi/2, pi/2); throws on |b| ~ 0 or gimbal lock.
FieldAngles field_angles(const Eigen::Vector3d& b);

// i = pinv(A) * (b; 0_5), SVD pseudoinverse with relative cutoff 1e-12.
// Throws on rank-deficient A with a numerical rank report.
Vector8d currents_from_field(const Eigen::Vector3d& b, const ActuationMatrix& A);

// (b, g5) = A * i
std::pair<Eigen::Vector3d, Vector5d> field_from_currents(const Vector8d& i,
                                                         const ActuationMatrix& A);

}  // namespace magpend
