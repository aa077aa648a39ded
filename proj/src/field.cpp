#include "magpend/field.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace magpend {

namespace {

constexpr double kMu0Over4Pi = 1e-7;  // T*m/A

// Field of a point dipole mu (A*m^2) located at pos, evaluated at the origin.
Eigen::Vector3d dipole_field_at_origin(const Eigen::Vector3d& pos, const Eigen::Vector3d& mu) {
    const Eigen::Vector3d r = -pos;  // from source to field point
    const double rn = r.norm();
    const double r5 = std::pow(rn, 5);
    return kMu0Over4Pi * (3.0 * mu.dot(r) * r / r5 - mu / std::pow(rn, 3));
}

// Spatial gradient dB_i/dx_k of the same dipole field at the origin.
Eigen::Matrix3d dipole_gradient_at_origin(const Eigen::Vector3d& pos, const Eigen::Vector3d& mu) {
    const Eigen::Vector3d r = -pos;
    const double rn = r.norm();
    const double r5 = std::pow(rn, 5);
    const double r7 = std::pow(rn, 7);
    const double mr = mu.dot(r);
    Eigen::Matrix3d G;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            const double dik = (i == k) ? 1.0 : 0.0;
            G(i, k) = kMu0Over4Pi * (3.0 * (mu[k] * r[i] + mr * dik + mu[i] * r[k]) / r5 -
                                     15.0 * mr * r[i] * r[k] / r7);
        }
    return G;
}

Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd_checked(const ActuationMatrix& A) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(
        A.A_mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * sv(0);
    int rank = 0;
    for (int i = 0; i < 8; ++i)
        if (sv(i) > cutoff) ++rank;
    if (rank < 8) {
        std::ostringstream os;
        os << "actuation matrix is rank deficient: numerical rank " << rank << " of 8"
           << " (sigma_min/sigma_max = " << sv(7) / sv(0) << ")";
        throw std::runtime_error(os.str());
    }
    return svd;
}

}  // namespace

ActuationMatrix ActuationMatrix::from_matrix(const Eigen::Matrix<double, 8, 8>& A) {
    ActuationMatrix out;
    out.A_mat = A;
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(A);
    out.cond = svd.singularValues()(0) / svd.singularValues()(7);
    return out;
}

ActuationMatrix ActuationMatrix::synthetic() {
    // Eight coils at the corners of a cube, dipoles pointing at the workspace
    // center, approximating the geometry of an eight-coil eMNS.
    const double R = 0.12;               // coil distance from center (m)
    const double coil_moment = 120.0;    // A*m^2 per ampere of coil current
    Eigen::Matrix<double, 8, 8> A;
    int col = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                Eigen::Vector3d pos(sx, sy, sz);
                pos *= R / std::sqrt(3.0);
                // slight pose asymmetry keeps the matrix well away from the
                // symmetric rank drop of a perfect cube
                pos += 0.008 * Eigen::Vector3d(std::sin(1.7 * col), std::cos(2.3 * col),
                                               std::sin(0.9 * col + 0.4));
                const Eigen::Vector3d mu = coil_moment * (-pos.normalized());
                const Eigen::Vector3d b = dipole_field_at_origin(pos, mu);
                const Eigen::Matrix3d G = dipole_gradient_at_origin(pos, mu);
                A(0, col) = b[0];
                A(1, col) = b[1];
                A(2, col) = b[2];
                A(3, col) = G(0, 0);
                A(4, col) = G(0, 1);
                A(5, col) = G(0, 2);
                A(6, col) = G(1, 1);
                A(7, col) = G(1, 2);
                ++col;
            }
    return from_matrix(A);
}

ActuationMatrix ActuationMatrix::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open actuation matrix file: " + path);
    Eigen::Matrix<double, 8, 8> A;
    std::string line;
    for (int r = 0; r < 8; ++r) {
        if (!std::getline(in, line))
            throw std::runtime_error("actuation matrix file truncated: " + path);
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c < 8; ++c) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("actuation matrix row too short: " + path);
            A(r, c) = std::stod(cell);
        }
    }
    return from_matrix(A);
}

Eigen::Vector3d allocate_field(double u_a, double u_b, double b_mag) {
    if (!(b_mag > 0.0)) throw std::invalid_argument("b_mag must be > 0");
    return b_mag * Eigen::Vector3d(std::sin(u_a) * std::cos(u_b), std::sin(u_b),
                                   std::cos(u_a) * std::cos(u_b));
}

FieldAngles field_angles(const Eigen::Vector3d& b) {
    const double mag = b.norm();
    if (!(mag > 1e-300)) throw std::invalid_argument("field_angles: zero field vector");
    const double sy = b[1] / mag;
    if (std::abs(sy) >= 1.0 - 1e-12)
        throw std::invalid_argument("field_angles: gimbal case, |u_b| ~ pi/2");
    return {std::atan2(b[0], b[2]), std::asin(sy), mag};
}

Vector8d currents_from_field(const Eigen::Vector3d& b, const ActuationMatrix& A) {
    const auto svd = svd_checked(A);
    Vector8d target = Vector8d::Zero();
    target.head<3>() = b;
    return svd.solve(target);
}

std::pair<Eigen::Vector3d, Vector5d> field_from_currents(const Vector8d& i,
                                                         const ActuationMatrix& A) {
    const Vector8d bg = A.A_mat * i;
    return {bg.head<3>(), bg.tail<5>()};
}

}  // namespace magpend
