#include "magpend/compensation.hpp"

#include <cmath>
#include <stdexcept>

namespace magpend {

namespace {

Eigen::Vector4d abar_inv_b(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K) {
    const Eigen::Matrix4d Abar = Eigen::Matrix4d::Identity() - model.A + model.B * K;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(Abar);
    if (!lu.isInvertible()) throw std::runtime_error("I - A + BK is singular");
    return lu.solve(model.B);
}

}  // namespace

Eigen::Vector4d steady_state_output_dist(const LinearModel& model,
                                         const Eigen::Matrix<double, 1, 4>& K, double xi) {
    const Eigen::Matrix4d Abar = Eigen::Matrix4d::Identity() - model.A + model.B * K;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(Abar);
    if (!lu.isInvertible()) throw std::runtime_error("I - A + BK is singular");
    const Eigen::Vector4d dist(xi, xi, 0.0, 0.0);
    return -lu.solve(model.B * (K * dist));
}

Eigen::Vector4d steady_state_input_dist(const LinearModel& model,
                                        const Eigen::Matrix<double, 1, 4>& K, double u_d) {
    return -abar_inv_b(model, K) * u_d;
}

double estimate_input_offset(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K,
                             const Eigen::Vector4d& x_ss) {
    const Eigen::Vector4d v = abar_inv_b(model, K);
    const double nrm2 = v.squaredNorm();
    if (!(nrm2 > 0.0)) throw std::runtime_error("estimate_input_offset: B is zero");
    return -v.dot(x_ss) / nrm2;  // pseudoinverse of the 4x1 map
}

double lp_coeff_from_cutoff(double cutoff_hz, double Ts) {
    if (!(cutoff_hz > 0.0) || !(Ts > 0.0))
        throw std::invalid_argument("cutoff and Ts must be > 0");
    const double a = 1.0 - std::exp(-2.0 * M_PI * cutoff_hz * Ts);
    return std::min(1.0, a);
}

OffsetEstimator::OffsetEstimator(double cutoff_hz, double Ts, bool enabled_)
    : lp_alpha(lp_coeff_from_cutoff(cutoff_hz, Ts)), enabled(enabled_) {}

void OffsetEstimator::update_misalignment(double phi_meas) {
    phi_ss = (1.0 - lp_alpha) * phi_ss + lp_alpha * phi_meas;
}

void OffsetEstimator::update_input_offset(const LinearModel& model,
                                          const Eigen::Matrix<double, 1, 4>& K,
                                          const Eigen::Vector4d& x_meas) {
    // x_meas already carries the effect of the residual offset u_d - u_d_hat;
    // the raw estimate is the residual, accumulated through the low pass.
    const double residual = -estimate_input_offset(model, K, x_meas);
    u_d_hat += lp_alpha * residual;
}

std::pair<double, double> correct_angles(double a, double p, double phi_ss) {
    return {a - phi_ss, p - phi_ss};
}

double correct_input(double u, double u_d_hat) { return u - u_d_hat; }

}  // namespace magpend
