#include "magpend/control.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace magpend {

void discretize_exact(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, double Ts,
                      Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
    if (!(Ts > 0.0)) throw std::invalid_argument("Ts must be > 0");
    const auto n = A_c.rows();
    const auto m = B_c.cols();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = A_c * Ts;
    aug.topRightCorner(n, m) = B_c * Ts;
    const Eigen::MatrixXd expm = aug.exp();
    A = expm.topLeftCorner(n, n);
    B = expm.topRightCorner(n, m);
}

// Structured doubling algorithm for the DARE; quadratic convergence for
// stabilizable (A,B) with the usual detectability condition on Qw.
void solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Qw,
                const Eigen::MatrixXd& Rw, Eigen::MatrixXd& P, Eigen::MatrixXd& K) {
    const auto n = A.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Ak = A;
    Eigen::MatrixXd Gk = B * Rw.inverse() * B.transpose();
    Eigen::MatrixXd Hk = Qw;

    constexpr int kMaxIter = 200;
    constexpr double kTol = 1e-12;
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
        const Eigen::MatrixXd W = I + Gk * Hk;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
        const Eigen::MatrixXd WinvA = lu.solve(Ak);
        const Eigen::MatrixXd WinvG = lu.solve(Gk);
        const Eigen::MatrixXd Hnext = Hk + Ak.transpose() * Hk * WinvA;
        Gk = Gk + Ak * WinvG * Ak.transpose();
        Ak = Ak * WinvA;
        const double delta = (Hnext - Hk).norm();
        Hk = Hnext;
        if (delta <= kTol * std::max(1.0, Hk.norm())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("DARE iteration did not converge (non-stabilizable pair?)");

    P = 0.5 * (Hk + Hk.transpose());
    const Eigen::MatrixXd S = Rw + B.transpose() * P * B;
    K = S.ldlt().solve(B.transpose() * P * A);

    // residual and closed-loop checks
    const Eigen::MatrixXd res =
        A.transpose() * P * A - P - A.transpose() * P * B * K + Qw;
    if (res.norm() > 1e-10 * std::max(1.0, P.norm()))
        throw std::runtime_error("DARE residual too large");
    const Eigen::MatrixXd Acl = A - B * K;
    if (Acl.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
        throw std::runtime_error("DARE gain does not stabilize (A, B)");
}

double prefilter_gain(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K) {
    const Eigen::Matrix4d Abar =
        Eigen::Matrix4d::Identity() - model.A + model.B * K;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(Abar);
    if (!lu.isInvertible()) throw std::runtime_error("prefilter: I - A + BK is singular");
    const double dc =
        (model.C_tilde * lu.solve(model.B) * K * model.C_tilde.transpose()).value();
    if (dc == 0.0) throw std::runtime_error("prefilter: zero DC gain");
    return 1.0 / dc;
}

double feedback(const PlanarState& x_sp, const PlanarState& x,
                const Eigen::Matrix<double, 1, 4>& K) {
    return (K * (x_sp.vec() - x.vec())).value();
}

double finite_diff_velocity(double prev, double curr, double Ts) {
    if (!(Ts > 0.0)) throw std::invalid_argument("Ts must be > 0");
    return (curr - prev) / Ts;
}

Controller make_controller(const LinearModel& model, const LqrWeights& w) {
    if (!(w.Rw > 0.0)) throw std::invalid_argument("Rw must be > 0");
    Eigen::MatrixXd P, K;
    Eigen::MatrixXd Rw(1, 1);
    Rw << w.Rw;
    solve_dare(model.A, model.B, w.Qw, Rw, P, K);
    Controller c;
    c.K = K;
    c.P_dare = P;
    c.model = model;
    c.F = prefilter_gain(model, c.K);
    return c;
}

}  // namespace magpend
