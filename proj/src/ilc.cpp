#include "magpend/ilc.hpp"

#include <stdexcept>

namespace magpend {

LiftedSystem build_lifted(const LinearModel& model, const Eigen::Matrix<double, 1, 4>& K,
                          int N) {
    if (N < 1) throw std::invalid_argument("build_lifted: N must be >= 1");
    const Eigen::Matrix4d Acl = model.A - model.B * K;

    // v_m = (A - BK)^m B by the recurrence; block (i,j) = C v_{i-j}
    std::vector<Eigen::Matrix<double, 2, 1>> blocks(N);
    Eigen::Vector4d v = model.B;
    for (int m = 0; m < N; ++m) {
        blocks[m] = model.C * v;
        v = Acl * v;
    }

    LiftedSystem sys;
    sys.N = N;
    sys.P = Eigen::MatrixXd::Zero(2 * N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j) sys.P.block<2, 1>(2 * i, j) = blocks[i - j];
    return sys;
}

Eigen::MatrixXd derivative_operator(int N) {
    if (N < 1) throw std::invalid_argument("derivative_operator: N must be >= 1");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        D(i, i) = -1.0;
        if (i + 1 < N) D(i, i + 1) = 1.0;
    }
    return D;
}

IlcGains ilc_gains(const Eigen::MatrixXd& P, const Eigen::MatrixXd& D, double w_e,
                   double w_du) {
    if (w_e < 0.0 || w_du < 0.0) throw std::invalid_argument("ilc_gains: weights must be >= 0");
    const auto N = P.cols();
    if (D.rows() != N || D.cols() != N) throw std::invalid_argument("ilc_gains: D dimension");

    IlcGains g;
    g.w_e = w_e;
    g.w_du = w_du;

    const Eigen::MatrixXd PtP = P.transpose() * P;
    const Eigen::MatrixXd numer =
        w_e * PtP + Eigen::MatrixXd::Identity(N, N);
    if (w_du == 0.0) {
        // (w_e P'P + I)^-1 (w_e P'P + I) = I
        g.Q_mat = Eigen::MatrixXd::Identity(N, N);
        g.L_mat = numer.ldlt().solve(P.transpose() * w_e);
        return g;
    }
    const Eigen::MatrixXd M = numer + w_du * D.transpose() * D;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);  // PD: identity term is always present
    g.Q_mat = ldlt.solve(numer);
    g.L_mat = ldlt.solve(P.transpose() * w_e);
    return g;
}

Eigen::VectorXd ilc_update(const IlcIterate& it, const IlcGains& gains) {
    const auto N = gains.Q_mat.rows();
    if (it.u_n.size() != N || it.e_n.size() != 2 * N)
        throw std::invalid_argument("ilc_update: dimension mismatch");
    return gains.Q_mat * it.u_n + gains.L_mat * it.e_n;
}

}  // namespace magpend
