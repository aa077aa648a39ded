#include "magpend/plant.hpp"

#include <cmath>
#include <stdexcept>

#include "magpend/control.hpp"

namespace magpend {

void PlantParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(M, "M");
    positive(m, "m");
    positive(m_j, "m_j");
    positive(m_m, "m_m");
    positive(L, "L");
    positive(l, "l");
    positive(l_m, "l_m");
    positive(b_mag, "b_mag");
    positive(m_dip, "m_dip");
    positive(g, "g");
    if (d < 0.0) throw std::invalid_argument("d must be >= 0");
}

bool PlantParams::stabilizable() const {
    const LumpedParams lp = lumped_params(*this);
    return m_dip * b_mag > (lp.eta + M * l) * g;
}

LumpedParams lumped_params(const PlantParams& p) {
    LumpedParams lp;
    lp.J = p.m_m * p.l_m * p.l_m + p.m * p.l * p.l / 4.0 + p.m_j * p.l * p.l;
    lp.eta = p.m_m * p.l_m + p.m * p.l / 2.0 + p.m_j * p.l;
    return lp;
}

double magnetic_potential(double u_a, double a, const PlantParams& p) {
    return -p.m_dip * p.b_mag * std::cos(u_a - a);
}

// Euler-Lagrange system of the planar actuator-pendulum chain:
//   [J+M l^2     , M l L c / 2] [a_dd]   [rhs_a]
//   [M l L c / 2 , M L^2 / 4  ] [p_dd] = [rhs_p]
// with c = cos(a - p),
//   rhs_a = -M l L/2 sin(a-p) p_dot^2 + (eta+M l) g sin a
//           + m_dip b_mag sin(u_a - a) - d a_dot + tau_extra
//   rhs_p =  M l L/2 sin(a-p) a_dot^2 + M g L/2 sin p
Eigen::Vector2d nonlinear_accel(const PlanarState& s, double u_a, const PlantParams& p,
                                double extra_actuator_torque) {
    const LumpedParams lp = lumped_params(p);
    const double half_MlL = 0.5 * p.M * p.l * p.L;
    const double c = std::cos(s.a - s.p);
    const double sn = std::sin(s.a - s.p);

    Eigen::Matrix2d Mq;
    Mq << lp.J + p.M * p.l * p.l, half_MlL * c,  //
        half_MlL * c, 0.25 * p.M * p.L * p.L;

    Eigen::Vector2d rhs;
    rhs[0] = -half_MlL * sn * s.p_dot * s.p_dot + (lp.eta + p.M * p.l) * p.g * std::sin(s.a) +
             p.m_dip * p.b_mag * std::sin(u_a - s.a) - p.d * s.a_dot + extra_actuator_torque;
    rhs[1] = half_MlL * sn * s.a_dot * s.a_dot + p.M * p.g * p.L / 2.0 * std::sin(s.p);

    // det = J M L^2/4 + (1 - c^2) M^2 l^2 L^2/4 > 0 for valid parameters
    const double det = Mq(0, 0) * Mq(1, 1) - Mq(0, 1) * Mq(1, 0);
    if (!(det > 0.0)) throw std::runtime_error("singular mass matrix");

    Eigen::Vector2d acc;
    acc[0] = (Mq(1, 1) * rhs[0] - Mq(0, 1) * rhs[1]) / det;
    acc[1] = (Mq(0, 0) * rhs[1] - Mq(1, 0) * rhs[0]) / det;
    return acc;
}

double total_energy(const PlanarState& s, double u_a, const PlantParams& p) {
    const LumpedParams lp = lumped_params(p);
    const double c = std::cos(s.a - s.p);
    const double T = 0.5 * (lp.J + p.M * p.l * p.l) * s.a_dot * s.a_dot +
                     0.125 * p.M * p.L * p.L * s.p_dot * s.p_dot +
                     0.5 * p.M * p.l * p.L * s.a_dot * s.p_dot * c;
    const double U = (lp.eta + p.M * p.l) * p.g * std::cos(s.a) +
                     p.M * p.g * p.L / 2.0 * std::cos(s.p) + magnetic_potential(u_a, s.a, p);
    return T + U;
}

LinearModel linearized_model(const PlantParams& p, double Ts) {
    const LumpedParams lp = lumped_params(p);

    Eigen::Matrix2d Mm, Dm, Km;
    Mm << lp.J + p.M * p.l * p.l, 0.5 * p.M * p.l * p.L,  //
        0.5 * p.M * p.l * p.L, 0.25 * p.M * p.L * p.L;
    Dm << p.d, 0.0, 0.0, 0.0;
    Km << -(lp.eta + p.M * p.l) * p.g + p.m_dip * p.b_mag, 0.0,  //
        0.0, -p.M * p.g * p.L / 2.0;
    const Eigen::Vector2d w(p.m_dip * p.b_mag, 0.0);

    const Eigen::Matrix2d Minv = Mm.inverse();

    LinearModel model;
    model.A_c.setZero();
    model.A_c.topRightCorner<2, 2>().setIdentity();
    model.A_c.bottomLeftCorner<2, 2>() = -Minv * Km;
    model.A_c.bottomRightCorner<2, 2>() = -Minv * Dm;
    model.B_c.setZero();
    model.B_c.tail<2>() = Minv * w;

    Eigen::MatrixXd Ad, Bd;
    discretize_exact(model.A_c, model.B_c, Ts, Ad, Bd);
    model.A = Ad;
    model.B = Bd;

    model.C.setZero();
    model.C(0, 0) = 1.0;
    model.C(1, 1) = 1.0;
    model.C_tilde << 1.0, 0.0, 0.0, 0.0;
    model.Ts = Ts;
    return model;
}

double actuator_accel(double a, double a_dot, double u_a, const PlantParams& p) {
    const LumpedParams lp = lumped_params(p);
    return (lp.eta * p.g * std::sin(a) + p.m_dip * p.b_mag * std::sin(u_a - a) - p.d * a_dot) /
           lp.J;
}

ActuatorModel actuator_linear_model(const PlantParams& p, double Ts) {
    const LumpedParams lp = lumped_params(p);
    ActuatorModel m;
    m.b0 = p.m_dip * p.b_mag / lp.J;
    m.a1 = p.d / lp.J;
    m.a0 = (p.m_dip * p.b_mag - lp.eta * p.g) / lp.J;
    m.A_c << 0.0, 1.0, -m.a0, -m.a1;
    m.B_c << 0.0, m.b0;
    Eigen::MatrixXd Ad, Bd;
    discretize_exact(m.A_c, m.B_c, Ts, Ad, Bd);
    m.A = Ad;
    m.B = Bd;
    m.Ts = Ts;
    return m;
}

}  // namespace magpend
