#include <doctest.h>

#include <cmath>

#include "magpend/plant.hpp"

using namespace magpend;

namespace {
PlantParams defaults() { return PlantParams{}; }
}  // namespace

TEST_CASE("lumped parameters for the default plant") {
    const LumpedParams lp = lumped_params(defaults());
    CHECK(lp.J == doctest::Approx(1.419012e-4).epsilon(1e-12));
    CHECK(lp.eta == doctest::Approx(1.1802e-3).epsilon(1e-12));
}

TEST_CASE("lumped parameters for a single point mass at the joint") {
    PlantParams p = defaults();
    p.m = 1e-12;
    p.m_m = 1e-12;
    p.m_j = 1.0;
    p.l = 1.0;
    const LumpedParams lp = lumped_params(p);
    CHECK(lp.J == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lp.eta == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parameter validation rejects non-physical values") {
    PlantParams p = defaults();
    CHECK_NOTHROW(p.validate());
    p.M = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.d = -1e-6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.b_mag = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("stabilizability inequality") {
    PlantParams p = defaults();
    CHECK(p.stabilizable());
    p.b_mag = 1e-3;  // far too weak a field
    CHECK_FALSE(p.stabilizable());
}

TEST_CASE("magnetic potential energy of the dipole") {
    const PlantParams p = defaults();
    CHECK(magnetic_potential(0.3, 0.3, p) == doctest::Approx(-p.m_dip * p.b_mag).epsilon(1e-15));
    CHECK(magnetic_potential(M_PI / 2, 0.0, p) == doctest::Approx(0.0).epsilon(1e-15));
    PlantParams q = defaults();
    q.m_dip = 1.5;
    q.b_mag = 0.035;
    CHECK(magnetic_potential(M_PI / 3, 0.0, q) == doctest::Approx(-0.02625).epsilon(1e-12));
}

TEST_CASE("upright and hanging configurations are fixed points") {
    const PlantParams p = defaults();
    const Eigen::Vector2d up = nonlinear_accel({0, 0, 0, 0}, 0.0, p);
    CHECK(up.norm() == doctest::Approx(0.0).epsilon(1e-12));
    const Eigen::Vector2d down = nonlinear_accel({M_PI, M_PI, 0, 0}, M_PI, p);
    CHECK(down.norm() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("finite-difference Jacobian of the nonlinear model matches the linearization") {
    const PlantParams p = defaults();
    const LinearModel lm = linearized_model(p, 0.01);
    const double h = 1e-7;

    // State Jacobian of the acceleration rows.
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d xp = Eigen::Vector4d::Zero(), xm = Eigen::Vector4d::Zero();
        xp[j] = h;
        xm[j] = -h;
        const Eigen::Vector2d fp = nonlinear_accel(PlanarState::from_vec(xp), 0.0, p);
        const Eigen::Vector2d fm = nonlinear_accel(PlanarState::from_vec(xm), 0.0, p);
        const Eigen::Vector2d col = (fp - fm) / (2 * h);
        for (int i = 0; i < 2; ++i) {
            const double ref = lm.A_c(2 + i, j);
            const double scale = std::max(1.0, std::abs(ref));
            CHECK(std::abs(col[i] - ref) / scale < 1e-6);
        }
    }

    // Input Jacobian.
    const Eigen::Vector2d gp = nonlinear_accel({0, 0, 0, 0}, h, p);
    const Eigen::Vector2d gm = nonlinear_accel({0, 0, 0, 0}, -h, p);
    const Eigen::Vector2d bcol = (gp - gm) / (2 * h);
    for (int i = 0; i < 2; ++i) {
        const double ref = lm.B_c[2 + i];
        CHECK(std::abs(bcol[i] - ref) / std::max(1.0, std::abs(ref)) < 1e-6);
    }
}

TEST_CASE("small-state acceleration matches the linear model") {
    const PlantParams p = defaults();
    const LinearModel lm = linearized_model(p, 0.01);
    const Eigen::Vector4d x(1e-4, 1e-4, 0, 0);
    const Eigen::Vector2d acc = nonlinear_accel(PlanarState::from_vec(x), 0.0, p);
    const Eigen::Vector4d lin = lm.A_c * x;
    CHECK(acc[0] == doctest::Approx(lin[2]).epsilon(1e-6));
    CHECK(acc[1] == doctest::Approx(lin[3]).epsilon(1e-6));
}

TEST_CASE("energy at the upright configuration") {
    const PlantParams p = defaults();
    const LumpedParams lp = lumped_params(p);
    const double expect = (lp.eta + p.M * p.l) * p.g + p.M * p.g * p.L / 2 - p.m_dip * p.b_mag;
    CHECK(total_energy({0, 0, 0, 0}, 0.0, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(-2.2771776e-2).epsilon(1e-9));
}

TEST_CASE("kinetic energy is quadratic in the rates") {
    const PlantParams p = defaults();
    const PlanarState s1{0.1, -0.2, 0.3, 0.5};
    const PlanarState s2{0.1, -0.2, 0.6, 1.0};
    const PlanarState s0{0.1, -0.2, 0.0, 0.0};
    const double U = total_energy(s0, 0.2, p);
    const double T1 = total_energy(s1, 0.2, p) - U;
    const double T2 = total_energy(s2, 0.2, p) - U;
    CHECK(T2 == doctest::Approx(4.0 * T1).epsilon(1e-12));
}

TEST_CASE("undamped rollout conserves energy") {
    PlantParams p = defaults();
    p.d = 0.0;
    const double dt = 1e-4;
    const double u = 0.01;
    PlanarState s{0.02, -0.01, 0.0, 0.0};
    const double E0 = total_energy(s, u, p);
    auto deriv = [&](const Eigen::Vector4d& x) {
        const Eigen::Vector2d acc = nonlinear_accel(PlanarState::from_vec(x), u, p);
        return Eigen::Vector4d(x[2], x[3], acc[0], acc[1]);
    };
    Eigen::Vector4d x = s.vec();
    for (int k = 0; k < 20000; ++k) {  // 2 s
        const Eigen::Vector4d k1 = deriv(x);
        const Eigen::Vector4d k2 = deriv(x + 0.5 * dt * k1);
        const Eigen::Vector4d k3 = deriv(x + 0.5 * dt * k2);
        const Eigen::Vector4d k4 = deriv(x + dt * k3);
        x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const double E1 = total_energy(PlanarState::from_vec(x), u, p);
    CHECK(std::abs(E1 - E0) / std::abs(E0) < 1e-8);
}

TEST_CASE("mass-matrix entries of the linearization") {
    const PlantParams p = defaults();
    CHECK(0.5 * p.M * p.l * p.L == doctest::Approx(1.942380e-4).epsilon(1e-12));
    CHECK(0.25 * p.M * p.L * p.L == doctest::Approx(1.804275e-4).epsilon(1e-12));
}

TEST_CASE("upright equilibrium is open-loop unstable") {
    const LinearModel lm = linearized_model(defaults(), 0.01);
    const Eigen::EigenSolver<Eigen::Matrix4d> es(lm.A_c);
    double max_re = -1e9;
    for (int i = 0; i < 4; ++i) max_re = std::max(max_re, es.eigenvalues()[i].real());
    CHECK(max_re > 0.0);
}

TEST_CASE("output matrices select the angles") {
    const LinearModel lm = linearized_model(defaults(), 0.01);
    const Eigen::Vector4d x(0.1, 0.2, 0.3, 0.4);
    const Eigen::Vector2d y = lm.C * x;
    CHECK(y[0] == doctest::Approx(0.1));
    CHECK(y[1] == doctest::Approx(0.2));
    CHECK((lm.C_tilde * x)(0, 0) == doctest::Approx(0.1));
}

TEST_CASE("detached actuator reduces to a scalar second-order system") {
    const PlantParams p = defaults();
    const LumpedParams lp = lumped_params(p);
    const ActuatorModel am = actuator_linear_model(p, 0.01);
    CHECK(am.b0 == doctest::Approx(p.m_dip * p.b_mag / lp.J).epsilon(1e-12));
    CHECK(am.a1 == doctest::Approx(p.d / lp.J).epsilon(1e-12));
    CHECK(am.a0 == doctest::Approx(am.b0 - lp.eta * p.g / lp.J).epsilon(1e-12));
    CHECK(am.b0 == doctest::Approx(369.9757295921387).epsilon(1e-12));
    CHECK(am.a1 == doctest::Approx(0.7047156754135976).epsilon(1e-12));
    CHECK(am.a0 == doctest::Approx(288.3854259160599).epsilon(1e-12));

    // Nonlinear actuator acceleration linearizes to the same coefficients.
    const double h = 1e-7;
    const double dda = (actuator_accel(h, 0, 0, p) - actuator_accel(-h, 0, 0, p)) / (2 * h);
    const double ddv = (actuator_accel(0, h, 0, p) - actuator_accel(0, -h, 0, p)) / (2 * h);
    const double ddu = (actuator_accel(0, 0, h, p) - actuator_accel(0, 0, -h, p)) / (2 * h);
    CHECK(dda == doctest::Approx(-am.a0).epsilon(1e-6));
    CHECK(ddv == doctest::Approx(-am.a1).epsilon(1e-6));
    CHECK(ddu == doctest::Approx(am.b0).epsilon(1e-6));
}

TEST_CASE("extra actuator torque enters the acceleration linearly") {
    const PlantParams p = defaults();
    const PlanarState s{0.05, -0.02, 0.1, -0.1};
    const Eigen::Vector2d base = nonlinear_accel(s, 0.01, p, 0.0);
    const Eigen::Vector2d tau1 = nonlinear_accel(s, 0.01, p, 1e-3);
    const Eigen::Vector2d tau2 = nonlinear_accel(s, 0.01, p, 2e-3);
    CHECK((tau2 - base).isApprox(2.0 * (tau1 - base), 1e-9));
}
