#pragma once

#include <string>
#include <vector>

namespace magpend {

enum class TrajectoryKind { constant, circle, figure_eight };

TrajectoryKind trajectory_kind_from_string(const std::string& s);

// Per-plane setpoint sequences sampled at Ts, with exact analytic rates.
struct Trajectory {
    TrajectoryKind kind = TrajectoryKind::constant;
    double amplitude = 0.0;  // rad
    double period = 0.0;     // s
    std::vector<double> alpha_sp, beta_sp;
    std::vector<double> alpha_sp_dot, beta_sp_dot;
};

// circle: a = A cos(2 pi t / Tp), b = A sin(2 pi t / Tp)
// figure_eight: 1:2 Lissajous, a = A sin(2 pi t / Tp), b = A sin(4 pi t / Tp)
// constant: both planes held at `amplitude`.
// Amplitudes above the default 8 deg bound throw unless allow_large is set.
Trajectory generate_trajectory(TrajectoryKind kind, double amplitude, double period,
                               double duration, double Ts, bool allow_large = false);

}  // namespace magpend
