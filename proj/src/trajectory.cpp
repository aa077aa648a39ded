#include "magpend/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace magpend {

namespace {
constexpr double kAmplitudeBound = 8.0 * M_PI / 180.0;  // gradient forces take over beyond
}

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
    if (s == "constant") return TrajectoryKind::constant;
    if (s == "circle") return TrajectoryKind::circle;
    if (s == "figure_eight" || s == "figure-eight") return TrajectoryKind::figure_eight;
    throw std::invalid_argument("unknown trajectory kind: " + s);
}

Trajectory generate_trajectory(TrajectoryKind kind, double amplitude, double period,
                               double duration, double Ts, bool allow_large) {
    if (!(period > 0.0)) throw std::invalid_argument("trajectory period must be > 0");
    if (!(Ts > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("trajectory duration and Ts must be > 0");
    if (std::abs(amplitude) > kAmplitudeBound && !allow_large)
        throw std::invalid_argument("trajectory amplitude exceeds the 8 deg bound");

    const auto n = static_cast<std::size_t>(std::llround(duration / Ts));
    Trajectory tr;
    tr.kind = kind;
    tr.amplitude = amplitude;
    tr.period = period;
    tr.alpha_sp.resize(n);
    tr.beta_sp.resize(n);
    tr.alpha_sp_dot.resize(n);
    tr.beta_sp_dot.resize(n);

    const double w = 2.0 * M_PI / period;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = k * Ts;
        switch (kind) {
            case TrajectoryKind::constant:
                tr.alpha_sp[k] = amplitude;
                tr.beta_sp[k] = amplitude;
                tr.alpha_sp_dot[k] = 0.0;
                tr.beta_sp_dot[k] = 0.0;
                break;
            case TrajectoryKind::circle:
                tr.alpha_sp[k] = amplitude * std::cos(w * t);
                tr.beta_sp[k] = amplitude * std::sin(w * t);
                tr.alpha_sp_dot[k] = -amplitude * w * std::sin(w * t);
                tr.beta_sp_dot[k] = amplitude * w * std::cos(w * t);
                break;
            case TrajectoryKind::figure_eight:
                tr.alpha_sp[k] = amplitude * std::sin(w * t);
                tr.beta_sp[k] = amplitude * std::sin(2.0 * w * t);
                tr.alpha_sp_dot[k] = amplitude * w * std::cos(w * t);
                tr.beta_sp_dot[k] = 2.0 * amplitude * w * std::cos(2.0 * w * t);
                break;
        }
    }
    return tr;
}

}  // namespace magpend
