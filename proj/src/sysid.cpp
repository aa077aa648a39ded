#include "magpend/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fftw3.h>

namespace magpend {

namespace {

// Real-to-complex DFT, scaled by 1/N. Returns N/2+1 bins.
std::vector<std::complex<double>> rdft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    for (auto& c : out) c /= static_cast<double>(n);
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (hi + v[mid - 1]);
}

struct RationalFit {
    double b0, a1, a0;
    bool ok;
};

// Weighted linear LS in (b0, a1, a0) for b0 = (a0 - w^2 + j a1 w) H_k, each
// row additionally scaled by 1/|d_prev(jw_k)| (Sanathanan-Koerner).
RationalFit solve_linearized(const std::vector<double>& omega,
                             const std::vector<std::complex<double>>& H,
                             const std::vector<double>& W,
                             const std::vector<double>& sk_scale) {
    const int nb = static_cast<int>(omega.size());
    Eigen::MatrixXd A(2 * nb, 3);
    Eigen::VectorXd y(2 * nb);
    for (int k = 0; k < nb; ++k) {
        const double s = W[k] * sk_scale[k];
        const std::complex<double> jwH = std::complex<double>(0.0, omega[k]) * H[k];
        // b0 - a1 * (jw H) - a0 * H = -w^2 H
        A(2 * k, 0) = s;
        A(2 * k, 1) = -s * jwH.real();
        A(2 * k, 2) = -s * H[k].real();
        y(2 * k) = -s * omega[k] * omega[k] * H[k].real();
        A(2 * k + 1, 0) = 0.0;
        A(2 * k + 1, 1) = -s * jwH.imag();
        A(2 * k + 1, 2) = -s * H[k].imag();
        y(2 * k + 1) = -s * omega[k] * omega[k] * H[k].imag();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(0) <= 0.0 ||
        svd.singularValues()(2) < 1e-14 * svd.singularValues()(0)) {
        std::ostringstream os;
        os << "fit_sos_delay: ill-conditioned normal equations, cond = "
           << svd.singularValues()(0) / svd.singularValues()(2);
        throw std::runtime_error(os.str());
    }
    const Eigen::Vector3d theta = svd.solve(y);
    return {theta[0], theta[1], theta[2], true};
}

double weighted_residual(const std::vector<double>& omega,
                         const std::vector<std::complex<double>>& G,
                         const std::vector<double>& W, double b0, double a1, double a0,
                         double T) {
    double r = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const std::complex<double> den(a0 - omega[k] * omega[k], a1 * omega[k]);
        const std::complex<double> model =
            std::exp(std::complex<double>(0.0, -omega[k] * T)) * b0 / den;
        r += W[k] * W[k] * std::norm(model - G[k]);
    }
    return r;
}

}  // namespace

void MultisineConfig::validate() const {
    if (!(fs > 0.0)) throw std::invalid_argument("fs must be > 0");
    if (!(0.0 <= f_min && f_min < f_max && f_max <= fs / 2.0))
        throw std::invalid_argument("need 0 <= f_min < f_max <= fs/2");
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    if (p_discard < 0 || p_total <= p_discard)
        throw std::invalid_argument("need p_total > p_discard >= 0");
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    if (!(amp > 0.0)) throw std::invalid_argument("amp must be > 0");
    if (excited_bins().empty()) throw std::invalid_argument("excited bin set is empty");
}

std::vector<int> MultisineConfig::excited_bins() const {
    const double df = fs / N;
    std::vector<int> bins;
    const int k_lo = std::max(1, static_cast<int>(std::ceil(f_min / df - 1e-9)));
    const int k_hi = std::min(N / 2, static_cast<int>(std::floor(f_max / df + 1e-9)));
    for (int k = k_lo; k <= k_hi; ++k) bins.push_back(k);
    return bins;
}

std::vector<double> design_multisine(const MultisineConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto bins = cfg.excited_bins();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::vector<double> phases(bins.size());
    for (auto& ph : phases) ph = phase(rng);

    // unit amplitude per sinusoid has RMS sqrt(nbins/2); rescale to cfg.amp
    const double scale = cfg.amp / std::sqrt(static_cast<double>(bins.size()) / 2.0);
    std::vector<double> signal(cfg.N, 0.0);
    for (int n = 0; n < cfg.N; ++n) {
        double v = 0.0;
        for (std::size_t j = 0; j < bins.size(); ++j)
            v += std::cos(2.0 * M_PI * bins[j] * n / static_cast<double>(cfg.N) + phases[j]);
        signal[n] = scale * v;
    }
    return signal;
}

std::vector<std::complex<double>> average_periods(const std::vector<std::vector<double>>& periods) {
    if (periods.empty()) throw std::invalid_argument("average_periods: no periods");
    const std::size_t n = periods.front().size();
    for (const auto& p : periods)
        if (p.size() != n) throw std::invalid_argument("average_periods: mismatched lengths");
    std::vector<std::complex<double>> acc(n / 2 + 1, {0.0, 0.0});
    for (const auto& p : periods) {
        const auto spec = rdft(p);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += spec[k];
    }
    for (auto& c : acc) c /= static_cast<double>(periods.size());
    return acc;
}

FrfEstimate estimate_bla(const std::vector<std::vector<std::complex<double>>>& U_spectra,
                         const std::vector<std::vector<std::complex<double>>>& Y_spectra,
                         const std::vector<double>& freqs) {
    const std::size_t r = U_spectra.size();
    if (r < 2) throw std::invalid_argument("estimate_bla: need r >= 2 realizations");
    if (Y_spectra.size() != r) throw std::invalid_argument("estimate_bla: U/Y size mismatch");
    const std::size_t nb = freqs.size();

    FrfEstimate out;
    for (std::size_t k = 0; k < nb; ++k) {
        std::vector<std::complex<double>> g;
        g.reserve(r);
        bool dropped = false;
        for (std::size_t l = 0; l < r; ++l) {
            if (U_spectra[l].size() != nb || Y_spectra[l].size() != nb)
                throw std::invalid_argument("estimate_bla: spectrum length mismatch");
            if (std::abs(U_spectra[l][k]) == 0.0) {
                dropped = true;
                break;
            }
            g.push_back(Y_spectra[l][k] / U_spectra[l][k]);
        }
        if (dropped) continue;  // zero input bin: drop it

        std::complex<double> mean{0.0, 0.0};
        for (const auto& gi : g) mean += gi;
        mean /= static_cast<double>(r);
        double var = 0.0;
        for (const auto& gi : g) var += std::norm(gi - mean);
        var /= static_cast<double>(r) * static_cast<double>(r - 1);

        out.freqs.push_back(freqs[k]);
        out.G_bla.push_back(mean);
        out.sigma_nl.push_back(std::sqrt(var));
    }
    out.W = weights_from_sigma(out.sigma_nl, out.G_bla);
    return out;
}

std::vector<double> weights_from_sigma(const std::vector<double>& sigma_nl,
                                       const std::vector<std::complex<double>>& G_bla) {
    if (sigma_nl.size() != G_bla.size())
        throw std::invalid_argument("weights_from_sigma: size mismatch");
    std::vector<double> rel(sigma_nl.size());
    for (std::size_t k = 0; k < sigma_nl.size(); ++k) {
        const double mag = std::abs(G_bla[k]);
        rel[k] = (mag > 0.0) ? sigma_nl[k] / mag : 0.0;
    }
    const double rho = median(rel);
    std::vector<double> W(rel.size(), 1.0);
    if (rho > 0.0)
        for (std::size_t k = 0; k < rel.size(); ++k) W[k] = 1.0 / (1.0 + rel[k] / rho);
    return W;
}

SosDelayFit fit_sos_delay(const FrfEstimate& frf, double Ts) {
    const std::size_t nb = frf.freqs.size();
    if (nb < 4) throw std::invalid_argument("fit_sos_delay: need at least 4 excited bins");
    if (!(Ts > 0.0)) throw std::invalid_argument("fit_sos_delay: Ts must be > 0");

    std::vector<double> omega(nb);
    for (std::size_t k = 0; k < nb; ++k) omega[k] = 2.0 * M_PI * frf.freqs[k];
    const std::vector<double>& W = frf.W;

    SosDelayFit best;
    best.residual = std::numeric_limits<double>::infinity();

    const int n_grid = 51;  // T in [0, 5 Ts], step Ts/10
    for (int gi = 0; gi < n_grid; ++gi) {
        const double T = gi * Ts / 10.0;
        std::vector<std::complex<double>> H(nb);
        for (std::size_t k = 0; k < nb; ++k)
            H[k] = frf.G_bla[k] * std::exp(std::complex<double>(0.0, omega[k] * T));

        std::vector<double> sk(nb, 1.0);
        RationalFit cur{0.0, 0.0, 0.0, false};
        double cur_res = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass <= 10; ++pass) {  // Levy pass, then 10 SK passes
            const RationalFit cand = solve_linearized(omega, H, W, sk);
            const double res =
                weighted_residual(omega, frf.G_bla, W, cand.b0, cand.a1, cand.a0, T);
            if (res < cur_res) {  // keep the best pass; SK is not monotone per se
                cur = cand;
                cur_res = res;
            }
            for (std::size_t k = 0; k < nb; ++k) {
                const std::complex<double> den(cand.a0 - omega[k] * omega[k],
                                               cand.a1 * omega[k]);
                sk[k] = 1.0 / std::max(std::abs(den), 1e-30);
            }
        }
        if (cur.ok && cur_res < best.residual) {
            best.b0 = cur.b0;
            best.a1 = cur.a1;
            best.a0 = cur.a0;
            best.T = T;
            best.residual = cur_res;
        }
    }
    if (!std::isfinite(best.residual))
        throw std::runtime_error("fit_sos_delay: no valid fit on the delay grid");
    return best;
}

PhysicalFit physical_params_from_fit(const SosDelayFit& fit, const PlantParams& p) {
    const LumpedParams lp = lumped_params(p);
    if (!(fit.b0 > 0.0)) throw std::runtime_error("physical_params_from_fit: b0 <= 0");
    PhysicalFit out;
    out.m_dip = fit.b0 * lp.J / p.b_mag;
    out.d = fit.a1 * lp.J;
    out.consistency_residual = std::abs(fit.a0 - (fit.b0 - lp.eta * p.g / lp.J));
    if (out.d < 0.0 || out.m_dip < 0.0)
        throw std::runtime_error("physical_params_from_fit: non-physical fit");
    return out;
}

}  // namespace magpend
