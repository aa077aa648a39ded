#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "magpend/plant.hpp"
#include "magpend/sysid.hpp"

using namespace magpend;
using cplx = std::complex<double>;

TEST_CASE("multisine configuration validation and excited bins") {
    MultisineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    const auto bins = cfg.excited_bins();
    REQUIRE(bins.size() == 100);  // 0.1..10 Hz at 0.1 Hz resolution
    CHECK(bins.front() == 1);
    CHECK(bins.back() == 100);

    MultisineConfig bad = cfg;
    bad.f_max = 60.0;  // above Nyquist
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.p_discard = bad.p_total;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("multisine has a flat spectrum on exactly the excited bins") {
    MultisineConfig cfg;
    const auto sig = design_multisine(cfg, 42);
    REQUIRE(static_cast<int>(sig.size()) == cfg.N);

    const auto spec = average_periods({sig});
    const auto bins = cfg.excited_bins();
    double mag0 = std::abs(spec[bins[0]]);
    CHECK(mag0 > 0.0);
    for (int b : bins) CHECK(std::abs(spec[b]) == doctest::Approx(mag0).epsilon(1e-9));
    for (int b = 0; b <= cfg.N / 2; ++b) {
        if (std::find(bins.begin(), bins.end(), b) == bins.end())
            CHECK(std::abs(spec[b]) < 1e-12 * mag0);
    }

    // RMS matches the configured amplitude.
    double ss = 0.0;
    for (double v : sig) ss += v * v;
    CHECK(std::sqrt(ss / sig.size()) == doctest::Approx(cfg.amp).epsilon(1e-9));
}

TEST_CASE("multisine phases are seeded: same seed reproduces, seeds differ") {
    MultisineConfig cfg;
    const auto s1 = design_multisine(cfg, 7);
    const auto s1b = design_multisine(cfg, 7);
    const auto s2 = design_multisine(cfg, 8);
    CHECK(s1 == s1b);
    double diff = 0.0;
    for (std::size_t k = 0; k < s1.size(); ++k) diff += std::abs(s1[k] - s2[k]);
    CHECK(diff > 1e-3);

    // Identical amplitude spectra regardless of seed.
    const auto sp1 = average_periods({s1});
    const auto sp2 = average_periods({s2});
    for (int b : cfg.excited_bins())
        CHECK(std::abs(sp1[b]) == doctest::Approx(std::abs(sp2[b])).epsilon(1e-9));
}

TEST_CASE("a single excited bin yields a pure sinusoid") {
    MultisineConfig cfg;
    cfg.f_min = 0.5;
    cfg.f_max = 1.0;  // only the 1 Hz bin falls inside at 1 Hz resolution
    cfg.N = 100;
    cfg.fs = 100.0;
    const auto sig = design_multisine(cfg, 3);
    // Fit amplitude/phase of a 1 Hz sinusoid and verify pointwise.
    double cs = 0.0, sn = 0.0;
    for (int k = 0; k < cfg.N; ++k) {
        cs += sig[k] * std::cos(2 * M_PI * k / 100.0);
        sn += sig[k] * std::sin(2 * M_PI * k / 100.0);
    }
    cs *= 2.0 / cfg.N;
    sn *= 2.0 / cfg.N;
    for (int k = 0; k < cfg.N; ++k) {
        const double recon = cs * std::cos(2 * M_PI * k / 100.0) + sn * std::sin(2 * M_PI * k / 100.0);
        CHECK(sig[k] == doctest::Approx(recon).epsilon(1e-9));
    }
}

TEST_CASE("period averaging") {
    SUBCASE("identical periods average to the single-period transform") {
        std::vector<double> x(64);
        for (int k = 0; k < 64; ++k) x[k] = std::sin(2 * M_PI * 3 * k / 64.0) + 0.2 * k / 64.0;
        const auto one = average_periods({x});
        const auto three = average_periods({x, x, x});
        REQUIRE(one.size() == three.size());
        for (std::size_t b = 0; b < one.size(); ++b)
            CHECK(std::abs(one[b] - three[b]) < 1e-14);
    }
    SUBCASE("mismatched period lengths are rejected") {
        CHECK_THROWS(average_periods({std::vector<double>(64, 0.0), std::vector<double>(32, 0.0)}));
    }
    SUBCASE("averaging shrinks additive white noise variance by 1/p") {
        const int N = 64, p = 8, trials = 100, bin = 5;
        std::mt19937_64 rng(123);
        std::normal_distribution<double> nd(0.0, 1.0);
        double var1 = 0.0, varp = 0.0;
        for (int t = 0; t < trials; ++t) {
            std::vector<std::vector<double>> periods(p, std::vector<double>(N));
            for (auto& per : periods)
                for (double& v : per) v = nd(rng);
            const auto avg = average_periods(periods);
            varp += std::norm(avg[bin]);
            const auto single = average_periods({periods[0]});
            var1 += std::norm(single[bin]);
        }
        var1 /= trials;
        varp /= trials;
        CHECK(varp < var1 / p * 2.0);
        CHECK(varp > var1 / p / 2.0);
    }
}

namespace {
// Exact periodic response of a discrete SISO system (angle output) to an
// N-periodic input: start from the periodic fixed point so every period of
// the output is identical to machine precision.
std::vector<double> periodic_response(const ActuatorModel& am, const std::vector<double>& u) {
    const int N = static_cast<int>(u.size());
    Eigen::Matrix2d An = Eigen::Matrix2d::Identity();
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int k = 0; k < N; ++k) {
        acc = am.A * acc + am.B * u[k];
        An = am.A * An;
    }
    const Eigen::Vector2d x0 = (Eigen::Matrix2d::Identity() - An).lu().solve(acc);
    std::vector<double> y(N);
    Eigen::Vector2d x = x0;
    for (int k = 0; k < N; ++k) {
        y[k] = x[0];
        x = am.A * x + am.B * u[k];
    }
    return y;
}

cplx discrete_frf(const ActuatorModel& am, double f_hz) {
    const cplx z = std::exp(cplx(0.0, 2 * M_PI * f_hz * am.Ts));
    const Eigen::Matrix2cd M = z * Eigen::Matrix2cd::Identity() - am.A.cast<cplx>();
    const Eigen::Vector2cd v = M.lu().solve(am.B.cast<cplx>());
    return v[0];
}
}  // namespace

TEST_CASE("best linear approximator on a purely linear plant") {
    const ActuatorModel am = actuator_linear_model(PlantParams{}, 0.01);
    MultisineConfig cfg;
    cfg.r = 4;
    const auto bins = cfg.excited_bins();

    std::vector<double> freqs;
    for (int b : bins) freqs.push_back(b * cfg.fs / cfg.N);

    std::vector<std::vector<cplx>> U, Y;
    for (int l = 0; l < cfg.r; ++l) {
        const auto u = design_multisine(cfg, 100 + l);
        const auto y = periodic_response(am, u);
        const auto Us = average_periods({u});
        const auto Ys = average_periods({y});
        std::vector<cplx> ub, yb;
        for (int b : bins) {
            ub.push_back(Us[b]);
            yb.push_back(Ys[b]);
        }
        U.push_back(ub);
        Y.push_back(yb);
    }
    const FrfEstimate frf = estimate_bla(U, Y, freqs);
    REQUIRE(frf.G_bla.size() == bins.size());
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const cplx truth = discrete_frf(am, freqs[k]);
        CHECK(std::abs(frf.G_bla[k] - truth) <= 1e-9 * std::abs(truth));
        CHECK(frf.sigma_nl[k] <= 1e-12 * std::abs(truth));
    }
}

TEST_CASE("identical realizations give exactly zero spread") {
    std::vector<cplx> u = {cplx(1, 0), cplx(0, 1)};
    std::vector<cplx> y = {cplx(2, 0), cplx(0, 3)};
    const FrfEstimate frf = estimate_bla({u, u, u}, {y, y, y}, {1.0, 2.0});
    CHECK(frf.sigma_nl[0] == 0.0);
    CHECK(frf.sigma_nl[1] == 0.0);
    CHECK(frf.G_bla[0] == cplx(2, 0));
}

TEST_CASE("weights built from the relative uncertainty") {
    SUBCASE("zero uncertainty gives unit weights") {
        const std::vector<double> sigma(5, 0.0);
        const std::vector<cplx> G(5, cplx(1.0, 0.0));
        for (double w : weights_from_sigma(sigma, G)) CHECK(w == doctest::Approx(1.0));
    }
    SUBCASE("the median relative uncertainty maps to one half") {
        std::vector<double> sigma = {0.01, 0.02, 0.04};
        std::vector<cplx> G(3, cplx(1.0, 0.0));
        const auto W = weights_from_sigma(sigma, G);
        CHECK(W[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(W[0] > W[1]);
        CHECK(W[1] > W[2]);
        for (double w : W) {
            CHECK(w > 0.0);
            CHECK(w <= 1.0);
        }
    }
    SUBCASE("scale invariance in the FRF magnitude") {
        std::vector<double> sigma = {0.01, 0.05, 0.02, 0.08};
        std::vector<cplx> G = {cplx(1, 0), cplx(0, 2), cplx(-3, 0), cplx(1, 1)};
        const auto W1 = weights_from_sigma(sigma, G);
        std::vector<double> sigma2 = sigma;
        std::vector<cplx> G2 = G;
        for (auto& s : sigma2) s *= 7.3;
        for (auto& g : G2) g *= 7.3;
        const auto W2 = weights_from_sigma(sigma2, G2);
        for (std::size_t k = 0; k < W1.size(); ++k)
            CHECK(W1[k] == doctest::Approx(W2[k]).epsilon(1e-12));
    }
}

namespace {
FrfEstimate synthetic_frf(double b0, double a1, double a0, double T) {
    FrfEstimate frf;
    for (int b = 1; b <= 100; ++b) {
        const double f = 0.1 * b;
        const cplx s(0.0, 2 * M_PI * f);
        frf.freqs.push_back(f);
        frf.G_bla.push_back(std::exp(-s * T) * b0 / (s * s + a1 * s + a0));
        frf.sigma_nl.push_back(0.0);
        frf.W.push_back(1.0);
    }
    return frf;
}
}  // namespace

TEST_CASE("second-order-plus-delay fit recovers a synthetic model") {
    const double Ts = 0.01;
    const FrfEstimate frf = synthetic_frf(370.0, 0.7, 289.0, 0.02);
    const SosDelayFit fit = fit_sos_delay(frf, Ts);
    CHECK(fit.b0 == doctest::Approx(370.0).epsilon(5e-3));
    CHECK(fit.a1 == doctest::Approx(0.7).epsilon(5e-3));
    CHECK(fit.a0 == doctest::Approx(289.0).epsilon(5e-3));
    CHECK(std::abs(fit.T - 0.02) <= Ts / 10 + 1e-12);
}

TEST_CASE("zero-delay synthetic model selects the grid boundary") {
    const SosDelayFit fit = fit_sos_delay(synthetic_frf(370.0, 0.7, 289.0, 0.0), 0.01);
    CHECK(fit.T == doctest::Approx(0.0));
    CHECK(fit.b0 == doctest::Approx(370.0).epsilon(5e-3));
}

TEST_CASE("down-weighting corrupted bins improves the fit") {
    const double Ts = 0.01;
    FrfEstimate frf = synthetic_frf(370.0, 0.7, 289.0, 0.02);
    // Corrupt the neighborhood of the resonance (~2.7 Hz, bins 25..29).
    FrfEstimate unweighted = frf;
    for (int k = 24; k < 29; ++k) {
        const cplx bad = frf.G_bla[k] * cplx(1.6, 0.4);
        frf.G_bla[k] = bad;
        unweighted.G_bla[k] = bad;
        frf.W[k] = 0.02;
    }
    const SosDelayFit fw = fit_sos_delay(frf, Ts);
    const SosDelayFit fu = fit_sos_delay(unweighted, Ts);
    const auto err = [](const SosDelayFit& f) {
        return std::abs(f.b0 - 370.0) / 370.0 + std::abs(f.a1 - 0.7) / 0.7 +
               std::abs(f.a0 - 289.0) / 289.0;
    };
    CHECK(err(fw) < err(fu));
}

TEST_CASE("fit rejects an underdetermined frequency grid") {
    FrfEstimate tiny;
    tiny.freqs = {1.0, 2.0};
    tiny.G_bla = {cplx(1, 0), cplx(0.5, -0.5)};
    tiny.sigma_nl = {0, 0};
    tiny.W = {1, 1};
    CHECK_THROWS(fit_sos_delay(tiny, 0.01));
}

TEST_CASE("physical parameters from the fitted coefficients") {
    const PlantParams p;
    SosDelayFit fit;
    fit.b0 = 370.0;
    fit.a1 = 0.7;
    fit.a0 = 289.0;
    const PhysicalFit phys = physical_params_from_fit(fit, p);
    CHECK(phys.m_dip == doctest::Approx(370.0 * 1.419012e-4 / 0.035).epsilon(1e-9));
    CHECK(phys.m_dip == doctest::Approx(1.5001).epsilon(1e-3));
    CHECK(phys.d == doctest::Approx(0.7 * 1.419012e-4).epsilon(1e-9));
    CHECK(phys.d == doctest::Approx(9.933e-5).epsilon(1e-3));
    CHECK(phys.consistency_residual ==
          doctest::Approx(std::abs(289.0 - (370.0 - 1.1802e-3 * 9.81 / 1.419012e-4))).epsilon(1e-6));

    SosDelayFit bad = fit;
    bad.b0 = -1.0;
    CHECK_THROWS(physical_params_from_fit(bad, p));
    bad = fit;
    bad.a1 = -0.1;
    CHECK_THROWS(physical_params_from_fit(bad, p));
}
