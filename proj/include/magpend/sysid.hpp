#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "magpend/plant.hpp"

namespace magpend {

// Random-phase multisine design: flat magnitude on the exact DFT bins inside
// [f_min, f_max], phases from a seeded generator, scaled to the target RMS.
struct MultisineConfig {
    double f_min = 0.1;  // Hz, first excited bin (DC cannot be excited)
    double f_max = 10.0; // Hz
    double fs = 100.0;   // Hz
    int N = 1000;        // samples per period
    int r = 10;          // realizations
    int p_total = 10;    // recorded periods
    int p_discard = 4;   // transient periods discarded
    double amp = 0.02;   // RMS amplitude (rad)

    void validate() const;                  // throws std::invalid_argument
    std::vector<int> excited_bins() const;  // DFT bin indices, 1..N/2
};

std::vector<double> design_multisine(const MultisineConfig& cfg, std::uint64_t seed);

// DFT of each period (scaled by 1/N), averaged bin-wise. Returns N/2+1 bins.
std::vector<std::complex<double>> average_periods(const std::vector<std::vector<double>>& periods);

struct FrfEstimate {
    std::vector<double> freqs;                 // Hz, excited bins only
    std::vector<std::complex<double>> G_bla;   // best linear approximator
    std::vector<double> sigma_nl;              // std dev of the mean, per bin
    std::vector<double> W;                     // fit weights in (0,1]
};

// Per-realization ETFE mean and sample standard deviation of the mean.
// U_spectra/Y_spectra are r x bins, already restricted to the excited bins.
FrfEstimate estimate_bla(const std::vector<std::vector<std::complex<double>>>& U_spectra,
                         const std::vector<std::vector<std::complex<double>>>& Y_spectra,
                         const std::vector<double>& freqs);

// W_k = 1 / (1 + (sigma_k/|G_k|)/rho), rho = median relative uncertainty.
// All-zero sigma maps to W = 1 everywhere.
std::vector<double> weights_from_sigma(const std::vector<double>& sigma_nl,
                                       const std::vector<std::complex<double>>& G_bla);

// G(s) = e^{-sT} b0 / (s^2 + a1 s + a0)
struct SosDelayFit {
    double b0 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
    double T = 0.0;        // s
    double residual = 0.0; // weighted squared fit residual at the optimum
};

// Weighted fit by delay grid search (T in [0, 5 Ts], step Ts/10) with Levy
// linearization and Sanathanan-Koerner reweighting at each grid point.
SosDelayFit fit_sos_delay(const FrfEstimate& frf, double Ts);

struct PhysicalFit {
    double d;                     // N*m*s/rad
    double m_dip;                 // A*m^2
    double consistency_residual;  // |a0 - (b0 - eta*g/J)|
};

// Map (b0, a1) of the actuator-only reduction back to d and |m|:
// m_dip = b0*J/b_mag, d = a1*J. Throws on non-physical (negative) estimates.
PhysicalFit physical_params_from_fit(const SosDelayFit& fit, const PlantParams& p);

}  // namespace magpend
