#pragma once
#include <array>
#include <optional>
#include <vector>

#include "atslab/market_data.hpp"
#include "atslab/model.hpp"

namespace ats {

struct TenorFit {
    TenorParams params;
    std::array<std::array<double, 3>, 3> covariance{}; // (sigma, k, eta) order
    double mse = 0.0;                                  // mean squared IV error
    int n_quotes = 0;
    bool converged = false;
};

struct ThetaPoint {
    double theta = 0.0;   // T sigma_T^2
    double k_hat = 0.0;   // k_T sigma_T^2
    double eta_hat = 0.0; // eta_T
    double var_log_eta = 0.0;
};

struct CalibBounds {
    double sigma_lo = 1e-4, sigma_hi = 5.0;
    double k_lo = 1e-8, k_hi = 1e3;
    double eta_lo = 1e-4, eta_hi = 1e3;
};

struct CalibInit {
    double sigma = 0.0; // 0 -> ATM market IV
    double k = 1.0;
    double eta = 1.0;
};

// Per-maturity least squares of model vs market implied volatilities over
// (sigma, k, eta), phi pinned by the martingale condition each evaluation.
// Multi-start (the given init plus four dispersed points), best objective wins.
TenorFit calibrate_tenor(const Smile& smile, double alpha, const CalibInit& init = {},
                         const CalibBounds& bounds = {});

// All smiles of a surface, optionally in parallel (threads = 0 -> hardware).
std::vector<TenorFit> calibrate_surface(const Surface& surface, double alpha,
                                        const CalibInit& init = {},
                                        const CalibBounds& bounds = {}, int threads = 1);

struct ConstantEtaFit {
    double eta = 0.0;
    std::vector<TenorFit> tenors;
};

// Joint fit with a single eta shared across maturities: outer 1-d search on
// eta, inner per-tenor (sigma, k) fits warm-started from the free fits.
// eta_init = 0 starts from the median free eta; free_fits, when given, must
// align with surface.smiles and saves recomputing them.
ConstantEtaFit calibrate_tenor_constant_eta(const Surface& surface, double alpha,
                                            double eta_init = 0.0,
                                            const CalibBounds& bounds = {}, int threads = 1,
                                            const std::vector<TenorFit>* free_fits = nullptr);

// theta = T sigma^2, k_hat = k sigma^2, eta_hat = eta; var_log_eta by the
// delta method from the eta-eta covariance entry.
std::vector<ThetaPoint> to_theta(const std::vector<TenorFit>& fits);

// Model IV at one strike of a smile (shared by calibration and reporting).
double model_iv(double strike, const Smile& smile, const TenorParams& tenor, double alpha);

} // namespace ats
