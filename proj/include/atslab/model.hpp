#pragma once
#include <string>
#include <vector>

#include "atslab/numeric.hpp"

namespace ats {

// Parameters of one maturity slice. phi is the compensator per unit time that
// makes the exponential of the process a forward-measure martingale.
struct TenorParams {
    double maturity = 0.0; // year fraction
    double sigma = 0.0;
    double k = 0.0;
    double eta = 0.0;
    double phi = 0.0;

    void validate() const;
};

// Power curves sigma_t = sigma_base * t^beta_sigma, k_t = k_base * t^beta_k,
// eta_t = eta_base * t^delta. Used as synthetic ground truth and as the
// generator of per-tenor parameter sets.
struct CurveSpec {
    double sigma_base = 0.2;
    double beta_sigma = 0.0;
    double k_base = 1.0;
    double beta_k = 1.0;
    double eta_base = 0.5;
    double delta = -0.5;

    double sigma_at(double t) const { return sigma_base * std::pow(t, beta_sigma); }
    double k_at(double t) const { return k_base * std::pow(t, beta_k); }
    double eta_at(double t) const { return eta_base * std::pow(t, delta); }

    // Builds a full tenor (phi included) for tempering exponent alpha.
    TenorParams tenor_at(double t, double alpha) const;
};

// The model: tempering exponent alpha plus one parameter set per maturity.
struct ModelParams {
    double alpha = 0.5;
    std::string label; // "NIG" for alpha=1/2, "VG" for alpha=0, free-form otherwise
    std::vector<TenorParams> tenors;

    void validate() const;
    const TenorParams& tenor_for(double maturity) const; // exact match required

    static ModelParams from_curve(const CurveSpec& curve, double alpha,
                                  const std::vector<double>& maturities,
                                  const std::string& label = {});
};

// ln L(u; k, alpha) of the tempered-stable Laplace exponent family:
//   (t/k) ((1-alpha)/alpha) (1 - (1 + u k/(1-alpha))^alpha)    for alpha in (0,1)
//   -(t/k) ln(1 + u k)                                         for alpha = 0
//   -t u (limit)                                               for k -> 0
// Principal branch; requires Re(1 + u k/(1-alpha)) > 0.
cplx log_l(cplx u, double t, double k, double alpha);

// phi such that phi*t = -log_l(eta*sigma^2) and hence ats_log_chf(-i) == 0.
double martingale_drift(double sigma, double k, double eta, double alpha, double t);

// ln E[e^{iu f_t}] = log_l(iu(1/2+eta)sigma^2 + u^2 sigma^2/2; k, alpha) + iu phi t.
cplx ats_log_chf(cplx u, const TenorParams& tenor, double alpha);

// Stationary (Levy) special case: identical formula with time-constant parameters.
cplx lts_log_chf(cplx u, double t, double sigma, double k, double eta, double alpha);

} // namespace ats
