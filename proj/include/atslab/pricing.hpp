#pragma once
#include <string>

#include "atslab/model.hpp"

namespace ats {

// Damped-contour Fourier quadrature controls. truncation = 0 picks the cutoff
// from the characteristic-function decay; rule is "adaptive" (Gauss-Kronrod
// panels, node budget ~ 8x n_nodes) or "fixed-gl" (composite Gauss-Legendre,
// exactly the dyadic panels that fit in n_nodes).
struct PricingGrid {
    double damping = 0.75;
    double truncation = 0.0;
    int n_nodes = 2048;
    std::string rule = "adaptive";
};

struct EuropeanOption {
    double strike = 0.0;
    double maturity = 0.0;
    bool is_call = true;
    double forward = 0.0;
    double discount = 1.0;

    void validate() const;
};

// Damped Fourier (Carr-Madan) price off exp(ats_log_chf). Puts via parity.
double fourier_price(const EuropeanOption& opt, const ModelParams& params,
                     const PricingGrid& grid = {});

// Black on the forward, times the discount factor. sigma_bs = 0 gives
// discounted intrinsic.
double black_price(const EuropeanOption& opt, double sigma_bs);

// Inverts black_price to 1e-10 absolute on price (bracketing + safeguarded
// Newton, max 200 iterations). Throws if the price violates the static bounds.
double implied_vol(double price, const EuropeanOption& opt);

// Forward (undiscounted) Black delta N(d1); the call-equivalent value is used
// for put quotes too, so one (lo,hi) filter applies to both.
double bs_delta(const EuropeanOption& opt, double sigma_bs);

// ATM implied-volatility skew d(IV)/d(log-moneyness) at K=F by central
// difference with relative strike bump `bump`. Per-strike normalization is
// this value divided by the forward.
double atm_skew(const ModelParams& params, double maturity, double bump = 1e-3,
                const PricingGrid& grid = {});

} // namespace ats
