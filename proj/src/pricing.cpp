#include "atslab/pricing.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <stdexcept>

namespace ats {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// Largest damping for which the contour u = v - i(1+a) keeps
// Re(1 + z k/(1-alpha)) > 0 at its minimum v = 0.
double max_admissible_damping(const TenorParams& tn, double alpha) {
    const double s2k = tn.sigma * tn.sigma * tn.k;
    if (s2k < 1e-14) return 1e6; // Gaussian limit, entire chf
    const double h = 0.5 + tn.eta;
    const double x_plus = h + std::sqrt(h * h + 2.0 * (1.0 - alpha) / s2k);
    return x_plus - 1.0;
}

// Second cumulant of f_T: Var = T sigma^2 (1 + sigma^2 k (eta + 1/2)^2).
double second_cumulant(const TenorParams& tn) {
    const double s2 = tn.sigma * tn.sigma;
    const double h = 0.5 + tn.eta;
    return tn.maturity * s2 * (1.0 + s2 * tn.k * h * h);
}

double black_call_forward(double f, double k, double stdev) {
    if (stdev <= 0.0) return std::max(f - k, 0.0);
    const double d1 = std::log(f / k) / stdev + 0.5 * stdev;
    const double d2 = d1 - stdev;
    return f * norm_cdf(d1) - k * norm_cdf(d2);
}

// Damped transform of the normalized call value, with a matched-variance
// Black control variate: psi(v) = [phi_model - phi_black](v - (1+a)i) / D(v).
// The Black part is added back in closed form, so the numerical integral only
// carries the non-Gaussian correction and dies quickly when the model is
// close to Black (small k, degenerate trial parameters, short maturities).
struct Contour {
    double a = 0.75;
    const TenorParams* tn = nullptr;
    double alpha = 0.0;
    double c2 = 0.0; // control-variate variance

    cplx phi_model(double v) const {
        return std::exp(ats_log_chf(cplx(v, -(1.0 + a)), *tn, alpha));
    }
    cplx phi_black(double v) const {
        const cplx u(v, -(1.0 + a));
        return std::exp(-0.5 * c2 * (u * u + cplx(0.0, 1.0) * u));
    }
    cplx denom(double v) const { return {a * a + a - v * v, (2.0 * a + 1.0) * v}; }
    double psi_mag(double v) const {
        return (std::abs(phi_model(v)) + std::abs(phi_black(v))) / std::abs(denom(v));
    }
    double diff_mag(double v) const {
        return std::abs(phi_model(v) - phi_black(v)) / std::abs(denom(v));
    }
    double integrand(double v, double kappa) const {
        const cplx osc(std::cos(v * kappa), -std::sin(v * kappa));
        return (osc * (phi_model(v) - phi_black(v)) / denom(v)).real();
    }
};

double integrate_adaptive(const Contour& c, double kappa, double v_cap, int max_segments) {
    const double abs_tol = 1e-10;
    // The model's residual phase grows like v*(phi T - kappa); panels stay
    // within a few oscillation periods so the Kronrod estimate converges
    // without deep splits.
    const double freq = std::max(std::abs(kappa - c.tn->phi * c.tn->maturity), 1e-12);
    const double width_cap = std::max(1024.0, 25.0 / freq);
    double acc = 0.0;
    double lo = 0.0;
    double width = 16.0;
    int quiet = 0;
    auto f = [&](double v) { return c.integrand(v, kappa); };
    for (int seg = 0; seg < max_segments && lo < v_cap; ++seg) {
        const double hi = std::min(lo + width, v_cap);
        // One Kronrod probe first; refine adaptively only when its error
        // estimate matters at the segment's own scale.
        double err = 0.0, l1 = 0.0;
        double part = gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &err, &l1);
        if (err > std::max(1e-11, 1e-9 * l1)) {
            const double tol = std::clamp(5e-11 / std::max(l1, 1e-300), 1e-12, 1e-2);
            part = gauss_kronrod<double, 15>::integrate(f, lo, hi, 8, tol, &err);
        }
        acc += part;
        lo = hi;
        if (width < width_cap) width *= 2.0;

        // Tail bound from the control-variate difference envelope (probed at
        // two points against phase zeros), with an oscillation credit.
        const double env = std::max(c.diff_mag(lo), c.diff_mag(lo * 1.37 + 1.0));
        const double tail = env * std::min(lo, 2.0 / freq);
        if (tail < abs_tol && std::abs(part) < abs_tol) {
            if (++quiet >= 2) break;
        } else {
            quiet = 0;
        }
    }
    return acc;
}

double integrate_fixed(const Contour& c, double kappa, double v_max, int n_nodes) {
    // Dyadic panels, 64-point Gauss-Legendre each, within the node budget.
    const int per_panel = 64;
    double acc = 0.0;
    double lo = 0.0, width = 16.0;
    int used = 0;
    while (lo < v_max && used + per_panel <= n_nodes) {
        const double hi = std::min(lo + width, v_max);
        acc += gauss<double, 64>::integrate([&](double v) { return c.integrand(v, kappa); }, lo,
                                            hi);
        used += per_panel;
        lo = hi;
        width *= 2.0;
    }
    return acc;
}

double auto_truncation(const Contour& c) {
    double v = 64.0;
    while (v < 2.0e6 && c.psi_mag(v) * v > 1e-11) v *= 2.0;
    return v;
}

} // namespace

void EuropeanOption::validate() const {
    if (!(strike > 0.0)) throw std::invalid_argument("option: strike must be > 0");
    if (!(maturity > 0.0)) throw std::invalid_argument("option: maturity must be > 0");
    if (!(forward > 0.0)) throw std::invalid_argument("option: forward must be > 0");
    if (!(discount > 0.0 && discount <= 1.0))
        throw std::invalid_argument("option: discount must be in (0,1]");
}

double fourier_price(const EuropeanOption& opt, const ModelParams& params,
                     const PricingGrid& grid) {
    opt.validate();
    params.validate();
    const TenorParams& tn = params.tenor_for(opt.maturity);
    const double kappa = std::log(opt.strike / opt.forward);

    auto finish = [&](double call) {
        const double lb = std::max(opt.discount * (opt.forward - opt.strike), 0.0);
        const double ub = opt.discount * opt.forward;
        const double slack = 1e-6 * opt.discount * opt.forward;
        if (call < lb - slack || call > ub + slack)
            throw std::runtime_error("fourier_price: result violates static bounds");
        call = std::clamp(call, lb, ub);
        if (opt.is_call) return call;
        return call - opt.discount * (opt.forward - opt.strike);
    };

    // Strikes so extreme that the damped transform is numerically void.
    if (kappa < -25.0) return finish(opt.discount * (opt.forward - opt.strike));
    if (kappa > 50.0) return finish(0.0);

    Contour c;
    c.tn = &tn;
    c.alpha = params.alpha;
    c.c2 = second_cumulant(tn);

    // Total stdev beyond ~500% vol: the damped transform has untenable dynamic
    // range and every admissible model is price-indistinguishable from its
    // matched-variance Black proxy at this scale.
    if (c.c2 > 25.0) return finish(opt.discount * opt.forward *
                                   black_call_forward(1.0, std::exp(kappa), std::sqrt(c.c2)));

    const double a_max = max_admissible_damping(tn, params.alpha);
    c.a = std::min(grid.damping, 0.9 * a_max);
    if (!(c.a > 0.02))
        throw std::domain_error("fourier_price: no admissible damping for these parameters");

    double integral;
    if (grid.rule == "fixed-gl") {
        const double v_max = grid.truncation > 0.0 ? grid.truncation : auto_truncation(c);
        integral = integrate_fixed(c, kappa, v_max, grid.n_nodes);
    } else if (grid.rule == "adaptive") {
        const double v_cap = grid.truncation > 0.0 ? grid.truncation : 2.0e6;
        integral = integrate_adaptive(c, kappa, v_cap, std::max(grid.n_nodes / 32, 16));
    } else {
        throw std::invalid_argument("fourier_price: unknown quadrature rule " + grid.rule);
    }

    const double cv = black_call_forward(1.0, std::exp(kappa), std::sqrt(c.c2));
    const double call =
        opt.discount * opt.forward * (cv + std::exp(-c.a * kappa) * integral / kPi);
    return finish(call);
}

double black_price(const EuropeanOption& opt, double sigma_bs) {
    opt.validate();
    if (!(sigma_bs >= 0.0)) throw std::invalid_argument("black_price: sigma must be >= 0");
    const double stdev = sigma_bs * std::sqrt(opt.maturity);
    const double call = opt.discount * black_call_forward(opt.forward, opt.strike, stdev);
    if (opt.is_call) return call;
    return call - opt.discount * (opt.forward - opt.strike);
}

double implied_vol(double price, const EuropeanOption& opt) {
    opt.validate();
    const double lb = opt.is_call
                          ? opt.discount * std::max(opt.forward - opt.strike, 0.0)
                          : opt.discount * std::max(opt.strike - opt.forward, 0.0);
    const double ub = opt.is_call ? opt.discount * opt.forward : opt.discount * opt.strike;
    if (!(price > lb))
        throw std::invalid_argument("implied_vol: price at or below intrinsic bound " +
                                    fmt_sig(lb, 10));
    if (!(price < ub))
        throw std::invalid_argument("implied_vol: price at or above upper bound " +
                                    fmt_sig(ub, 10));

    const double tol = 1e-10;
    const int max_iter = 200;
    double lo = 1e-9, hi = 1.0;
    while (black_price(opt, hi) < price && hi < 1e4) hi *= 2.0;

    double sigma = std::clamp(std::sqrt(2.0 * kPi / opt.maturity) * price /
                                  (opt.discount * opt.forward),
                              lo, hi); // Brenner-Subrahmanyam seed
    for (int it = 0; it < max_iter; ++it) {
        const double f = black_price(opt, sigma) - price;
        if (std::abs(f) <= tol) return sigma;
        if (f > 0.0) hi = sigma; else lo = sigma;
        const double stdev = sigma * std::sqrt(opt.maturity);
        const double d1 = std::log(opt.forward / opt.strike) / stdev + 0.5 * stdev;
        const double vega =
            opt.discount * opt.forward * norm_pdf(d1) * std::sqrt(opt.maturity);
        double next = vega > 1e-300 ? sigma - f / vega : 0.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        sigma = next;
    }
    throw std::runtime_error("implied_vol: no convergence in 200 iterations");
}

double bs_delta(const EuropeanOption& opt, double sigma_bs) {
    opt.validate();
    if (!(sigma_bs > 0.0)) throw std::invalid_argument("bs_delta: sigma must be > 0");
    const double stdev = sigma_bs * std::sqrt(opt.maturity);
    const double d1 = std::log(opt.forward / opt.strike) / stdev + 0.5 * stdev;
    return norm_cdf(d1);
}

double atm_skew(const ModelParams& params, double maturity, double bump,
                const PricingGrid& grid) {
    if (!(bump > 0.0 && bump < 0.5)) throw std::invalid_argument("atm_skew: bad bump");
    // IV is invariant under joint scaling of (F, K); price at unit forward.
    auto iv_at = [&](double m) {
        EuropeanOption o;
        o.forward = 1.0;
        o.discount = 1.0;
        o.maturity = maturity;
        o.strike = std::exp(m);
        o.is_call = true;
        return implied_vol(fourier_price(o, params, grid), o);
    };
    return (iv_at(bump) - iv_at(-bump)) / (2.0 * bump);
}

} // namespace ats
