#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <limits>

#include "atslab/model.hpp"
#include "atslab/pricing.hpp"

using namespace ats;
using doctest::Approx;

namespace {

ModelParams one_tenor_model(double alpha, double t, double sigma, double k, double eta) {
    TenorParams tn;
    tn.maturity = t;
    tn.sigma = sigma;
    tn.k = k;
    tn.eta = eta;
    tn.phi = martingale_drift(sigma, k, eta, alpha, t);
    ModelParams m;
    m.alpha = alpha;
    m.tenors = {tn};
    return m;
}

ModelParams nig_model(double t, double sigma, double k, double eta) {
    return one_tenor_model(0.5, t, sigma, k, eta);
}

// Independent pricing route: condition on the subordinator value. Given
// Z = z, the log return is Gaussian, so the call value is a Black formula
// mixed over the closed-form Gamma (alpha=0) or inverse Gaussian (alpha=1/2)
// marginal density of Z.
double mixing_price(const EuropeanOption& o, const ModelParams& m) {
    const TenorParams& tn = m.tenors.at(0);
    const double t = tn.maturity;
    const double s2 = tn.sigma * tn.sigma;
    const double mny = o.strike / o.forward;

    auto density = [&](double z) {
        if (m.alpha == 0.0) {
            const double shape = t / tn.k;
            const double scale = s2 * tn.k;
            return std::exp((shape - 1.0) * std::log(z) - z / scale -
                            boost::math::lgamma(shape) - shape * std::log(scale));
        }
        const double mu = t * s2;
        const double lambda = t * t * s2 / tn.k;
        return std::sqrt(lambda / (2.0 * kPi * z * z * z)) *
               std::exp(-lambda * (z - mu) * (z - mu) / (2.0 * mu * mu * z));
    };
    auto conditional_call = [&](double z) {
        const double mu = -(tn.eta + 0.5) * z + tn.phi * t;
        const double sd = std::sqrt(z);
        const double d1 = (mu + z - std::log(mny)) / sd;
        return std::exp(mu + 0.5 * z) * norm_cdf(d1) - mny * norm_cdf(d1 - sd);
    };
    // integrate in log-z so the boundary layer at short maturities resolves
    auto f = [&](double y) {
        const double z = std::exp(y);
        const double v = density(z) * conditional_call(z) * z;
        return std::isfinite(v) ? v : 0.0;
    };
    const double center = std::log(t * s2);
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, center - 40.0, center + 12.0, 12, 1e-10, &err);
    REQUIRE(err < 1e-8);
    return o.discount * o.forward * val;
}

EuropeanOption option(double k, double t, bool call = true, double f = 100.0, double d = 1.0) {
    EuropeanOption o;
    o.strike = k;
    o.maturity = t;
    o.is_call = call;
    o.forward = f;
    o.discount = d;
    return o;
}

double put_direct(const EuropeanOption& o, double sigma) {
    const double stdev = sigma * std::sqrt(o.maturity);
    const double d1 = std::log(o.forward / o.strike) / stdev + 0.5 * stdev;
    const double d2 = d1 - stdev;
    return o.discount * (o.strike * norm_cdf(-d2) - o.forward * norm_cdf(-d1));
}

} // namespace

TEST_CASE("black_price anchors and parity") {
    const EuropeanOption atm = option(100.0, 1.0);
    CHECK(black_price(atm, 0.2) == Approx(7.9655674554057967).epsilon(1e-12));
    CHECK(black_price(option(90.0, 1.0), 0.0) == Approx(10.0)); // intrinsic at sigma=0
    EuropeanOption put = option(110.0, 0.5, false, 100.0, 0.97);
    CHECK(black_price(put, 0.25) == Approx(put_direct(put, 0.25)).epsilon(1e-12));
    CHECK(black_price(option(110.0, 0.5, false, 100.0, 0.97), 0.0) == Approx(0.97 * 10.0));
}

TEST_CASE("fourier_price reaches the Black limit at k -> 0") {
    ModelParams m = nig_model(1.0, 0.2, 1e-8, 1.0);
    const double got = fourier_price(option(100.0, 1.0), m);
    CHECK(std::abs(got - 7.9655674554057967) < 1e-3);

    // implied volatilities across moneyness and maturity recover sigma
    for (double t : {0.1, 1.0}) {
        ModelParams mt = nig_model(t, 0.2, 1e-8, 1.0);
        for (double mny : {0.8, 0.9, 1.0, 1.1, 1.2}) {
            const EuropeanOption o = option(100.0 * mny, t);
            const double iv = implied_vol(fourier_price(o, mt), o);
            CHECK(std::abs(iv - 0.2) <= 1e-3);
        }
    }
}

TEST_CASE("fourier_price matches the conditional-Black mixing oracle") {
    // two model families, three maturities, five strikes each
    for (double alpha : {0.0, 0.5}) {
        for (double t : {1.0 / 52, 0.25, 1.5}) {
            const ModelParams m = one_tenor_model(alpha, t, 0.2, t, 0.5 / std::sqrt(t));
            for (double mny : {0.92, 0.97, 1.0, 1.03, 1.08}) {
                EuropeanOption o = option(100.0 * mny, t, true, 100.0, 0.99);
                const double fp = fourier_price(o, m);
                const double mp = mixing_price(o, m);
                // the pricer targets ~1e-8 of forward in absolute terms
                CHECK(std::abs(fp - mp) <= 2e-6 + 1e-7 * mp);
            }
        }
    }
    // a heavier-tailed parameter point, both families
    for (double alpha : {0.0, 0.5}) {
        const ModelParams m = one_tenor_model(alpha, 0.5, 0.3, 1.2, 1.8);
        for (double k : {70.0, 100.0, 140.0}) {
            EuropeanOption o = option(k, 0.5);
            const double fp = fourier_price(o, m);
            const double mp = mixing_price(o, m);
            CHECK(std::abs(fp - mp) <= 2e-6 + 1e-7 * mp);
        }
    }
}

TEST_CASE("fourier_price handles a general tempering exponent") {
    const ModelParams m = one_tenor_model(0.7, 0.5, 0.25, 0.4, 0.9);
    const double d = 0.99;
    double prev = 1e300;
    for (double k : {85.0, 100.0, 115.0}) {
        const double call = fourier_price(option(k, 0.5, true, 100.0, d), m);
        const double put = fourier_price(option(k, 0.5, false, 100.0, d), m);
        CHECK(call >= std::max(0.0, d * (100.0 - k)));
        CHECK(call <= d * 100.0);
        CHECK(std::abs(call - put - d * (100.0 - k)) <= 1e-10);
        CHECK(call < prev);
        prev = call;
    }
    CHECK(std::abs(std::exp(ats_log_chf({0.0, -1.0}, m.tenors[0], 0.7))) ==
          Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fourier_price static bounds, parity and strike monotonicity") {
    ModelParams m = nig_model(0.25, 0.25, 0.3, 1.2);
    const double d = 0.99;
    double prev = 1e300;
    for (double k : {60.0, 80.0, 95.0, 100.0, 105.0, 120.0, 150.0}) {
        const EuropeanOption c = option(k, 0.25, true, 100.0, d);
        const EuropeanOption p = option(k, 0.25, false, 100.0, d);
        const double call = fourier_price(c, m);
        const double put = fourier_price(p, m);
        CHECK(call >= std::max(0.0, d * (100.0 - k)));
        CHECK(call <= d * 100.0);
        CHECK(std::abs(call - put - d * (100.0 - k)) <= 1e-10);
        CHECK(call <= prev + 1e-9);
        prev = call;
    }
    // zero-strike limit: discounted forward
    const double deep = fourier_price(option(1e-9, 0.25, true, 100.0, d), m);
    CHECK(deep == Approx(d * 100.0).epsilon(1e-9));
}

TEST_CASE("fourier_price is contour- and grid-robust") {
    ModelParams m = nig_model(0.5, 0.2, 0.5, 0.7);
    const EuropeanOption o = option(95.0, 0.5);
    PricingGrid base;
    const double p0 = fourier_price(o, m, base);

    PricingGrid damp;
    damp.damping = 0.3;
    CHECK(fourier_price(o, m, damp) == Approx(p0).epsilon(1e-8));
    damp.damping = 1.5;
    CHECK(fourier_price(o, m, damp) == Approx(p0).epsilon(1e-8));

    PricingGrid fixed;
    fixed.rule = "fixed-gl";
    fixed.truncation = 8192.0;
    const double pf = fourier_price(o, m, fixed);
    PricingGrid fixed2 = fixed;
    fixed2.n_nodes = 4096;
    fixed2.truncation = 16384.0;
    const double pf2 = fourier_price(o, m, fixed2);
    CHECK(std::abs(pf2 - pf) / pf < 1e-6);
    CHECK(pf == Approx(p0).epsilon(1e-7));

    // doubling the budget moves nothing across the default surface either
    const CurveSpec curve;
    for (double t : {1.0 / 52, 0.25, 2.0}) {
        ModelParams ms;
        ms.alpha = 0.5;
        ms.tenors = {curve.tenor_at(t, 0.5)};
        for (double mny : {0.95, 1.0, 1.05}) {
            const EuropeanOption os = option(100.0 * mny, t);
            PricingGrid g1;
            g1.rule = "fixed-gl";
            g1.truncation = 8192.0;
            PricingGrid g2 = g1;
            g2.n_nodes = 4096;
            g2.truncation = 16384.0;
            const double a = fourier_price(os, ms, g1);
            const double b = fourier_price(os, ms, g2);
            CHECK(std::abs(b - a) / std::max(a, 1e-8) < 1e-6);
        }
    }

    PricingGrid bad;
    bad.rule = "simpson";
    CHECK_THROWS_AS(fourier_price(o, m, bad), std::invalid_argument);
}

TEST_CASE("implied_vol round trips and bound errors") {
    const EuropeanOption o = option(105.0, 0.75);
    for (double sigma : {0.05, 0.2, 0.8, 2.5}) {
        CHECK(implied_vol(black_price(o, sigma), o) == Approx(sigma).epsilon(1e-8));
    }
    // near the upper bound the vol is huge but finite
    const double high = implied_vol(0.999 * o.discount * o.forward, o);
    CHECK(high > 5.0);
    CHECK(black_price(o, high) == Approx(0.999 * 100.0).epsilon(1e-9));

    CHECK_THROWS_AS(implied_vol(0.0, o), std::invalid_argument);
    CHECK_THROWS_AS(implied_vol(100.0, o), std::invalid_argument);
    const EuropeanOption itm = option(60.0, 0.75);
    CHECK_THROWS_AS(implied_vol(40.0 - 1e-12, itm), std::invalid_argument); // at intrinsic
}

TEST_CASE("bs_delta conventions") {
    const EuropeanOption atm = option(100.0, 0.25);
    CHECK(bs_delta(atm, 0.2) == Approx(norm_cdf(0.2 * std::sqrt(0.25) / 2.0)).epsilon(1e-12));
    CHECK(bs_delta(atm, 0.2) > 0.5);
    CHECK(bs_delta(option(1e-6, 0.25), 0.2) == Approx(1.0).epsilon(1e-12));
    const double far = bs_delta(option(120.0, 0.25), 0.2);
    CHECK(far > 0.0);
    CHECK(far < 0.1); // filtered out by the (10%, 90%) window
    CHECK_THROWS_AS(bs_delta(atm, 0.0), std::invalid_argument);
}

TEST_CASE("atm_skew: sign, eta monotonicity and bump order") {
    ModelParams m = nig_model(0.25, 0.2, 0.25, 1.0);
    const double s = atm_skew(m, 0.25);
    CHECK(s < 0.0); // equity-like downward skew for eta > 0

    double prev_mag = 0.0;
    for (double eta : {0.05, 0.5, 2.0}) {
        ModelParams me = nig_model(0.25, 0.2, 0.25, eta);
        const double mag = std::abs(atm_skew(me, 0.25));
        CHECK(mag > prev_mag);
        prev_mag = mag;
    }

    const double s1 = atm_skew(m, 0.25, 2e-3);
    const double s2 = atm_skew(m, 0.25, 1e-3);
    CHECK(std::abs(s1 - s2) < 1e-4 * std::abs(s2) + 1e-7); // central difference, O(bump^2)
    CHECK_THROWS_AS(atm_skew(m, 0.25, 0.0), std::invalid_argument);
}

TEST_CASE("option validation errors") {
    CHECK_THROWS_AS(option(0.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(option(100.0, 0.0).validate(), std::invalid_argument);
    EuropeanOption bad_d = option(100.0, 1.0);
    bad_d.discount = 1.5;
    CHECK_THROWS_AS(bad_d.validate(), std::invalid_argument);
    ModelParams m = nig_model(1.0, 0.2, 0.5, 1.0);
    CHECK_THROWS_AS(fourier_price(option(100.0, 0.5), m), std::invalid_argument); // no tenor
}
