#include "atslab/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "atslab/least_squares.hpp"
#include "atslab/pricing.hpp"

namespace ats {

namespace {

double atm_market_iv(const Smile& smile) {
    double best = smile.points.front().iv;
    double dist = std::abs(std::log(smile.points.front().strike / smile.forward));
    for (const auto& p : smile.points) {
        const double d = std::abs(std::log(p.strike / smile.forward));
        if (d < dist) {
            dist = d;
            best = p.iv;
        }
    }
    return best;
}

constexpr double kPenalty = 1e3;

// IV residual vector for one smile at (sigma, k, eta). Pricing failures map to
// a flat penalty so the optimizer backs away from inadmissible regions.
std::vector<double> iv_residuals(const Smile& smile, double alpha, double sigma, double k,
                                 double eta) {
    std::vector<double> r(smile.points.size(), kPenalty);
    TenorParams tn;
    tn.maturity = smile.maturity;
    tn.sigma = sigma;
    tn.k = k;
    tn.eta = eta;
    try {
        tn.phi = martingale_drift(sigma, k, eta, alpha, smile.maturity);
        for (std::size_t i = 0; i < smile.points.size(); ++i) {
            r[i] = model_iv(smile.points[i].strike, smile, tn, alpha) - smile.points[i].iv;
            if (!std::isfinite(r[i])) r[i] = kPenalty;
        }
    } catch (const std::exception&) {
        return std::vector<double>(smile.points.size(), kPenalty);
    }
    return r;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& body) {
    const int nt = std::min<int>(resolve_threads(threads), static_cast<int>(count));
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::vector<std::exception_ptr> errors(nt);
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = next++; i < count; i = next++) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

double model_iv(double strike, const Smile& smile, const TenorParams& tenor, double alpha) {
    ModelParams m;
    m.alpha = alpha;
    m.tenors = {tenor};
    EuropeanOption o;
    o.strike = strike;
    o.maturity = smile.maturity;
    o.forward = smile.forward;
    o.discount = smile.discount;
    o.is_call = strike >= smile.forward; // invert the OTM side
    return implied_vol(fourier_price(o, m, PricingGrid{}), o);
}

TenorFit calibrate_tenor(const Smile& smile, double alpha, const CalibInit& init,
                         const CalibBounds& bounds) {
    if (smile.points.size() < 4)
        throw std::invalid_argument("calibrate_tenor: need >= 4 quotes for a 3-parameter fit");

    const double sigma0 =
        std::clamp(init.sigma > 0.0 ? init.sigma : atm_market_iv(smile), bounds.sigma_lo,
                   bounds.sigma_hi);
    const double k0 = std::clamp(init.k, bounds.k_lo, bounds.k_hi);
    const double eta0 = std::clamp(init.eta, bounds.eta_lo, bounds.eta_hi);

    const std::vector<std::array<double, 3>> starts = {
        {sigma0, k0, eta0},
        {0.7 * sigma0, 0.2 * k0, 0.4 * eta0},
        {1.3 * sigma0, 5.0 * k0, 2.5 * eta0},
        {sigma0, 0.2 * k0, 2.5 * eta0},
        {sigma0, 5.0 * k0, 0.4 * eta0},
    };

    LmOptions opts;
    opts.lower = {bounds.sigma_lo, bounds.k_lo, bounds.eta_lo};
    opts.upper = {bounds.sigma_hi, bounds.k_hi, bounds.eta_hi};
    ResidualFn fn = [&](const std::vector<double>& x) {
        return iv_residuals(smile, alpha, x[0], x[1], x[2]);
    };

    std::optional<LmResult> best;
    for (const auto& s : starts) {
        LmResult res = levenberg_marquardt(fn, {s[0], s[1], s[2]}, opts);
        if (!std::isfinite(res.mse)) continue;
        if (!best || res.mse < best->mse) best = res;
    }
    if (!best) throw std::runtime_error("calibrate_tenor: every start failed");

    TenorFit fit;
    fit.params.maturity = smile.maturity;
    fit.params.sigma = best->x[0];
    fit.params.k = best->x[1];
    fit.params.eta = best->x[2];
    fit.params.phi =
        martingale_drift(fit.params.sigma, fit.params.k, fit.params.eta, alpha, smile.maturity);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) fit.covariance[i][j] = best->covariance[i][j];
    fit.mse = best->mse;
    fit.n_quotes = static_cast<int>(smile.points.size());
    fit.converged = best->converged;
    return fit;
}

std::vector<TenorFit> calibrate_surface(const Surface& surface, double alpha,
                                        const CalibInit& init, const CalibBounds& bounds,
                                        int threads) {
    if (surface.smiles.empty()) throw std::invalid_argument("calibrate_surface: empty surface");
    std::vector<TenorFit> fits(surface.smiles.size());
    parallel_for(surface.smiles.size(), threads, [&](std::size_t i) {
        fits[i] = calibrate_tenor(surface.smiles[i], alpha, init, bounds);
    });
    return fits;
}

ConstantEtaFit calibrate_tenor_constant_eta(const Surface& surface, double alpha,
                                            double eta_init, const CalibBounds& bounds,
                                            int threads, const std::vector<TenorFit>* free_fits) {
    if (surface.smiles.empty())
        throw std::invalid_argument("calibrate_tenor_constant_eta: empty surface");
    ConstantEtaFit out;
    if (surface.smiles.size() == 1) {
        // Degenerate case: one maturity, eta unconstrained.
        CalibInit init;
        if (eta_init > 0.0) init.eta = eta_init;
        out.tenors = {calibrate_tenor(surface.smiles[0], alpha, init, bounds)};
        out.eta = out.tenors[0].params.eta;
        return out;
    }

    // Free per-tenor fits anchor the inner warm starts. They stay fixed across
    // outer iterations so the pooled objective is a pure function of eta.
    std::vector<TenorFit> base;
    if (free_fits && free_fits->size() == surface.smiles.size()) {
        base = *free_fits;
    } else {
        base = calibrate_surface(surface, alpha, {}, bounds, threads);
    }

    LmOptions opts2;
    opts2.lower = {bounds.sigma_lo, bounds.k_lo};
    opts2.upper = {bounds.sigma_hi, bounds.k_hi};

    // Tenors enter the joint objective weighted by squared ATM vega (~ T per
    // IV point), which makes the pooled IV criterion consistent with a
    // price-space fit across maturities. Reported per-tenor MSEs stay plain.
    std::vector<double> tenor_w(surface.smiles.size());
    double total_w = 0.0;
    for (std::size_t i = 0; i < surface.smiles.size(); ++i) {
        tenor_w[i] =
            static_cast<double>(surface.smiles[i].points.size()) * surface.smiles[i].maturity;
        total_w += tenor_w[i];
    }

    auto pooled_mse = [&](double eta, std::vector<LmResult>* keep) -> double {
        std::vector<LmResult> results(surface.smiles.size());
        parallel_for(surface.smiles.size(), threads, [&](std::size_t i) {
            const Smile& smile = surface.smiles[i];
            ResidualFn fn = [&](const std::vector<double>& x) {
                return iv_residuals(smile, alpha, x[0], x[1], eta);
            };
            // Second start rescales k against the eta change; matching the
            // skew cumulant needs sigma^2 k (eta+1/2) roughly preserved.
            const double sig0 = base[i].params.sigma;
            const double k_resc = std::clamp(base[i].params.k *
                                                 (base[i].params.eta + 0.5) / (eta + 0.5),
                                             opts2.lower[1], opts2.upper[1]);
            LmResult r1 = levenberg_marquardt(fn, {sig0, base[i].params.k}, opts2);
            LmResult r2 = levenberg_marquardt(fn, {sig0, k_resc}, opts2);
            results[i] = (std::isfinite(r2.mse) && r2.mse < r1.mse) ? r2 : r1;
        });
        double ssr = 0.0;
        for (std::size_t i = 0; i < results.size(); ++i) ssr += results[i].mse * tenor_w[i];
        if (keep) *keep = std::move(results);
        return ssr / total_w;
    };

    double init = eta_init;
    if (!(init > 0.0)) {
        std::vector<double> etas;
        for (const auto& f : base) etas.push_back(f.params.eta);
        std::sort(etas.begin(), etas.end());
        init = etas[etas.size() / 2];
    }
    const double lo = std::log(bounds.eta_lo), hi = std::log(bounds.eta_hi);
    const double mid = std::log(std::clamp(init, bounds.eta_lo, bounds.eta_hi));
    const double a = std::max(lo, mid - 3.0), b = std::min(hi, mid + 3.0);
    const auto obj = [&](double log_eta) { return pooled_mse(std::exp(log_eta), nullptr); };
    const auto r = boost::math::tools::brent_find_minima(obj, a, b, 24);

    out.eta = std::exp(r.first);
    std::vector<LmResult> inner;
    pooled_mse(out.eta, &inner);
    out.tenors.resize(surface.smiles.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
        TenorFit& fit = out.tenors[i];
        fit.params.maturity = surface.smiles[i].maturity;
        fit.params.sigma = inner[i].x[0];
        fit.params.k = inner[i].x[1];
        fit.params.eta = out.eta;
        fit.params.phi = martingale_drift(fit.params.sigma, fit.params.k, out.eta, alpha,
                                          fit.params.maturity);
        for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d) fit.covariance[c][d] = inner[i].covariance[c][d];
        fit.mse = inner[i].mse;
        fit.n_quotes = static_cast<int>(surface.smiles[i].points.size());
        fit.converged = inner[i].converged;
    }
    return out;
}

std::vector<ThetaPoint> to_theta(const std::vector<TenorFit>& fits) {
    std::vector<ThetaPoint> out;
    out.reserve(fits.size());
    for (const auto& f : fits) {
        const double s2 = f.params.sigma * f.params.sigma;
        ThetaPoint p;
        p.theta = f.params.maturity * s2;
        p.k_hat = f.params.k * s2;
        p.eta_hat = f.params.eta;
        p.var_log_eta = f.covariance[2][2] / (f.params.eta * f.params.eta);
        out.push_back(p);
    }
    return out;
}

} // namespace ats
