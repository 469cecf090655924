#include "atslab/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace ats {

namespace {
constexpr double kSmallK = 1e-12; // below this, use the k->0 expansion
}

void TenorParams::validate() const {
    if (!(maturity > 0.0)) throw std::invalid_argument("tenor: maturity must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("tenor: sigma must be > 0");
    if (!(k >= 0.0)) throw std::invalid_argument("tenor: k must be >= 0");
    if (!(eta > 0.0)) throw std::invalid_argument("tenor: eta must be > 0");
    if (!std::isfinite(phi)) throw std::invalid_argument("tenor: phi must be finite");
}

TenorParams CurveSpec::tenor_at(double t, double alpha) const {
    if (!(t > 0.0)) throw std::invalid_argument("curve: t must be > 0");
    TenorParams p;
    p.maturity = t;
    p.sigma = sigma_at(t);
    p.k = k_at(t);
    p.eta = eta_at(t);
    p.phi = martingale_drift(p.sigma, p.k, p.eta, alpha, t);
    return p;
}

void ModelParams::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("model: alpha must be in [0,1)");
    if (tenors.empty()) throw std::invalid_argument("model: needs at least one tenor");
    double prev = 0.0;
    for (const auto& tn : tenors) {
        tn.validate();
        if (!(tn.maturity > prev))
            throw std::invalid_argument("model: tenor maturities must be strictly increasing");
        prev = tn.maturity;
    }
}

const TenorParams& ModelParams::tenor_for(double maturity) const {
    for (const auto& tn : tenors) {
        if (std::abs(tn.maturity - maturity) <= 1e-12 * std::max(1.0, maturity)) return tn;
    }
    throw std::invalid_argument("model: no tenor at T=" + fmt_sig(maturity, 10) +
                                " (per-maturity model, no interpolation)");
}

ModelParams ModelParams::from_curve(const CurveSpec& curve, double alpha,
                                    const std::vector<double>& maturities,
                                    const std::string& label) {
    ModelParams m;
    m.alpha = alpha;
    m.label = label.empty() ? (alpha == 0.0 ? "VG" : (alpha == 0.5 ? "NIG" : "ATS")) : label;
    m.tenors.reserve(maturities.size());
    for (double t : maturities) m.tenors.push_back(curve.tenor_at(t, alpha));
    m.validate();
    return m;
}

cplx log_l(cplx u, double t, double k, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("log_l: alpha must be in [0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("log_l: t must be > 0");
    if (!(k >= 0.0)) throw std::invalid_argument("log_l: k must be >= 0");

    if (k < kSmallK) {
        // -t u + t u^2 k / 2 + O(k^2): exact at k=0, second order below the switch
        return -t * u * (1.0 - 0.5 * u * k);
    }
    if (alpha == 0.0) {
        const cplx w = 1.0 + u * k;
        if (!(w.real() > 0.0)) throw std::domain_error("log_l: branch cut hit, Re(1+uk) <= 0");
        return -(t / k) * std::log(w);
    }
    const cplx w = 1.0 + u * k / (1.0 - alpha);
    if (!(w.real() > 0.0))
        throw std::domain_error("log_l: branch cut hit, Re(1+uk/(1-alpha)) <= 0");
    return (t / k) * ((1.0 - alpha) / alpha) * (1.0 - std::pow(w, alpha));
}

double martingale_drift(double sigma, double k, double eta, double alpha, double t) {
    const cplx v = log_l(cplx(eta * sigma * sigma, 0.0), t, k, alpha);
    return -v.real() / t;
}

cplx ats_log_chf(cplx u, const TenorParams& tenor, double alpha) {
    const double s2 = tenor.sigma * tenor.sigma;
    const cplx arg = cplx(0.0, 1.0) * u * (0.5 + tenor.eta) * s2 + 0.5 * u * u * s2;
    return log_l(arg, tenor.maturity, tenor.k, alpha) +
           cplx(0.0, 1.0) * u * tenor.phi * tenor.maturity;
}

cplx lts_log_chf(cplx u, double t, double sigma, double k, double eta, double alpha) {
    TenorParams tn;
    tn.maturity = t;
    tn.sigma = sigma;
    tn.k = k;
    tn.eta = eta;
    tn.phi = martingale_drift(sigma, k, eta, alpha, t);
    return ats_log_chf(u, tn, alpha);
}

} // namespace ats
