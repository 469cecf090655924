#include "atslab/subordination.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <limits>
#include <stdexcept>

namespace ats {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Adaptive Gauss-Kronrod with an absolute-tolerance contract. The requested
// relative tolerance stays attainable so the error estimate does not pick up
// panel-splitting noise.
template <class F>
auto integrate_abs(F&& f, double a, double b, double abs_tol, const char* what) {
    double err = 0.0;
    double l1 = 0.0;
    auto v = gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, 12, 1e-10, &err, &l1);
    if (!(err <= std::max(abs_tol, 1e-9 * l1))) {
        throw std::runtime_error(std::string("quadrature did not converge: ") + what);
    }
    return v;
}

} // namespace

Curve Curve::power(double base_at_1, double exponent) {
    Curve c;
    c.kind = Kind::Power;
    c.base = base_at_1;
    c.beta = exponent;
    return c;
}

Curve Curve::table(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("curve table: need >= 2 points");
    for (size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(v[i] > 0.0))
            throw std::invalid_argument("curve table: points must be positive");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw std::invalid_argument("curve table: abscissas must be strictly increasing");
    }
    Curve c;
    c.kind = Kind::Table;
    c.ts = std::move(t);
    c.vals = std::move(v);
    return c;
}

double Curve::operator()(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("curve: t must be > 0");
    if (kind == Kind::Power) return base * std::pow(t, beta);
    // log-log linear, endpoint slopes extrapolated
    const double x = std::log(t);
    size_t hi = 1;
    while (hi + 1 < ts.size() && std::log(ts[hi]) < x) ++hi;
    const double x0 = std::log(ts[hi - 1]), x1 = std::log(ts[hi]);
    const double y0 = std::log(vals[hi - 1]), y1 = std::log(vals[hi]);
    const double w = (x - x0) / (x1 - x0);
    return std::exp(y0 + w * (y1 - y0));
}

TssSpec TssSpec::from_curves(const CurveSpec& c, double alpha) {
    TssSpec s;
    s.alpha = alpha;
    s.sigma = Curve::power(c.sigma_base, c.beta_sigma);
    s.k = Curve::power(c.k_base, c.beta_k);
    return s;
}

TssSpec TssSpec::from_tenors(const std::vector<TenorParams>& tenors, double alpha) {
    if (tenors.size() < 2) {
        if (tenors.empty()) throw std::invalid_argument("tss: no tenors");
        TssSpec s;
        s.alpha = alpha;
        s.sigma = Curve::power(tenors[0].sigma, 0.0);
        s.k = Curve::power(std::max(tenors[0].k, 1e-12), 0.0);
        return s;
    }
    std::vector<double> ts, sv, kv;
    for (const auto& tn : tenors) {
        ts.push_back(tn.maturity);
        sv.push_back(tn.sigma);
        kv.push_back(std::max(tn.k, 1e-12));
    }
    TssSpec s;
    s.alpha = alpha;
    s.sigma = Curve::table(ts, sv);
    s.k = Curve::table(ts, kv);
    return s;
}

std::vector<TssViolation> validate_tss(const TssSpec& spec, const std::vector<double>& t_grid,
                                       double small_tol, double mono_rel_tol) {
    if (t_grid.empty()) throw std::invalid_argument("validate_tss: empty grid");
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw std::invalid_argument("validate_tss: grid must be positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("validate_tss: grid must be sorted increasing");
    }
    const double a = spec.alpha;
    auto cond1 = [&](double t) { double s = spec.sigma(t); return t * s * s; };
    auto cond2 = [&](double t) {
        return t * std::pow(spec.sigma(t), 2.0 * a) / std::pow(spec.k(t), 1.0 - a);
    };
    auto cond3 = [&](double t) { double s = spec.sigma(t); return s * s * spec.k(t); };

    std::vector<TssViolation> out;
    const double t0 = t_grid.front();
    if (!(cond1(t0) < small_tol)) {
        out.push_back({1, t0, "t*sigma_t^2 = " + fmt_sig(cond1(t0), 6) +
                                  " at smallest grid point, not o(1)"});
    }
    if (!(cond2(t0) < small_tol)) {
        out.push_back({2, t0, "t*sigma_t^{2a}/k_t^{1-a} = " + fmt_sig(cond2(t0), 6) +
                                  " at smallest grid point, not o(1)"});
    }
    const double mono_slack = mono_rel_tol;
    for (size_t i = 1; i < t_grid.size(); ++i) {
        const double lo = t_grid[i - 1], hi = t_grid[i];
        if (cond2(hi) < cond2(lo) * (1.0 - mono_slack) - mono_slack) {
            out.push_back({2, hi, "t*sigma_t^{2a}/k_t^{1-a} decreases on (" + fmt_sig(lo, 6) +
                                      ", " + fmt_sig(hi, 6) + ")"});
        }
        if (cond3(hi) < cond3(lo) * (1.0 - mono_slack) - mono_slack) {
            out.push_back({3, hi, "sigma_t^2*k_t decreases on (" + fmt_sig(lo, 6) + ", " +
                                      fmt_sig(hi, 6) + ")"});
        }
    }
    return out;
}

double tss_levy_density(double x, double t, const TssSpec& spec) {
    if (!(x > 0.0)) throw std::domain_error("tss_levy_density: x must be > 0");
    if (!(t > 0.0)) throw std::invalid_argument("tss_levy_density: t must be > 0");
    const double a = spec.alpha;
    const double s2 = spec.sigma(t) * spec.sigma(t);
    const double k = spec.k(t);
    const double pre = t * std::pow(s2, a) / boost::math::tgamma(1.0 - a) *
                       std::pow((1.0 - a) / k, 1.0 - a);
    return pre * std::exp(-(1.0 - a) * x / (s2 * k)) / std::pow(x, 1.0 + a);
}

double tss_gamma_drift(double t, const TssSpec& spec) {
    if (!(t > 0.0)) throw std::invalid_argument("tss_gamma_drift: t must be > 0");
    const double a = spec.alpha;
    const double s2 = spec.sigma(t) * spec.sigma(t);
    const double k = spec.k(t);
    const double c = (1.0 - a) / (s2 * k);
    const double pre = t * std::pow(s2, a) / boost::math::tgamma(1.0 - a) *
                       std::pow((1.0 - a) / k, 1.0 - a);
    // int_0^1 x V(x) dx = pre * int_0^1 x^{-a} e^{-cx} dx; y = x^{1-a} flattens
    // the endpoint: integrand becomes pre/(1-a) * exp(-c y^{1/(1-a)}).
    const double p = 1.0 / (1.0 - a);
    const double scale = pre / (1.0 - a);
    auto f = [&](double y) { return scale * std::exp(-c * std::pow(y, p)); };
    return integrate_abs(f, 0.0, 1.0, 1e-10, "gamma drift");
}

cplx tss_log_laplace(cplx w, double t, const TssSpec& spec) {
    if (!(t > 0.0)) throw std::invalid_argument("tss_log_laplace: t must be > 0");
    const double a = spec.alpha;
    const double s2 = spec.sigma(t) * spec.sigma(t);
    const double k = spec.k(t);
    if (a == 0.0) {
        const double d = t / k;
        const double e = s2 * k;
        const cplx g = 1.0 + w * e;
        if (!(g.real() > 0.0)) throw std::domain_error("tss_log_laplace: Re(1+we) <= 0");
        return -d * std::log(g);
    }
    const double d = t * (1.0 - a) / k;
    const double e = s2 * k / (1.0 - a);
    const cplx g = 1.0 + w * e;
    if (!(g.real() > 0.0)) throw std::domain_error("tss_log_laplace: Re(1+we) <= 0");
    return (d / a) * (1.0 - std::pow(g, a));
}

cplx tss_exponent_by_integral(double u, double t, const TssSpec& spec) {
    if (!(t > 0.0)) throw std::invalid_argument("tss_exponent_by_integral: t must be > 0");
    if (u == 0.0) return {0.0, 0.0};
    const double a = spec.alpha;
    const double s2 = spec.sigma(t) * spec.sigma(t);
    const double k = spec.k(t);
    const double c = (1.0 - a) / (s2 * k);
    const double pre = t * std::pow(s2, a) / boost::math::tgamma(1.0 - a) *
                       std::pow((1.0 - a) / k, 1.0 - a);

    // (0,1]: (e^{iux}-1) x^{-1-a} e^{-cx}; substitute y = x^{1-a} so the
    // integrand tends to iu * pre / (1-a) at zero.
    const double p = 1.0 / (1.0 - a);
    const double scale = pre / (1.0 - a);
    auto near_part = [&](double y) {
        const double x = std::pow(y, p);
        const cplx ratio = expm1_cplx(cplx(0.0, u * x)) / x; // -> iu at 0
        return scale * ratio * std::exp(-c * x);
    };
    auto near_re = [&](double y) { return near_part(y).real(); };
    auto near_im = [&](double y) { return near_part(y).imag(); };
    const cplx near(integrate_abs(near_re, 0.0, 1.0, 5e-9, "tss exponent near"),
                    integrate_abs(near_im, 0.0, 1.0, 5e-9, "tss exponent near"));

    // (1,inf): exponentially tempered; boost maps the infinite limit.
    auto far_part = [&](double x) {
        return pre * expm1_cplx(cplx(0.0, u * x)) * std::exp(-c * x) / std::pow(x, 1.0 + a);
    };
    auto far_re = [&](double x) { return far_part(x).real(); };
    auto far_im = [&](double x) { return far_part(x).imag(); };
    const double inf = std::numeric_limits<double>::infinity();
    const cplx far(integrate_abs(far_re, 1.0, inf, 5e-9, "tss exponent far"),
                   integrate_abs(far_im, 1.0, inf, 5e-9, "tss exponent far"));
    return near + far;
}

double GenericTriplet::small_jump_mass() const {
    // tanh-sinh tolerates the x^{-alpha} endpoint singularity of the density.
    // Points so close to zero that the density overflows carry no mass for an
    // integrable singularity; treat them as zero.
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    auto f = [&](double x) {
        const double fx = x * levy_density(x);
        return std::isfinite(fx) ? fx : 0.0;
    };
    const double v = ts.integrate(f, 0.0, 1.0, 1e-10, &err);
    if (!std::isfinite(v) || !(err <= 1e-8 * (1.0 + std::abs(v))))
        throw std::runtime_error("quadrature did not converge: small jump mass");
    return v;
}

bool GenericTriplet::subordinator_conditions(std::string* why) const {
    if (diffusion != 0.0) {
        if (why) *why = "diffusion term is nonzero";
        return false;
    }
    // support on (0, inf): sample the density on the negative axis
    for (double x : {-2.0, -1.0, -0.5, -1e-3}) {
        if (levy_density(x) != 0.0) {
            if (why) *why = "levy measure charges the negative axis";
            return false;
        }
    }
    try {
        double tail_err = 0.0;
        const double tail = gauss_kronrod<double, 15>::integrate(
            [&](double x) { return levy_density(x); }, 1.0,
            std::numeric_limits<double>::infinity(), 12, 1e-9, &tail_err);
        const double total = small_jump_mass() + tail;
        if (!std::isfinite(total) || !(tail_err < 1e-6 * (1.0 + tail))) {
            if (why) *why = "int (|x| ^ 1) nu(dx) does not converge";
            return false;
        }
    } catch (const std::runtime_error&) {
        if (why) *why = "int (|x| ^ 1) nu(dx) does not converge";
        return false;
    }
    return true;
}

GenericTriplet tss_triplet(double t, const TssSpec& spec) {
    GenericTriplet tr;
    tr.diffusion = 0.0;
    tr.levy_density = [t, spec](double x) {
        return x > 0.0 ? tss_levy_density(x, t, spec) : 0.0;
    };
    tr.drift = tss_gamma_drift(t, spec);
    return tr;
}

RepresentabilityVerdict representability_verdict(const ModelParams& params, double tol) {
    if (params.tenors.size() < 2)
        throw std::invalid_argument("representability_verdict: need >= 2 tenors");
    const auto [mn, mx] = std::minmax_element(
        params.tenors.begin(), params.tenors.end(),
        [](const TenorParams& l, const TenorParams& r) { return l.eta < r.eta; });
    double mean = 0.0;
    for (const auto& tn : params.tenors) mean += tn.eta;
    mean /= static_cast<double>(params.tenors.size());

    RepresentabilityVerdict v;
    v.eta_bar = mean;
    v.eta_spread = (mx->eta - mn->eta) / std::max(std::abs(mean), 1e-300);
    if (v.eta_spread <= tol) {
        v.representable = true;
        v.a = 1.0;
        v.b = -(0.5 + mean);
    } else {
        v.representable = false;
        v.witness_t1 = std::min(mn->maturity, mx->maturity);
        v.witness_t2 = std::max(mn->maturity, mx->maturity);
    }
    return v;
}

CoefficientPath CoefficientPath::constant(double a0, double b0, double c0) {
    CoefficientPath p;
    p.a = [a0](double) { return a0; };
    p.b = [b0](double) { return b0; };
    p.c = [c0](double) { return c0; };
    return p;
}

double independence_gap(double s, double t, cplx u1, cplx u2, const CoefficientPath& path,
                        const TssSpec& spec) {
    if (!(0.0 < s && s < t)) throw std::invalid_argument("independence_gap: need 0 < s < t");
    const double as = path.a(s), at = path.a(t);
    const double bs = path.b(s), bt = path.b(t);
    if (!(as > 0.0 && at > 0.0)) throw std::invalid_argument("independence_gap: a must be > 0");

    const cplx i(0.0, 1.0);
    const cplx theta1 = i * u1 * (bt - bs) - 0.5 * u1 * u1 * (at - as);
    const cplx theta2 = i * u2 * bs - 0.5 * u2 * u2 * as;
    const cplx theta_inc = i * u1 * bt - 0.5 * u1 * u1 * at;

    const cplx inc = std::exp(tss_log_laplace(-theta_inc, t, spec) -
                              tss_log_laplace(-theta_inc, s, spec));
    const cplx lhs = inc * std::exp(tss_log_laplace(-(theta1 + theta2), s, spec));
    const cplx rhs = inc * std::exp(tss_log_laplace(-theta1, s, spec)) *
                     std::exp(tss_log_laplace(-theta2, s, spec));
    return std::abs(lhs - rhs);
}

} // namespace ats
