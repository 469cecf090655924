#include "atslab/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace ats {

namespace {

// Michael-Schucany-Haas transform with uniform acceptance.
double draw_inverse_gaussian(std::mt19937_64& eng, double mu, double lambda,
                             std::normal_distribution<double>& normal,
                             std::uniform_real_distribution<double>& unif) {
    const double nu = normal(eng);
    const double y = nu * nu;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    if (unif(eng) <= mu / (mu + x)) return x;
    return mu * mu / x;
}

} // namespace

std::mt19937_64 RngSpec::engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> sample_tss_marginal(double t, const TssSpec& spec, std::size_t n,
                                        const RngSpec& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_tss_marginal: t must be > 0");
    if (spec.alpha != 0.0 && spec.alpha != 0.5)
        throw std::invalid_argument("sample_tss_marginal: only alpha in {0, 1/2} is sampled");
    std::vector<double> out;
    out.reserve(n);
    if (n == 0) return out;

    auto eng = rng.engine();
    const double s2 = spec.sigma(t) * spec.sigma(t);
    const double k = spec.k(t);
    if (spec.alpha == 0.0) {
        std::gamma_distribution<double> gamma(t / k, s2 * k);
        for (std::size_t i = 0; i < n; ++i) out.push_back(gamma(eng));
    } else {
        const double mu = t * s2;
        const double lambda = t * t * s2 / k;
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(draw_inverse_gaussian(eng, mu, lambda, normal, unif));
    }
    return out;
}

std::vector<double> sample_ats_marginal(const TenorParams& tenor, double alpha, std::size_t n,
                                        const RngSpec& rng) {
    tenor.validate();
    TssSpec spec;
    spec.alpha = alpha;
    spec.sigma = Curve::power(tenor.sigma, 0.0);
    spec.k = Curve::power(std::max(tenor.k, 1e-12), 0.0);
    std::vector<double> z = sample_tss_marginal(tenor.maturity, spec, n, rng);

    // Gaussian layer from a decorrelated stream so Z draws stay comparable
    // across alpha values.
    RngSpec gauss_rng{rng.seed, rng.stream + 0x9e3779b97f4a7c15ull};
    auto eng = gauss_rng.engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    const double drift = tenor.phi * tenor.maturity;
    for (auto& v : z) {
        const double g = normal(eng);
        v = -(tenor.eta + 0.5) * v + std::sqrt(v) * g + drift;
    }
    return z;
}

McPrice mc_price(const EuropeanOption& opt, const ModelParams& params, std::size_t n,
                 const RngSpec& rng) {
    opt.validate();
    if (n < 2) throw std::invalid_argument("mc_price: need n >= 2");
    const TenorParams& tn = params.tenor_for(opt.maturity);
    const std::vector<double> f = sample_ats_marginal(tn, params.alpha, n, rng);

    const double m = opt.strike / opt.forward;
    double sum = 0.0, sumsq = 0.0;
    for (double x : f) {
        const double payoff = opt.is_call ? std::max(std::exp(x) - m, 0.0)
                                          : std::max(m - std::exp(x), 0.0);
        sum += payoff;
        sumsq += payoff * payoff;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sumsq - nn * mean * mean) / (nn - 1.0));
    McPrice out;
    out.price = opt.discount * opt.forward * mean;
    out.std_error = opt.discount * opt.forward * std::sqrt(var / nn);
    out.n = n;
    return out;
}

} // namespace ats
