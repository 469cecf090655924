#pragma once
#include <cstdint>
#include <random>
#include <vector>

#include "atslab/model.hpp"
#include "atslab/pricing.hpp"
#include "atslab/subordination.hpp"

namespace ats {

// (seed, stream) pair; identical pairs reproduce identical sequences. Parallel
// workers take distinct streams.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::mt19937_64 engine() const;
};

// Marginal draws of the subordinator at time t. alpha=0 -> Gamma(t/k, sigma^2 k);
// alpha=1/2 -> Inverse Gaussian(mean t sigma^2, shape t^2 sigma^2 / k).
// Other alpha values are not sampled.
std::vector<double> sample_tss_marginal(double t, const TssSpec& spec, std::size_t n,
                                        const RngSpec& rng);

// f_T = -(eta+1/2) Z + sqrt(Z) G + phi T through the subordinated representation.
std::vector<double> sample_ats_marginal(const TenorParams& tenor, double alpha, std::size_t n,
                                        const RngSpec& rng);

struct McPrice {
    double price = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

McPrice mc_price(const EuropeanOption& opt, const ModelParams& params, std::size_t n,
                 const RngSpec& rng);

} // namespace ats
