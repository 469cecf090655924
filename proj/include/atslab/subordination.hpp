#pragma once
#include <functional>
#include <string>
#include <vector>

#include "atslab/model.hpp"
#include "atslab/numeric.hpp"

namespace ats {

// Positive curve of time, either a power law or a table interpolated linearly
// in log-log coordinates (endpoint slopes extrapolate, so power laws are exact).
struct Curve {
    enum class Kind { Power, Table };
    Kind kind = Kind::Power;
    double base = 1.0; // value at t=1
    double beta = 0.0;
    std::vector<double> ts;   // Table: strictly increasing, > 0
    std::vector<double> vals; // Table: > 0

    static Curve power(double base_at_1, double exponent);
    static Curve table(std::vector<double> t, std::vector<double> v);
    double operator()(double t) const;
};

// The tempered-stable additive subordinator: triplet (0, V_t, Gamma_t) driven
// by the curves sigma_t, k_t and the tempering exponent alpha.
struct TssSpec {
    double alpha = 0.5;
    Curve sigma = Curve::power(0.2, 0.0);
    Curve k = Curve::power(1.0, 0.0);

    static TssSpec from_curves(const CurveSpec& c, double alpha);
    static TssSpec from_tenors(const std::vector<TenorParams>& tenors, double alpha);
};

struct TssViolation {
    int condition = 0; // 1..3
    double t = 0.0;
    std::string message;
};

// Checks the three admissibility conditions on a sampled grid:
//   1. t sigma_t^2            -> 0 for small t
//   2. t sigma_t^{2a}/k_t^{1-a} -> 0 for small t and non-decreasing
//   3. sigma_t^2 k_t          non-decreasing
// The o(1) conditions are tested as "value at the smallest grid point <
// small_tol"; monotonicity is pairwise with relative slack mono_rel_tol
// (curves tabulated from calibrated fits carry estimation jitter).
std::vector<TssViolation> validate_tss(const TssSpec& spec, const std::vector<double>& t_grid,
                                       double small_tol = 1e-3, double mono_rel_tol = 1e-9);

// Levy density V_t(x), x > 0.
double tss_levy_density(double x, double t, const TssSpec& spec);

// Gamma_t = int_0^1 x V_t(x) dx by adaptive quadrature (abs tol 1e-10).
// Always in [0, t sigma_t^2].
double tss_gamma_drift(double t, const TssSpec& spec);

// ln E[e^{-w Z_t}] in closed form:
//   (d_t/alpha)(1 - (1 + w e_t)^alpha),  d_t = t(1-alpha)/k_t, e_t = sigma_t^2 k_t/(1-alpha)
//   -d_t ln(1 + w e_t) for alpha = 0,    d_t = t/k_t,          e_t = sigma_t^2 k_t
// Requires Re(1 + w e_t) > 0.
cplx tss_log_laplace(cplx w, double t, const TssSpec& spec);

// ln E[e^{iu Z_t}] = int_{x>0} (e^{iux}-1) V_t(x) dx (drift b_t = 0), by
// quadrature split at x=1 with the substitution y = x^{1-alpha} near zero.
// Matches tss_log_laplace(-iu) within 1e-6.
cplx tss_exponent_by_integral(double u, double t, const TssSpec& spec);

// Generating triplet of an additive process at fixed t, with the derived
// no-small-jump drift b_t = gamma_t - int_{0<x<=1} x nu_t(dx).
struct GenericTriplet {
    double diffusion = 0.0;
    std::function<double(double)> levy_density; // of x, zero off the support
    double drift = 0.0;

    double small_jump_mass() const; // int_{0<x<=1} x nu(dx)
    double b() const { return drift - small_jump_mass(); }
    // Subordinator sufficient conditions at fixed t: no diffusion, measure on
    // (0,inf), int (|x| ^ 1) nu(dx) < inf. (b_t monotonicity is a cross-t check.)
    bool subordinator_conditions(std::string* why = nullptr) const;
};

GenericTriplet tss_triplet(double t, const TssSpec& spec);

struct RepresentabilityVerdict {
    bool representable = false;
    // When representable: subordinated-BM coefficients W(a Z) + b Z with a=1.
    double a = 1.0;
    double b = 0.0;
    double eta_bar = 0.0;
    double eta_spread = 0.0; // relative spread of eta across tenors
    // When not: the two maturities whose eta values witness the contradiction.
    double witness_t1 = 0.0;
    double witness_t2 = 0.0;
};

// Constant eta across tenors (within tol, relative) is exactly the case where
// the model is a subordinated BM; otherwise the per-tenor ratios b/a clash.
RepresentabilityVerdict representability_verdict(const ModelParams& params, double tol = 1e-6);

// Deterministic time-change coefficients of W(a_t Z_t) + b_t Z_t + c_t.
struct CoefficientPath {
    std::function<double(double)> a; // positive, increasing, continuous
    std::function<double(double)> b; // real, continuous
    std::function<double(double)> c; // real, continuous (cancels in the gap)

    static CoefficientPath constant(double a0, double b0, double c0 = 0.0);
};

// |lhs - rhs| of the increment-independence identity for f = W(a_t Z_t) + b_t Z_t + c_t,
// both sides evaluated analytically as products of subordinator Laplace transforms:
//   lhs = M_inc(theta_inc) * M_s(theta1 + theta2),  rhs = M_inc(theta_inc) * M_s(theta1) * M_s(theta2)
// with theta1 = iu1(b_t-b_s) - u1^2(a_t-a_s)/2, theta2 = iu2 b_s - u2^2 a_s/2,
// theta_inc = iu1 b_t - u1^2 a_t/2 and M_s(theta) = exp(tss_log_laplace(-theta, s)).
// Zero iff a and b are constant on [s,t].
double independence_gap(double s, double t, cplx u1, cplx u2, const CoefficientPath& path,
                        const TssSpec& spec);

} // namespace ats
