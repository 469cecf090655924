#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atslab/calibration.hpp"
#include "atslab/cli.hpp"
#include "atslab/inference.hpp"
#include "atslab/json_io.hpp"
#include "atslab/market_data.hpp"
#include "atslab/model.hpp"
#include "atslab/pricing.hpp"
#include "atslab/sampling.hpp"
#include "atslab/subordination.hpp"

namespace py = pybind11;
using namespace ats;

namespace {

TssSpec make_tss_spec(double alpha, double sigma_base, double beta_sigma, double k_base,
                      double beta_k) {
    TssSpec s;
    s.alpha = alpha;
    s.sigma = Curve::power(sigma_base, beta_sigma);
    s.k = Curve::power(k_base, beta_k);
    return s;
}

} // namespace

PYBIND11_MODULE(atslab, m) {
    m.doc() = "Additive tempered-stable option model: characteristic functions, Fourier "
              "pricing, calibration and the eta-scaling test";

    py::class_<TenorParams>(m, "TenorParams")
        .def(py::init([](double T, double sigma, double k, double eta, double phi) {
                 TenorParams t;
                 t.maturity = T;
                 t.sigma = sigma;
                 t.k = k;
                 t.eta = eta;
                 t.phi = phi;
                 return t;
             }),
             py::arg("T"), py::arg("sigma"), py::arg("k"), py::arg("eta"), py::arg("phi") = 0.0)
        .def_readwrite("maturity", &TenorParams::maturity)
        .def_readwrite("sigma", &TenorParams::sigma)
        .def_readwrite("k", &TenorParams::k)
        .def_readwrite("eta", &TenorParams::eta)
        .def_readwrite("phi", &TenorParams::phi);

    py::class_<CurveSpec>(m, "CurveSpec")
        .def(py::init([](double sigma, double beta_sigma, double k, double beta_k, double eta,
                         double delta) {
                 return CurveSpec{sigma, beta_sigma, k, beta_k, eta, delta};
             }),
             py::arg("sigma") = 0.2, py::arg("beta_sigma") = 0.0, py::arg("k") = 1.0,
             py::arg("beta_k") = 1.0, py::arg("eta") = 0.5, py::arg("delta") = -0.5)
        .def("tenor_at", &CurveSpec::tenor_at, py::arg("t"), py::arg("alpha"));

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("label", &ModelParams::label)
        .def_readwrite("tenors", &ModelParams::tenors)
        .def_static("from_curve", &ModelParams::from_curve, py::arg("curve"), py::arg("alpha"),
                    py::arg("maturities"), py::arg("label") = std::string{});

    m.def("log_l", &log_l, py::arg("u"), py::arg("t"), py::arg("k"), py::arg("alpha"));
    m.def("martingale_drift", &martingale_drift, py::arg("sigma"), py::arg("k"), py::arg("eta"),
          py::arg("alpha"), py::arg("t"));
    m.def("ats_log_chf", &ats_log_chf, py::arg("u"), py::arg("tenor"), py::arg("alpha"));
    m.def("lts_log_chf", &lts_log_chf, py::arg("u"), py::arg("t"), py::arg("sigma"), py::arg("k"),
          py::arg("eta"), py::arg("alpha"));

    py::class_<TssSpec>(m, "TssSpec")
        .def(py::init(&make_tss_spec), py::arg("alpha") = 0.5, py::arg("sigma") = 0.2,
             py::arg("beta_sigma") = 0.0, py::arg("k") = 1.0, py::arg("beta_k") = 0.0)
        .def_readonly("alpha", &TssSpec::alpha);

    m.def("tss_levy_density", &tss_levy_density, py::arg("x"), py::arg("t"), py::arg("spec"));
    m.def("tss_gamma_drift", &tss_gamma_drift, py::arg("t"), py::arg("spec"));
    m.def("tss_log_laplace", &tss_log_laplace, py::arg("w"), py::arg("t"), py::arg("spec"));
    m.def("tss_exponent_by_integral", &tss_exponent_by_integral, py::arg("u"), py::arg("t"),
          py::arg("spec"));
    m.def(
        "validate_tss",
        [](const TssSpec& spec, const std::vector<double>& grid, double tol, double mono) {
            std::vector<std::tuple<int, double, std::string>> out;
            for (const auto& v : validate_tss(spec, grid, tol, mono))
                out.emplace_back(v.condition, v.t, v.message);
            return out;
        },
        py::arg("spec"), py::arg("t_grid"), py::arg("small_tol") = 1e-3,
        py::arg("mono_rel_tol") = 1e-9);
    m.def(
        "representability_verdict",
        [](const ModelParams& p, double tol) {
            const auto v = representability_verdict(p, tol);
            py::dict d;
            d["representable"] = v.representable;
            d["eta_bar"] = v.eta_bar;
            d["eta_spread"] = v.eta_spread;
            if (v.representable) {
                d["a"] = v.a;
                d["b"] = v.b;
            } else {
                d["witness"] = py::make_tuple(v.witness_t1, v.witness_t2);
            }
            return d;
        },
        py::arg("params"), py::arg("tol") = 1e-6);
    m.def(
        "independence_gap",
        [](double s, double t, cplx u1, cplx u2, std::function<double(double)> a,
           std::function<double(double)> b, const TssSpec& spec) {
            CoefficientPath path;
            path.a = std::move(a);
            path.b = std::move(b);
            path.c = [](double) { return 0.0; };
            return independence_gap(s, t, u1, u2, path, spec);
        },
        py::arg("s"), py::arg("t"), py::arg("u1"), py::arg("u2"), py::arg("a"), py::arg("b"),
        py::arg("spec"));

    py::class_<EuropeanOption>(m, "EuropeanOption")
        .def(py::init([](double strike, double maturity, bool is_call, double forward,
                         double discount) {
                 EuropeanOption o;
                 o.strike = strike;
                 o.maturity = maturity;
                 o.is_call = is_call;
                 o.forward = forward;
                 o.discount = discount;
                 return o;
             }),
             py::arg("strike"), py::arg("maturity"), py::arg("is_call") = true,
             py::arg("forward") = 100.0, py::arg("discount") = 1.0)
        .def_readwrite("strike", &EuropeanOption::strike)
        .def_readwrite("maturity", &EuropeanOption::maturity)
        .def_readwrite("is_call", &EuropeanOption::is_call)
        .def_readwrite("forward", &EuropeanOption::forward)
        .def_readwrite("discount", &EuropeanOption::discount);

    py::class_<PricingGrid>(m, "PricingGrid")
        .def(py::init<>())
        .def_readwrite("damping", &PricingGrid::damping)
        .def_readwrite("truncation", &PricingGrid::truncation)
        .def_readwrite("n_nodes", &PricingGrid::n_nodes)
        .def_readwrite("rule", &PricingGrid::rule);

    m.def("fourier_price", &fourier_price, py::arg("option"), py::arg("params"),
          py::arg("grid") = PricingGrid{});
    m.def("black_price", &black_price, py::arg("option"), py::arg("sigma_bs"));
    m.def("implied_vol", &implied_vol, py::arg("price"), py::arg("option"));
    m.def("bs_delta", &bs_delta, py::arg("option"), py::arg("sigma_bs"));
    m.def("atm_skew", &atm_skew, py::arg("params"), py::arg("maturity"), py::arg("bump") = 1e-3,
          py::arg("grid") = PricingGrid{});

    py::class_<RngSpec>(m, "RngSpec")
        .def(py::init([](std::uint64_t seed, std::uint64_t stream) {
                 return RngSpec{seed, stream};
             }),
             py::arg("seed") = 0, py::arg("stream") = 0)
        .def_readwrite("seed", &RngSpec::seed)
        .def_readwrite("stream", &RngSpec::stream);

    m.def("sample_tss_marginal", &sample_tss_marginal, py::arg("t"), py::arg("spec"),
          py::arg("n"), py::arg("rng"));
    m.def("sample_ats_marginal", &sample_ats_marginal, py::arg("tenor"), py::arg("alpha"),
          py::arg("n"), py::arg("rng"));
    m.def(
        "mc_price",
        [](const EuropeanOption& o, const ModelParams& p, std::size_t n, const RngSpec& rng) {
            const McPrice r = mc_price(o, p, n, rng);
            return py::make_tuple(r.price, r.std_error);
        },
        py::arg("option"), py::arg("params"), py::arg("n"), py::arg("rng"));

    py::class_<SyntheticConfig>(m, "SyntheticConfig")
        .def(py::init<>())
        .def_readwrite("curve", &SyntheticConfig::curve)
        .def_readwrite("alpha", &SyntheticConfig::alpha)
        .def_readwrite("maturities", &SyntheticConfig::maturities)
        .def_readwrite("strike_rule", &SyntheticConfig::strike_rule)
        .def_readwrite("n_strikes", &SyntheticConfig::n_strikes)
        .def_readwrite("noise_bps", &SyntheticConfig::noise_bps)
        .def_readwrite("rng", &SyntheticConfig::rng)
        .def_readwrite("spot", &SyntheticConfig::spot)
        .def_readwrite("rate", &SyntheticConfig::rate);

    py::class_<Smile>(m, "Smile")
        .def_readonly("maturity", &Smile::maturity)
        .def_readonly("forward", &Smile::forward)
        .def_readonly("discount", &Smile::discount)
        .def("points", [](const Smile& s) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : s.points) out.emplace_back(p.strike, p.iv);
            return out;
        });

    py::class_<Surface>(m, "Surface")
        .def_readonly("date", &Surface::date)
        .def_readonly("smiles", &Surface::smiles);

    m.def("gen_synthetic_surface", [](const SyntheticConfig& cfg) {
        const SyntheticSurface s = gen_synthetic_surface(cfg);
        return py::make_tuple(build_surface(s.quotes), s.truth);
    });

    py::class_<TenorFit>(m, "TenorFit")
        .def_readonly("params", &TenorFit::params)
        .def_readonly("mse", &TenorFit::mse)
        .def_readonly("n_quotes", &TenorFit::n_quotes)
        .def_readonly("converged", &TenorFit::converged)
        .def("covariance", [](const TenorFit& f) {
            std::vector<std::vector<double>> c(3, std::vector<double>(3));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) c[i][j] = f.covariance[i][j];
            return c;
        });

    py::class_<ThetaPoint>(m, "ThetaPoint")
        .def_readonly("theta", &ThetaPoint::theta)
        .def_readonly("k_hat", &ThetaPoint::k_hat)
        .def_readonly("eta_hat", &ThetaPoint::eta_hat)
        .def_readonly("var_log_eta", &ThetaPoint::var_log_eta);

    py::class_<CalibInit>(m, "CalibInit")
        .def(py::init<>())
        .def_readwrite("sigma", &CalibInit::sigma)
        .def_readwrite("k", &CalibInit::k)
        .def_readwrite("eta", &CalibInit::eta);
    py::class_<CalibBounds>(m, "CalibBounds").def(py::init<>());

    m.def("calibrate_tenor", &calibrate_tenor, py::arg("smile"), py::arg("alpha"),
          py::arg("init") = CalibInit{}, py::arg("bounds") = CalibBounds{});
    m.def("calibrate_surface", &calibrate_surface, py::arg("surface"), py::arg("alpha"),
          py::arg("init") = CalibInit{}, py::arg("bounds") = CalibBounds{},
          py::arg("threads") = 1);
    m.def(
        "calibrate_tenor_constant_eta",
        [](const Surface& s, double alpha, double eta_init, int threads) {
            const ConstantEtaFit f =
                calibrate_tenor_constant_eta(s, alpha, eta_init, CalibBounds{}, threads);
            return py::make_tuple(f.eta, f.tenors);
        },
        py::arg("surface"), py::arg("alpha"), py::arg("eta_init") = 0.0, py::arg("threads") = 1);
    m.def("to_theta", &to_theta, py::arg("fits"));

    py::class_<ScalingReport>(m, "ScalingReport")
        .def_readonly("delta_hat", &ScalingReport::delta_hat)
        .def_readonly("log_eta_hat", &ScalingReport::log_eta_hat)
        .def_readonly("se_delta", &ScalingReport::se_delta)
        .def_readonly("se_log_eta", &ScalingReport::se_log_eta)
        .def_readonly("t_stat", &ScalingReport::t_stat)
        .def_readonly("p_value", &ScalingReport::p_value)
        .def_readonly("n_points", &ScalingReport::n_points)
        .def_readonly("r_squared_weighted", &ScalingReport::r_squared_weighted);

    m.def(
        "fit_power_law",
        [](const std::vector<std::tuple<double, double, double>>& pts, bool equal_weights) {
            std::vector<ThetaPoint> v;
            for (const auto& [theta, eta_hat, var] : pts) {
                ThetaPoint p;
                p.theta = theta;
                p.eta_hat = eta_hat;
                p.var_log_eta = var;
                v.push_back(p);
            }
            return fit_power_law(v, equal_weights);
        },
        py::arg("points"), py::arg("equal_weights") = false,
        "points: list of (theta, eta_hat, var_log_eta)");
    m.def("fit_power_law", py::overload_cast<const std::vector<ThetaPoint>&, bool>(&fit_power_law),
          py::arg("points"), py::arg("equal_weights") = false);

    m.def("run_cli", &ats::run, py::arg("args"), "invoke the command line entry point");
}
