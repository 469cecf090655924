#include "atslab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "atslab/json_io.hpp"
#include "atslab/pricing.hpp"
#include "atslab/sampling.hpp"
#include "atslab/subordination.hpp"

namespace ats {

namespace {

int env_threads() {
    if (const char* v = std::getenv("ATSLAB_THREADS")) {
        const int n = std::atoi(v);
        if (n > 0) return n;
    }
    return 0; // hardware default
}

void apply_model_flag(const std::string& model, double& alpha, std::string& label) {
    if (model.empty()) return;
    if (model == "nig") {
        alpha = 0.5;
        label = "NIG";
    } else if (model == "vg") {
        alpha = 0.0;
        label = "VG";
    } else {
        throw CLI::ValidationError("--model must be nig or vg");
    }
}

struct StrikeRow {
    double maturity = 0.0;
    double strike = 0.0;
};

std::vector<StrikeRow> read_strikes_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("strikes csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "T,strike")
        throw std::invalid_argument("strikes csv: bad header, expected T,strike");
    std::vector<StrikeRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        StrikeRow r;
        char comma = 0;
        std::istringstream ls(line);
        if (!(ls >> r.maturity >> comma >> r.strike) || comma != ',')
            throw std::invalid_argument("strikes csv: bad row at line " +
                                        std::to_string(line_no));
        if (!(r.maturity > 0.0 && r.strike > 0.0))
            throw std::invalid_argument("strikes csv: T and strike must be > 0 at line " +
                                        std::to_string(line_no));
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("strikes csv: no rows");
    return rows;
}

EuropeanOption make_option(const StrikeRow& row, double spot, double rate, bool is_call) {
    EuropeanOption o;
    o.maturity = row.maturity;
    o.strike = row.strike;
    o.forward = spot * std::exp(rate * row.maturity);
    o.discount = std::exp(-rate * row.maturity);
    o.is_call = is_call;
    return o;
}

ModelParams default_lab_model(double alpha, const std::string& label) {
    CurveSpec curve;
    curve.sigma_base = 0.2;
    curve.beta_sigma = 0.0;
    curve.k_base = 1.0;
    curve.beta_k = 0.0;
    curve.eta_base = 0.5;
    curve.delta = 0.0; // constant eta: the representable reference case
    SyntheticConfig defaults;
    return ModelParams::from_curve(curve, alpha, defaults.maturities, label);
}

double median_eta(const std::vector<TenorFit>& fits) {
    std::vector<double> etas;
    for (const auto& f : fits) etas.push_back(f.params.eta);
    std::sort(etas.begin(), etas.end());
    return etas[etas.size() / 2];
}

std::string svg_regression_plot(const std::vector<ThetaPoint>& pts, const ScalingReport& rep) {
    const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : pts) {
        const double x = std::log(p.theta), y = std::log(p.eta_hat);
        const double ci = 2.0 * std::sqrt(p.var_log_eta);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y - ci);
        ymax = std::max(ymax, y + ci);
    }
    const double xpad = 0.05 * (xmax - xmin + 1e-12), ypad = 0.05 * (ymax - ymin + 1e-12);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">ln theta</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << (mt + h - mb) / 2 << ")\">ln eta_hat</text>\n";
    out << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(rep.log_eta_hat + rep.delta_hat * xmin)
        << "\" x2=\"" << sx(xmax) << "\" y2=\"" << sy(rep.log_eta_hat + rep.delta_hat * xmax)
        << "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    for (const auto& p : pts) {
        const double x = std::log(p.theta), y = std::log(p.eta_hat);
        const double ci = 2.0 * std::sqrt(p.var_log_eta);
        out << "<line x1=\"" << sx(x) << "\" y1=\"" << sy(y - ci) << "\" x2=\"" << sx(x)
            << "\" y2=\"" << sy(y + ci) << "\" stroke=\"#2980b9\"/>\n";
        out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
            << "\" r=\"4\" fill=\"#2980b9\"/>\n";
    }
    out << "<text x=\"" << w - mr << "\" y=\"" << mt + 14
        << "\" text-anchor=\"end\" font-size=\"13\">delta_hat = " << fmt_sig(rep.delta_hat, 4)
        << ", p = " << fmt_sig(rep.p_value, 3) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

// ---- subcommand bodies -------------------------------------------------

int cmd_gen_synthetic(const std::string& in, const std::string& out,
                      const std::string& truth_out, std::uint64_t seed, bool seed_set,
                      double alpha, bool alpha_set, const std::string& model) {
    SyntheticConfig cfg;
    if (!in.empty()) cfg = synthetic_config_from_json(read_json_file(in));
    if (seed_set) cfg.rng.seed = seed;
    if (alpha_set) cfg.alpha = alpha;
    apply_model_flag(model, cfg.alpha, cfg.label);

    const SyntheticSurface surf = gen_synthetic_surface(cfg);
    std::ostringstream csv;
    emit_quotes(csv, surf.quotes);
    write_file_atomic(out, csv.str());

    const std::string tpath = truth_out.empty() ? out + ".truth.json" : truth_out;
    json truth{{"config", synthetic_config_to_json(surf.config)},
               {"model", model_to_json(surf.truth)}};
    write_file_atomic(tpath, truth.dump(2) + "\n");
    std::cout << "wrote " << surf.quotes.size() << " quotes to " << out << "\n";
    return 0;
}

int cmd_calibrate(const std::string& in, const std::string& out, double alpha, bool alpha_set,
                  const std::string& model, bool constant_eta) {
    double a = 0.5;
    std::string label = "NIG";
    if (alpha_set) {
        a = alpha;
        label = a == 0.0 ? "VG" : (a == 0.5 ? "NIG" : "ATS");
    }
    apply_model_flag(model, a, label);

    const IngestResult ingest = ingest_quotes_file(in);
    for (const auto& rej : ingest.rejects)
        std::cerr << "reject line " << rej.line << ": " << rej.reason << "\n";
    const Surface surface = build_surface(ingest.quotes);

    FitsDocument doc;
    doc.alpha = a;
    doc.label = label;
    doc.date = surface.date;
    doc.tenors = calibrate_surface(surface, a, {}, {}, env_threads());
    std::vector<TenorFit> converged;
    for (const auto& f : doc.tenors)
        if (f.converged) converged.push_back(f);
    doc.theta_points = to_theta(converged);
    if (constant_eta) {
        doc.constant_eta = calibrate_tenor_constant_eta(surface, a, median_eta(doc.tenors), {},
                                                        env_threads(), &doc.tenors);
    }
    write_file_atomic(out, fits_to_json(doc).dump(2) + "\n");
    std::cout << "calibrated " << doc.tenors.size() << " tenors -> " << out << "\n";
    return 0;
}

int cmd_test_eta(const std::string& in, const std::string& out, const std::string& line_out,
                 const std::string& svg_out, bool equal_weights) {
    const FitsDocument doc = fits_from_json(read_json_file(in));
    if (doc.theta_points.size() < 3)
        throw std::invalid_argument("test-eta: fits document has fewer than 3 theta points");
    const ScalingReport rep = fit_power_law(doc.theta_points, equal_weights);
    write_file_atomic(out, scaling_report_to_json(rep, doc.date, doc.label, "SYNTH").dump(2) +
                               "\n");

    if (!line_out.empty()) {
        std::ostringstream csv;
        csv << "ln_theta,ln_eta_hat,ci_half_width,fit_ln_eta\n";
        for (const auto& p : doc.theta_points) {
            const double x = std::log(p.theta);
            csv << fmt_sig(x) << ',' << fmt_sig(std::log(p.eta_hat)) << ','
                << fmt_sig(2.0 * std::sqrt(p.var_log_eta)) << ','
                << fmt_sig(rep.log_eta_hat + rep.delta_hat * x) << '\n';
        }
        write_file_atomic(line_out, csv.str());
    }
    if (!svg_out.empty()) write_file_atomic(svg_out, svg_regression_plot(doc.theta_points, rep));
    std::cout << "delta_hat=" << fmt_sig(rep.delta_hat, 6) << " p=" << fmt_sig(rep.p_value, 6)
              << "\n";
    return 0;
}

int cmd_aggregate(const std::string& in, const std::string& out, double threshold) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(in)) throw std::invalid_argument("aggregate: --in must be a directory");
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    std::vector<TaggedReport> reports;
    for (const auto& p : paths) reports.push_back(tagged_report_from_json(read_json_file(p)));
    const AggregateReport agg = aggregate_days(reports, threshold);

    std::ostringstream csv;
    csv << "model,index,n_days,mean_p,max_p,n_flagged,flagged_days\n";
    for (const auto& row : agg.rows) {
        csv << row.model << ',' << row.index << ',' << row.n_days << ',' << fmt_sig(row.mean_p)
            << ',' << fmt_sig(row.max_p) << ',' << row.flagged_days.size() << ',';
        for (std::size_t i = 0; i < row.flagged_days.size(); ++i) {
            if (i) csv << ';';
            csv << row.flagged_days[i];
        }
        csv << '\n';
    }
    write_file_atomic(out, csv.str());
    std::cout << "aggregated " << reports.size() << " reports -> " << out << "\n";
    return 0;
}

int cmd_price(const std::string& params_path, const std::string& in, const std::string& out,
              double spot, double rate) {
    const ModelParams model = model_from_json(read_json_file(params_path));
    const std::vector<StrikeRow> rows = read_strikes_csv(in);
    std::ostringstream csv;
    csv << "T,K,call_price,put_price,iv\n";
    for (const auto& row : rows) {
        const EuropeanOption call = make_option(row, spot, rate, true);
        const double c = fourier_price(call, model);
        const double p = c - call.discount * (call.forward - call.strike);
        EuropeanOption otm = call;
        otm.is_call = call.strike >= call.forward;
        const double iv = implied_vol(otm.is_call ? c : p, otm);
        csv << fmt_sig(row.maturity) << ',' << fmt_sig(row.strike) << ',' << fmt_sig(c) << ','
            << fmt_sig(p) << ',' << fmt_sig(iv) << '\n';
    }
    write_file_atomic(out, csv.str());
    std::cout << "priced " << rows.size() << " options -> " << out << "\n";
    return 0;
}

int cmd_mc_check(const std::string& params_path, const std::string& in, const std::string& out,
                 double spot, double rate, std::uint64_t seed, std::uint64_t samples) {
    const ModelParams model = model_from_json(read_json_file(params_path));
    const std::vector<StrikeRow> rows = read_strikes_csv(in);
    json arr = json::array();
    std::uint64_t stream = 0;
    for (const auto& row : rows) {
        const EuropeanOption call = make_option(row, spot, rate, true);
        const double fp = fourier_price(call, model);
        const McPrice mc = mc_price(call, model, samples, RngSpec{seed, stream++});
        const double z = (fp - mc.price) / std::max(mc.std_error, 1e-300);
        arr.push_back(json{{"T", row.maturity},
                           {"K", row.strike},
                           {"fourier_price", fp},
                           {"mc_price", mc.price},
                           {"mc_se", mc.std_error},
                           {"z_score", z}});
    }
    write_file_atomic(out, arr.dump(2) + "\n");
    std::cout << "mc-check on " << rows.size() << " options -> " << out << "\n";
    return 0;
}

int cmd_lab(const std::string& in, const std::string& out, double alpha, bool alpha_set,
            const std::string& model_flag, double tol) {
    double a = 0.5;
    std::string label = "NIG";
    if (alpha_set) {
        a = alpha;
        label = a == 0.0 ? "VG" : (a == 0.5 ? "NIG" : "ATS");
    }
    apply_model_flag(model_flag, a, label);

    const ModelParams model = in.empty() ? default_lab_model(a, label)
                                         : model_from_json(read_json_file(in));
    const TssSpec spec = in.empty()
                             ? TssSpec::from_curves(CurveSpec{0.2, 0.0, 1.0, 0.0, 0.5, 0.0},
                                                    model.alpha)
                             : TssSpec::from_tenors(model.tenors, model.alpha);

    // Condition grid: down to 1e-6 so the o(1) checks bite.
    std::vector<double> grid;
    const double tmax = model.tenors.back().maturity;
    for (int i = 0; i < 25; ++i)
        grid.push_back(1e-6 * std::pow(tmax / 1e-6, i / 24.0));
    const auto violations = validate_tss(spec, grid);
    json viol = json::array();
    for (const auto& v : violations)
        viol.push_back(json{{"condition", v.condition}, {"t", v.t}, {"message", v.message}});

    // Exponent cross-check: quadrature against the closed-form Laplace transform.
    double max_err = 0.0;
    for (double u : {-5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0}) {
        for (double t : {0.05, 0.25, 1.0, 2.0}) {
            const cplx byint = tss_exponent_by_integral(u, t, spec);
            const cplx closed = tss_log_laplace(cplx(0.0, -u), t, spec);
            max_err = std::max(max_err, std::abs(byint - closed));
        }
    }

    bool gamma_ok = true;
    json gamma_rows = json::array();
    for (int i = 0; i < 20; ++i) {
        const double t = 0.02 + i * (2.0 - 0.02) / 19.0;
        const double g = tss_gamma_drift(t, spec);
        const double bound = t * spec.sigma(t) * spec.sigma(t);
        const bool ok = g >= 0.0 && g <= bound * (1.0 + 1e-12);
        gamma_ok = gamma_ok && ok;
        gamma_rows.push_back(json{{"t", t}, {"gamma", g}, {"bound", bound}, {"ok", ok}});
    }

    const RepresentabilityVerdict verdict = representability_verdict(model, tol);
    json vj{{"representable", verdict.representable},
            {"eta_bar", verdict.eta_bar},
            {"eta_spread", verdict.eta_spread}};
    if (verdict.representable) {
        vj["a"] = verdict.a;
        vj["b"] = verdict.b;
    } else {
        vj["witness"] = json::array({verdict.witness_t1, verdict.witness_t2});
    }

    // Independence identity: exact for constant coefficients, broken when the
    // BM variance coefficient doubles between s and t.
    json gaps = json::array();
    const double s = 0.5, t = 1.0;
    double max_const = 0.0, max_scaled = 0.0;
    const CoefficientPath const_path =
        CoefficientPath::constant(1.0, -(0.5 + verdict.eta_bar), 0.0);
    CoefficientPath scaled_path;
    scaled_path.a = [](double tt) { return 2.0 * tt; }; // a(1)/a(0.5) = 2
    scaled_path.b = [](double) { return 0.0; };
    scaled_path.c = [](double) { return 0.0; };
    for (double u1 : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        for (double u2 : {0.5, 1.0, 2.0, 3.0, 5.0}) {
            const double g1 = independence_gap(s, t, u1, u2, const_path, spec);
            const double g2 = independence_gap(s, t, u1, u2, scaled_path, spec);
            max_const = std::max(max_const, g1);
            max_scaled = std::max(max_scaled, g2);
            gaps.push_back(json{{"s", s}, {"t", t}, {"u1", u1}, {"u2", u2},
                                {"path", "constant"}, {"gap", g1}});
            gaps.push_back(json{{"s", s}, {"t", t}, {"u1", u1}, {"u2", u2},
                                {"path", "scaled"}, {"gap", g2}});
        }
    }

    json report{{"model", model_to_json(model)},
                {"tss_validation", viol},
                {"exponent_match_max_err", max_err},
                {"gamma_bound_ok", gamma_ok},
                {"gamma_rows", gamma_rows},
                {"representability", vj},
                {"independence_gaps", gaps},
                {"independence_gap_max_constant", max_const},
                {"independence_gap_max_scaled", max_scaled}};
    write_file_atomic(out, report.dump(2) + "\n");
    std::cout << "lab report -> " << out << " (gamma_bound_ok="
              << (gamma_ok ? "true" : "false") << ")\n";
    return 0;
}

int cmd_smile_report(const std::string& in, const std::string& fits_path, const std::string& out,
                     std::string mse_out) {
    const FitsDocument doc = fits_from_json(read_json_file(fits_path));
    if (!doc.constant_eta)
        throw std::invalid_argument("smile-report: fits file lacks the constant-eta fit "
                                    "(rerun calibrate with --constant-eta)");
    const IngestResult ingest = ingest_quotes_file(in);
    const Surface surface = build_surface(ingest.quotes);
    if (surface.smiles.empty()) throw std::invalid_argument("smile-report: empty surface");

    auto find_fit = [](const std::vector<TenorFit>& fits, double t) -> const TenorFit& {
        for (const auto& f : fits)
            if (std::abs(f.params.maturity - t) <= 1e-10 * std::max(1.0, t)) return f;
        throw std::invalid_argument("smile-report: no fit for maturity T=" + fmt_sig(t, 8));
    };

    std::ostringstream csv, mse_csv;
    csv << "T,K,market_iv,model_iv,constant_eta_iv\n";
    mse_csv << "T,model_mse,constant_eta_mse,ratio\n";
    for (const auto& smile : surface.smiles) {
        const TenorFit& free_fit = find_fit(doc.tenors, smile.maturity);
        const TenorFit& ce_fit = find_fit(doc.constant_eta->tenors, smile.maturity);
        double sse_free = 0.0, sse_ce = 0.0;
        for (const auto& p : smile.points) {
            const double iv_free = model_iv(p.strike, smile, free_fit.params, doc.alpha);
            const double iv_ce = model_iv(p.strike, smile, ce_fit.params, doc.alpha);
            sse_free += (iv_free - p.iv) * (iv_free - p.iv);
            sse_ce += (iv_ce - p.iv) * (iv_ce - p.iv);
            csv << fmt_sig(smile.maturity) << ',' << fmt_sig(p.strike) << ',' << fmt_sig(p.iv)
                << ',' << fmt_sig(iv_free) << ',' << fmt_sig(iv_ce) << '\n';
        }
        const double n = static_cast<double>(smile.points.size());
        const double mse_free = sse_free / n, mse_ce = sse_ce / n;
        mse_csv << fmt_sig(smile.maturity) << ',' << fmt_sig(mse_free) << ',' << fmt_sig(mse_ce)
                << ',' << fmt_sig(mse_ce / std::max(mse_free, 1e-300)) << '\n';
    }
    write_file_atomic(out, csv.str());
    if (mse_out.empty()) mse_out = out + ".mse.csv";
    write_file_atomic(mse_out, mse_csv.str());
    std::cout << "smile report -> " << out << " and " << mse_out << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"additive tempered-stable option model toolkit"};
    app.require_subcommand(1);

    // shared option storage
    std::string in, out, params_path, truth_out, line_out, svg_out, fits_path, mse_out, model;
    std::uint64_t seed = 42;
    std::uint64_t samples = 1000000;
    double alpha = 0.5, tol = 1e-6, p_threshold = 1e-3, spot = 100.0, rate = 0.02;
    bool constant_eta = false, equal_weights = false;

    auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic option surface");
    gen->add_option("--in", in, "config json (defaults used when omitted)");
    gen->add_option("--out", out, "quotes csv")->required();
    gen->add_option("--truth-out", truth_out, "ground-truth json (default <out>.truth.json)");
    auto* gso = gen->add_option("--seed", seed, "rng seed override");
    auto* gao = gen->add_option("--alpha", alpha, "tempering exponent override");
    gen->add_option("--model", model, "nig or vg");

    auto* cal = app.add_subcommand("calibrate", "per-maturity least-squares calibration");
    cal->add_option("--in", in, "quotes csv")->required();
    cal->add_option("--out", out, "fits json")->required();
    auto* cao = cal->add_option("--alpha", alpha, "tempering exponent");
    cal->add_option("--model", model, "nig or vg");
    cal->add_flag("--constant-eta", constant_eta, "also run the shared-eta joint fit");

    auto* eta = app.add_subcommand("test-eta", "weighted log-log regression of eta on theta");
    eta->add_option("--in", in, "fits json")->required();
    eta->add_option("--out", out, "scaling report json")->required();
    eta->add_option("--line-out", line_out, "regression-line csv");
    eta->add_option("--svg-out", svg_out, "svg plot of the regression");
    eta->add_flag("--equal-weights", equal_weights, "ignore calibration variances");

    auto* agg = app.add_subcommand("aggregate", "mean/max p-values across report files");
    agg->add_option("--in", in, "directory of scaling report jsons")->required();
    agg->add_option("--out", out, "summary csv")->required();
    agg->add_option("--tol", p_threshold, "flag threshold on p (default 1e-3)");

    auto* price = app.add_subcommand("price", "price strikes from a params json");
    price->add_option("--params", params_path, "model params json")->required();
    price->add_option("--in", in, "strikes csv (header T,strike)")->required();
    price->add_option("--out", out, "prices csv")->required();
    price->add_option("--spot", spot, "spot for the forward curve");
    price->add_option("--rate", rate, "flat rate for forward/discount");

    auto* mc = app.add_subcommand("mc-check", "fourier vs monte carlo cross-check");
    mc->add_option("--params", params_path, "model params json")->required();
    mc->add_option("--in", in, "strikes csv (header T,strike)")->required();
    mc->add_option("--out", out, "json report")->required();
    mc->add_option("--seed", seed, "rng seed");
    mc->add_option("--samples", samples, "mc sample count");
    mc->add_option("--spot", spot, "spot for the forward curve");
    mc->add_option("--rate", rate, "flat rate for forward/discount");

    auto* lab = app.add_subcommand("lab", "subordinator checks and representation diagnostics");
    lab->add_option("--in", in, "model params json (built-in constant-eta model when omitted)");
    lab->add_option("--out", out, "lab report json")->required();
    auto* lao = lab->add_option("--alpha", alpha, "tempering exponent for the default model");
    lab->add_option("--model", model, "nig or vg");
    lab->add_option("--tol", tol, "eta-constancy tolerance (relative spread)");

    auto* rep = app.add_subcommand("smile-report", "market vs model vs constant-eta IVs");
    rep->add_option("--in", in, "quotes csv")->required();
    rep->add_option("--fits", fits_path, "fits json with constant-eta block")->required();
    rep->add_option("--out", out, "per-quote csv")->required();
    rep->add_option("--mse-out", mse_out, "per-tenor mse csv (default <out>.mse.csv)");

    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end()); // CLI11 parses reversed vectors
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed())
            return cmd_gen_synthetic(in, out, truth_out, seed, gso->count() > 0, alpha,
                                     gao->count() > 0, model);
        if (cal->parsed())
            return cmd_calibrate(in, out, alpha, cao->count() > 0, model, constant_eta);
        if (eta->parsed()) return cmd_test_eta(in, out, line_out, svg_out, equal_weights);
        if (agg->parsed()) return cmd_aggregate(in, out, p_threshold);
        if (price->parsed()) return cmd_price(params_path, in, out, spot, rate);
        if (mc->parsed()) return cmd_mc_check(params_path, in, out, spot, rate, seed, samples);
        if (lab->parsed()) return cmd_lab(in, out, alpha, lao->count() > 0, model, tol);
        if (rep->parsed()) return cmd_smile_report(in, fits_path, out, mse_out);
        std::cerr << app.help();
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace ats
