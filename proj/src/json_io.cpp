#include "atslab/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ats {

namespace {

json tenor_fit_to_json(const TenorFit& f) {
    json cov = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int j = 0; j < 3; ++j) row.push_back(f.covariance[i][j]);
        cov.push_back(row);
    }
    return json{{"T", f.params.maturity}, {"sigma", f.params.sigma},   {"k", f.params.k},
                {"eta", f.params.eta},    {"phi", f.params.phi},       {"mse", f.mse},
                {"n_quotes", f.n_quotes}, {"converged", f.converged},  {"cov", cov}};
}

TenorFit tenor_fit_from_json(const json& j) {
    TenorFit f;
    f.params.maturity = j.at("T").get<double>();
    f.params.sigma = j.at("sigma").get<double>();
    f.params.k = j.at("k").get<double>();
    f.params.eta = j.at("eta").get<double>();
    f.params.phi = j.at("phi").get<double>();
    f.mse = j.at("mse").get<double>();
    f.n_quotes = j.at("n_quotes").get<int>();
    f.converged = j.at("converged").get<bool>();
    const auto& cov = j.at("cov");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) f.covariance[r][c] = cov.at(r).at(c).get<double>();
    return f;
}

} // namespace

json model_to_json(const ModelParams& m) {
    json tenors = json::array();
    for (const auto& tn : m.tenors) {
        tenors.push_back(json{{"T", tn.maturity},
                              {"sigma", tn.sigma},
                              {"k", tn.k},
                              {"eta", tn.eta},
                              {"phi", tn.phi}});
    }
    return json{{"alpha", m.alpha}, {"label", m.label}, {"tenors", tenors}};
}

ModelParams model_from_json(const json& j) {
    ModelParams m;
    m.alpha = j.at("alpha").get<double>();
    m.label = j.value("label", std::string{});
    for (const auto& t : j.at("tenors")) {
        TenorParams tn;
        tn.maturity = t.at("T").get<double>();
        tn.sigma = t.at("sigma").get<double>();
        tn.k = t.at("k").get<double>();
        tn.eta = t.at("eta").get<double>();
        if (t.contains("phi")) {
            tn.phi = t.at("phi").get<double>();
        } else {
            tn.phi = martingale_drift(tn.sigma, tn.k, tn.eta, m.alpha, tn.maturity);
        }
        m.tenors.push_back(tn);
    }
    m.validate();
    return m;
}

json synthetic_config_to_json(const SyntheticConfig& cfg) {
    return json{{"alpha", cfg.alpha},
                {"label", cfg.label},
                {"curve",
                 {{"sigma", cfg.curve.sigma_base},
                  {"beta_sigma", cfg.curve.beta_sigma},
                  {"k", cfg.curve.k_base},
                  {"beta_k", cfg.curve.beta_k},
                  {"eta", cfg.curve.eta_base},
                  {"delta", cfg.curve.delta}}},
                {"maturities", cfg.maturities},
                {"strike_rule", cfg.strike_rule},
                {"n_strikes", cfg.n_strikes},
                {"noise_bps", cfg.noise_bps},
                {"seed", cfg.rng.seed},
                {"stream", cfg.rng.stream},
                {"spot", cfg.spot},
                {"rate", cfg.rate},
                {"date", cfg.date}};
}

SyntheticConfig synthetic_config_from_json(const json& j) {
    SyntheticConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.label = j.value("label", cfg.label);
    if (j.contains("curve")) {
        const auto& c = j.at("curve");
        cfg.curve.sigma_base = c.value("sigma", cfg.curve.sigma_base);
        cfg.curve.beta_sigma = c.value("beta_sigma", cfg.curve.beta_sigma);
        cfg.curve.k_base = c.value("k", cfg.curve.k_base);
        cfg.curve.beta_k = c.value("beta_k", cfg.curve.beta_k);
        cfg.curve.eta_base = c.value("eta", cfg.curve.eta_base);
        cfg.curve.delta = c.value("delta", cfg.curve.delta);
    }
    if (j.contains("maturities")) cfg.maturities = j.at("maturities").get<std::vector<double>>();
    cfg.strike_rule = j.value("strike_rule", cfg.strike_rule);
    cfg.n_strikes = j.value("n_strikes", cfg.n_strikes);
    cfg.noise_bps = j.value("noise_bps", cfg.noise_bps);
    cfg.rng.seed = j.value("seed", cfg.rng.seed);
    cfg.rng.stream = j.value("stream", cfg.rng.stream);
    cfg.spot = j.value("spot", cfg.spot);
    cfg.rate = j.value("rate", cfg.rate);
    cfg.date = j.value("date", cfg.date);
    cfg.validate();
    return cfg;
}

json fits_to_json(const FitsDocument& doc) {
    json tenors = json::array();
    for (const auto& f : doc.tenors) tenors.push_back(tenor_fit_to_json(f));
    json thetas = json::array();
    for (const auto& p : doc.theta_points) {
        thetas.push_back(json{{"theta", p.theta},
                              {"k_hat", p.k_hat},
                              {"eta_hat", p.eta_hat},
                              {"var_log_eta", p.var_log_eta}});
    }
    json out{{"alpha", doc.alpha},
             {"label", doc.label},
             {"date", doc.date},
             {"tenors", tenors},
             {"theta_points", thetas}};
    if (doc.constant_eta) {
        json ce_tenors = json::array();
        for (const auto& f : doc.constant_eta->tenors) ce_tenors.push_back(tenor_fit_to_json(f));
        out["constant_eta"] = json{{"eta", doc.constant_eta->eta}, {"tenors", ce_tenors}};
    }
    return out;
}

FitsDocument fits_from_json(const json& j) {
    FitsDocument doc;
    doc.alpha = j.at("alpha").get<double>();
    doc.label = j.value("label", std::string{});
    doc.date = j.value("date", std::string{});
    for (const auto& t : j.at("tenors")) doc.tenors.push_back(tenor_fit_from_json(t));
    if (j.contains("theta_points")) {
        for (const auto& t : j.at("theta_points")) {
            ThetaPoint p;
            p.theta = t.at("theta").get<double>();
            p.k_hat = t.at("k_hat").get<double>();
            p.eta_hat = t.at("eta_hat").get<double>();
            p.var_log_eta = t.at("var_log_eta").get<double>();
            doc.theta_points.push_back(p);
        }
    }
    if (j.contains("constant_eta")) {
        ConstantEtaFit ce;
        ce.eta = j.at("constant_eta").at("eta").get<double>();
        for (const auto& t : j.at("constant_eta").at("tenors"))
            ce.tenors.push_back(tenor_fit_from_json(t));
        doc.constant_eta = std::move(ce);
    }
    return doc;
}

json scaling_report_to_json(const ScalingReport& rep, const std::string& day,
                            const std::string& model, const std::string& index) {
    return json{{"day", day},
                {"model", model},
                {"index", index},
                {"delta_hat", rep.delta_hat},
                {"log_eta_hat", rep.log_eta_hat},
                {"se_delta", rep.se_delta},
                {"se_log_eta", rep.se_log_eta},
                {"t_stat", rep.t_stat},
                {"p_value", rep.p_value},
                {"n_points", rep.n_points},
                {"r_squared_weighted", rep.r_squared_weighted}};
}

TaggedReport tagged_report_from_json(const json& j) {
    TaggedReport t;
    t.day = j.value("day", std::string{});
    t.model = j.value("model", std::string{});
    t.index = j.value("index", std::string{});
    t.report.delta_hat = j.at("delta_hat").get<double>();
    t.report.log_eta_hat = j.at("log_eta_hat").get<double>();
    t.report.se_delta = j.at("se_delta").get<double>();
    t.report.se_log_eta = j.at("se_log_eta").get<double>();
    t.report.t_stat = j.at("t_stat").get<double>();
    t.report.p_value = j.at("p_value").get<double>();
    t.report.n_points = j.at("n_points").get<int>();
    t.report.r_squared_weighted = j.value("r_squared_weighted", 0.0);
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("bad json in " + path + ": " + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace ats
