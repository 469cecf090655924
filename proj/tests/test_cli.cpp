#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "atslab/cli.hpp"
#include "atslab/json_io.hpp"

using namespace ats;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "atslab-cli-test";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const std::string& path) { return read_text_file(path); }

// a small, fast synthetic config: 4 tenors, 7 strikes
const char* kSmallConfig = R"({
  "alpha": 0.5, "label": "NIG",
  "curve": {"sigma": 0.2, "beta_sigma": 0.0, "k": 1.0, "beta_k": 1.0, "eta": 0.5, "delta": -0.5},
  "maturities": [0.0833333333, 0.25, 1.0, 2.0],
  "n_strikes": 7, "noise_bps": 5.0, "seed": 42
})";

} // namespace

TEST_CASE("usage: help exits 0, bad invocations exit 1") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({}) == 1);
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({"gen-synthetic"}) == 1);                          // missing --out
    CHECK(run({"calibrate", "--in", "/nonexistent.csv", "--out", "/tmp/x.json"}) == 1);
}

TEST_CASE("gen-synthetic / calibrate / test-eta / smile-report pipeline") {
    TempDir tmp;
    write(tmp.file("cfg.json"), kSmallConfig);

    CHECK(run({"gen-synthetic", "--in", tmp.file("cfg.json"), "--out", tmp.file("quotes.csv")}) ==
          0);
    CHECK(fs::exists(tmp.file("quotes.csv")));
    CHECK(fs::exists(tmp.file("quotes.csv.truth.json")));

    CHECK(run({"calibrate", "--in", tmp.file("quotes.csv"), "--out", tmp.file("fits.json"),
               "--model", "nig", "--constant-eta"}) == 0);
    const FitsDocument doc = fits_from_json(read_json_file(tmp.file("fits.json")));
    CHECK(doc.tenors.size() == 4);
    CHECK(doc.constant_eta.has_value());
    CHECK(doc.theta_points.size() >= 3);

    CHECK(run({"test-eta", "--in", tmp.file("fits.json"), "--out", tmp.file("report.json"),
               "--line-out", tmp.file("line.csv"), "--svg-out", tmp.file("plot.svg")}) == 0);
    const json rep = read_json_file(tmp.file("report.json"));
    CHECK(rep.at("delta_hat").get<double>() < 0.0); // downward-sloping eta curve
    CHECK(rep.at("n_points").get<int>() >= 3);
    CHECK(slurp(tmp.file("line.csv")).rfind("ln_theta,", 0) == 0);
    CHECK(slurp(tmp.file("plot.svg")).rfind("<svg", 0) == 0);

    CHECK(run({"smile-report", "--in", tmp.file("quotes.csv"), "--fits", tmp.file("fits.json"),
               "--out", tmp.file("smiles.csv")}) == 0);
    const std::string smiles = slurp(tmp.file("smiles.csv"));
    CHECK(smiles.rfind("T,K,market_iv,model_iv,constant_eta_iv", 0) == 0);
    CHECK(fs::exists(tmp.file("smiles.csv") + ".mse.csv"));

    // aggregate over a directory of reports
    fs::create_directories(tmp.file("reports"));
    fs::copy_file(tmp.file("report.json"), tmp.file("reports/day1.json"));
    fs::copy_file(tmp.file("report.json"), tmp.file("reports/day2.json"));
    CHECK(run({"aggregate", "--in", tmp.file("reports"), "--out", tmp.file("table.csv")}) == 0);
    CHECK(slurp(tmp.file("table.csv")).rfind("model,index,n_days,mean_p,max_p", 0) == 0);
}

TEST_CASE("smile-report requires the constant-eta block") {
    TempDir tmp;
    write(tmp.file("cfg.json"), kSmallConfig);
    REQUIRE(run({"gen-synthetic", "--in", tmp.file("cfg.json"), "--out",
                 tmp.file("quotes.csv")}) == 0);
    REQUIRE(run({"calibrate", "--in", tmp.file("quotes.csv"), "--out", tmp.file("fits.json"),
                 "--model", "nig"}) == 0);
    CHECK(run({"smile-report", "--in", tmp.file("quotes.csv"), "--fits", tmp.file("fits.json"),
               "--out", tmp.file("smiles.csv")}) == 1);
}

TEST_CASE("repeated runs with one seed are byte-identical") {
    TempDir tmp;
    write(tmp.file("cfg.json"), kSmallConfig);
    REQUIRE(run({"gen-synthetic", "--in", tmp.file("cfg.json"), "--out", tmp.file("a.csv")}) == 0);
    REQUIRE(run({"gen-synthetic", "--in", tmp.file("cfg.json"), "--out", tmp.file("b.csv")}) == 0);
    CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
    CHECK(slurp(tmp.file("a.csv.truth.json")) == slurp(tmp.file("b.csv.truth.json")));

    // a different seed changes the quotes
    REQUIRE(run({"gen-synthetic", "--in", tmp.file("cfg.json"), "--seed", "43", "--out",
                 tmp.file("c.csv")}) == 0);
    CHECK(slurp(tmp.file("a.csv")) != slurp(tmp.file("c.csv")));
}

TEST_CASE("price and mc-check emit consistent tables") {
    TempDir tmp;
    CurveSpec curve;
    const ModelParams truth = ModelParams::from_curve(curve, 0.5, {0.25, 1.0}, "NIG");
    write(tmp.file("params.json"), model_to_json(truth).dump(2));
    write(tmp.file("strikes.csv"), "T,strike\n0.25,95\n0.25,105\n1,100\n");

    CHECK(run({"price", "--params", tmp.file("params.json"), "--in", tmp.file("strikes.csv"),
               "--out", tmp.file("prices.csv")}) == 0);
    std::istringstream in(slurp(tmp.file("prices.csv")));
    std::string header;
    std::getline(in, header);
    CHECK(header == "T,K,call_price,put_price,iv");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        double t, k, c, p, iv;
        char ch;
        std::istringstream ls(line);
        ls >> t >> ch >> k >> ch >> c >> ch >> p >> ch >> iv;
        const double fwd = 100.0 * std::exp(0.02 * t);
        const double disc = std::exp(-0.02 * t);
        CHECK(c - p == doctest::Approx(disc * (fwd - k)).epsilon(1e-9)); // parity
        CHECK(iv > 0.0);
        ++rows;
    }
    CHECK(rows == 3);

    CHECK(run({"mc-check", "--params", tmp.file("params.json"), "--in", tmp.file("strikes.csv"),
               "--out", tmp.file("mc.json"), "--samples", "100000", "--seed", "9"}) == 0);
    const json mc = read_json_file(tmp.file("mc.json"));
    REQUIRE(mc.is_array());
    REQUIRE(mc.size() == 3);
    for (const auto& row : mc) {
        CHECK(std::abs(row.at("z_score").get<double>()) < 6.0);
        CHECK(row.at("mc_se").get<double>() > 0.0);
    }
}

TEST_CASE("params json: omitted phi is recomputed from the martingale condition") {
    const json j = {{"alpha", 0.5},
                    {"tenors", json::array({{{"T", 0.5}, {"sigma", 0.25}, {"k", 0.4},
                                             {"eta", 0.9}}})}};
    const ModelParams m = model_from_json(j);
    REQUIRE(m.tenors.size() == 1);
    CHECK(m.tenors[0].phi ==
          doctest::Approx(martingale_drift(0.25, 0.4, 0.9, 0.5, 0.5)).epsilon(1e-14));
    // and the martingale condition holds for the rebuilt model
    CHECK(std::abs(std::exp(ats_log_chf({0.0, -1.0}, m.tenors[0], 0.5))) ==
          doctest::Approx(1.0).epsilon(1e-12));

    json bad = j;
    bad["alpha"] = 1.5;
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
}

TEST_CASE("lab subcommand writes the diagnostics report") {
    TempDir tmp;
    CHECK(run({"lab", "--out", tmp.file("lab.json")}) == 0);
    const json lab = read_json_file(tmp.file("lab.json"));
    CHECK(lab.at("gamma_bound_ok").get<bool>());
    CHECK(lab.at("tss_validation").empty());
    CHECK(lab.at("exponent_match_max_err").get<double>() <= 1e-6);
    CHECK(lab.at("representability").at("representable").get<bool>());
    CHECK(lab.at("independence_gap_max_constant").get<double>() <= 1e-12);
    CHECK(lab.at("independence_gap_max_scaled").get<double>() >= 1e-3);

    // a scaling model is flagged as not representable
    CurveSpec curve;
    const ModelParams scaling = ModelParams::from_curve(curve, 0.5, {0.1, 0.5, 1.0}, "NIG");
    write(tmp.file("scaling.json"), model_to_json(scaling).dump(2));
    CHECK(run({"lab", "--in", tmp.file("scaling.json"), "--out", tmp.file("lab2.json")}) == 0);
    CHECK(!read_json_file(tmp.file("lab2.json"))
               .at("representability")
               .at("representable")
               .get<bool>());
}

TEST_CASE("numerical failures exit with code 2") {
    TempDir tmp;
    // eta so small and k so large that no damped contour is admissible
    ModelParams awkward;
    awkward.alpha = 0.5;
    TenorParams tn;
    tn.maturity = 1.0;
    tn.sigma = 0.2;
    tn.k = 2000.0;
    tn.eta = 1e-4;
    tn.phi = martingale_drift(tn.sigma, tn.k, tn.eta, awkward.alpha, tn.maturity);
    awkward.tenors = {tn};
    write(tmp.file("params.json"), model_to_json(awkward).dump(2));
    write(tmp.file("strikes.csv"), "T,strike\n1,100\n");
    CHECK(run({"price", "--params", tmp.file("params.json"), "--in", tmp.file("strikes.csv"),
               "--out", tmp.file("prices.csv")}) == 2);
}
