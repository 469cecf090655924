#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "atslab/model.hpp"
#include "atslab/pricing.hpp"
#include "atslab/sampling.hpp"

namespace ats {

struct OptionQuote {
    std::string date; // trade date, ISO yyyy-mm-dd
    double maturity = 0.0;
    double strike = 0.0;
    bool is_call = true;
    double price = 0.0;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

struct IngestResult {
    std::vector<OptionQuote> quotes;
    std::vector<RejectedRow> rejects;
};

struct SmilePoint {
    double strike = 0.0;
    double iv = 0.0;
};

struct Smile {
    double maturity = 0.0;
    double forward = 0.0;
    double discount = 1.0;
    std::vector<SmilePoint> points; // strikes strictly increasing
};

struct Surface {
    std::string date;
    std::vector<Smile> smiles; // maturities increasing
};

// CSV schema (bit-exact): header "date,T,strike,flag,price", flag in {C,P},
// '.' decimals, LF line endings, values at 12 significant digits on emit.
IngestResult ingest_quotes(std::istream& in);
IngestResult ingest_quotes_file(const std::string& path);
void emit_quotes(std::ostream& out, const std::vector<OptionQuote>& quotes);

// Put-call parity regression at one maturity: OLS of (C - P) on K gives
// slope -D and intercept D*F. Needs >= 2 strikes quoted on both sides and a
// discount in (0, 1.2].
struct ForwardDiscount {
    double forward = 0.0;
    double discount = 1.0;
    std::size_t n_pairs = 0;
};
ForwardDiscount extract_forward_discount(const std::vector<OptionQuote>& quotes_at_t);

// Keeps points whose call-equivalent Black delta lies in the open interval.
Smile filter_by_delta(const Smile& smile, double lo = 0.10, double hi = 0.90);

// Groups quotes by maturity, extracts (F, D), converts the out-of-the-money
// side to implied volatility and assembles sorted smiles.
Surface build_surface(const std::vector<OptionQuote>& quotes, double delta_lo = 0.10,
                      double delta_hi = 0.90);

struct SyntheticConfig {
    CurveSpec curve;
    double alpha = 0.5;
    std::string label; // derived from alpha when empty
    std::vector<double> maturities = {1.0 / 52, 2.0 / 52, 1.0 / 12, 2.0 / 12,
                                      3.0 / 12, 6.0 / 12, 1.0,      2.0};
    std::string strike_rule = "delta"; // or "moneyness"
    int n_strikes = 11;
    double noise_bps = 5.0; // iv noise std, basis points
    RngSpec rng;
    double spot = 100.0;
    double rate = 0.02;
    std::string date = "2024-01-02";

    void validate() const;
};

struct SyntheticSurface {
    std::vector<OptionQuote> quotes; // call and put per strike
    ModelParams truth;
    SyntheticConfig config;
};

// Prices the ground-truth model on the configured grid, perturbs implied
// volatilities with iid Gaussian noise (independently per quote) and emits
// call/put price quotes.
SyntheticSurface gen_synthetic_surface(const SyntheticConfig& cfg);

} // namespace ats
