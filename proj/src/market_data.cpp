#include "atslab/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ats {

namespace {

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Maturities keyed with a tolerance so repeated year fractions group together.
struct MaturityLess {
    bool operator()(double a, double b) const { return a < b - 1e-10; }
};

} // namespace

IngestResult ingest_quotes(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("quotes csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,T,strike,flag,price")
        throw std::invalid_argument("quotes csv: bad header, expected date,T,strike,flag,price");

    IngestResult res;
    std::map<std::tuple<double, double, bool>, bool> seen;
    std::size_t line_no = 1;
    std::size_t parsed_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++parsed_rows;
        auto fields = split_csv(line);
        auto reject = [&](const std::string& why) {
            res.rejects.push_back({line_no, why, line});
        };
        if (fields.size() != 5) {
            reject("expected 5 fields");
            continue;
        }
        OptionQuote q;
        q.date = fields[0];
        if (!parse_double(fields[1], q.maturity) || !(q.maturity > 0.0)) {
            reject("T must be a positive number");
            continue;
        }
        if (!parse_double(fields[2], q.strike) || !(q.strike > 0.0)) {
            reject("strike must be a positive number");
            continue;
        }
        if (fields[3] == "C") {
            q.is_call = true;
        } else if (fields[3] == "P") {
            q.is_call = false;
        } else {
            reject("flag must be C or P");
            continue;
        }
        if (!parse_double(fields[4], q.price) || !(q.price > 0.0)) {
            reject("price must be a positive number");
            continue;
        }
        const auto key = std::make_tuple(q.maturity, q.strike, q.is_call);
        if (seen.count(key)) {
            reject("duplicate (T, strike, flag); keep-first policy");
            continue;
        }
        seen[key] = true;
        res.quotes.push_back(q);
    }
    if (parsed_rows > 0 && res.quotes.empty())
        throw std::runtime_error("quotes csv: all rows rejected");
    return res;
}

IngestResult ingest_quotes_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open quotes csv: " + path);
    return ingest_quotes(in);
}

void emit_quotes(std::ostream& out, const std::vector<OptionQuote>& quotes) {
    out << "date,T,strike,flag,price\n";
    for (const auto& q : quotes) {
        out << q.date << ',' << fmt_sig(q.maturity) << ',' << fmt_sig(q.strike) << ','
            << (q.is_call ? 'C' : 'P') << ',' << fmt_sig(q.price) << '\n';
    }
}

ForwardDiscount extract_forward_discount(const std::vector<OptionQuote>& quotes_at_t) {
    std::map<double, std::pair<double, double>> by_strike; // strike -> (call, put)
    std::map<double, std::pair<bool, bool>> have;
    for (const auto& q : quotes_at_t) {
        auto& v = by_strike[q.strike];
        auto& h = have[q.strike];
        if (q.is_call) {
            v.first = q.price;
            h.first = true;
        } else {
            v.second = q.price;
            h.second = true;
        }
    }
    std::vector<double> xs, ys;
    for (const auto& [k, cp] : by_strike) {
        const auto& h = have[k];
        if (h.first && h.second) {
            xs.push_back(k);
            ys.push_back(cp.first - cp.second);
        }
    }
    if (xs.size() < 2)
        throw std::invalid_argument("extract_forward_discount: need >= 2 call/put pairs");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("extract_forward_discount: degenerate strikes");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    ForwardDiscount fd;
    fd.discount = -slope;
    fd.n_pairs = xs.size();
    if (!(fd.discount > 0.0 && fd.discount <= 1.2))
        throw std::runtime_error("extract_forward_discount: implausible discount " +
                                 fmt_sig(fd.discount, 6));
    fd.forward = intercept / fd.discount;
    if (!(fd.forward > 0.0))
        throw std::runtime_error("extract_forward_discount: non-positive forward");
    return fd;
}

Smile filter_by_delta(const Smile& smile, double lo, double hi) {
    Smile out;
    out.maturity = smile.maturity;
    out.forward = smile.forward;
    out.discount = smile.discount;
    for (const auto& p : smile.points) {
        EuropeanOption o;
        o.strike = p.strike;
        o.maturity = smile.maturity;
        o.forward = smile.forward;
        o.discount = smile.discount;
        o.is_call = true;
        const double delta = bs_delta(o, p.iv);
        if (delta > lo && delta < hi) out.points.push_back(p); // open interval
    }
    if (out.points.empty()) throw std::runtime_error("filter_by_delta: no quotes survive");
    return out;
}

Surface build_surface(const std::vector<OptionQuote>& quotes, double delta_lo, double delta_hi) {
    if (quotes.empty()) throw std::invalid_argument("build_surface: no quotes");
    std::map<double, std::vector<OptionQuote>, MaturityLess> by_t;
    for (const auto& q : quotes) by_t[q.maturity].push_back(q);

    Surface surf;
    surf.date = quotes.front().date;
    for (const auto& [t, group] : by_t) {
        const ForwardDiscount fd = extract_forward_discount(group);
        Smile smile;
        smile.maturity = t;
        smile.forward = fd.forward;
        // quote noise can nudge the regression estimate just past 1 at short
        // maturities; options require D in (0, 1]
        smile.discount = std::min(fd.discount, 1.0);
        // one IV per strike from the out-of-the-money side
        std::map<double, const OptionQuote*> chosen;
        for (const auto& q : group) {
            const bool otm_side = q.strike >= fd.forward ? q.is_call : !q.is_call;
            if (!otm_side) continue;
            chosen[q.strike] = &q;
        }
        for (const auto& [k, q] : chosen) {
            EuropeanOption o;
            o.strike = k;
            o.maturity = t;
            o.forward = smile.forward;
            o.discount = smile.discount;
            o.is_call = q->is_call;
            smile.points.push_back({k, implied_vol(q->price, o)});
        }
        surf.smiles.push_back(filter_by_delta(smile, delta_lo, delta_hi));
    }
    return surf;
}

void SyntheticConfig::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("synthetic: bad alpha");
    if (maturities.empty()) throw std::invalid_argument("synthetic: empty maturity grid");
    if (!(noise_bps >= 0.0)) throw std::invalid_argument("synthetic: noise must be >= 0");
    if (n_strikes < 2) throw std::invalid_argument("synthetic: need >= 2 strikes");
    if (strike_rule != "delta" && strike_rule != "moneyness")
        throw std::invalid_argument("synthetic: strike_rule must be delta or moneyness");
    if (!(spot > 0.0)) throw std::invalid_argument("synthetic: spot must be > 0");
}

SyntheticSurface gen_synthetic_surface(const SyntheticConfig& cfg) {
    cfg.validate();
    SyntheticSurface out;
    out.config = cfg;
    out.truth = ModelParams::from_curve(cfg.curve, cfg.alpha, cfg.maturities, cfg.label);

    auto eng = cfg.rng.engine();
    std::normal_distribution<double> noise(0.0, 1.0);
    const double noise_sd = cfg.noise_bps * 1e-4;

    PricingGrid grid;
    for (const auto& tn : out.truth.tenors) {
        const double t = tn.maturity;
        const double fwd = cfg.spot * std::exp(cfg.rate * t);
        const double disc = std::exp(-cfg.rate * t);

        EuropeanOption atm;
        atm.strike = fwd;
        atm.maturity = t;
        atm.forward = fwd;
        atm.discount = disc;
        atm.is_call = true;
        const double atm_iv = implied_vol(fourier_price(atm, out.truth, grid), atm);

        std::vector<double> strikes;
        for (int i = 0; i < cfg.n_strikes; ++i) {
            const double frac = cfg.n_strikes == 1
                                    ? 0.5
                                    : static_cast<double>(i) / (cfg.n_strikes - 1);
            double k;
            if (cfg.strike_rule == "delta") {
                const double delta = 0.12 + frac * (0.88 - 0.12);
                const double z = norm_quantile(delta);
                k = fwd * std::exp(0.5 * atm_iv * atm_iv * t - z * atm_iv * std::sqrt(t));
            } else {
                const double m = -1.28 + frac * 2.56;
                k = fwd * std::exp(m * atm_iv * std::sqrt(t));
            }
            strikes.push_back(k);
        }
        std::sort(strikes.begin(), strikes.end());

        for (double k : strikes) {
            EuropeanOption o;
            o.strike = k;
            o.maturity = t;
            o.forward = fwd;
            o.discount = disc;
            o.is_call = true;
            const double iv = implied_vol(fourier_price(o, out.truth, grid), o);

            for (bool is_call : {true, false}) {
                EuropeanOption q = o;
                q.is_call = is_call;
                const double iv_q = std::max(1e-4, iv + noise_sd * noise(eng));
                OptionQuote row;
                row.date = cfg.date;
                row.maturity = t;
                row.strike = k;
                row.is_call = is_call;
                row.price = black_price(q, iv_q);
                if (!(row.price > 0.0)) continue; // deep intrinsic-zero puts priced at 0
                out.quotes.push_back(row);
            }
        }
    }
    return out;
}

} // namespace ats
