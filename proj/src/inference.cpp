#include "atslab/inference.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ats {

ScalingReport fit_power_law(const std::vector<ThetaPoint>& points, bool equal_weights) {
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("fit_power_law: need >= 3 points");
    for (const auto& p : points) {
        if (!(p.theta > 0.0)) throw std::invalid_argument("fit_power_law: theta must be > 0");
        if (!(p.eta_hat > 0.0)) throw std::invalid_argument("fit_power_law: eta_hat must be > 0");
        if (!(p.var_log_eta >= 0.0))
            throw std::invalid_argument("fit_power_law: negative variance");
    }

    std::vector<double> w(n, 1.0);
    if (!equal_weights) {
        double wmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (points[i].var_log_eta > 0.0) wmax = std::max(wmax, 1.0 / points[i].var_log_eta);
        if (wmax > 0.0) {
            for (std::size_t i = 0; i < n; ++i)
                w[i] = points[i].var_log_eta > 0.0 ? 1.0 / points[i].var_log_eta : wmax;
        } // all variances zero -> equal weights
    }

    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(points[i].theta);
        const double y = std::log(points[i].eta_hat);
        sw += w[i];
        swx += w[i] * x;
        swy += w[i] * y;
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(points[i].theta) - xbar;
        const double dy = std::log(points[i].eta_hat) - ybar;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: degenerate theta values");

    ScalingReport rep;
    rep.n_points = static_cast<int>(n);
    rep.delta_hat = sxy / sxx;
    rep.log_eta_hat = ybar - rep.delta_hat * xbar;

    double rss = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(points[i].theta);
        const double y = std::log(points[i].eta_hat);
        const double r = y - rep.log_eta_hat - rep.delta_hat * x;
        rss += w[i] * r * r;
        tss += w[i] * (y - ybar) * (y - ybar);
    }
    const double dof = static_cast<double>(n - 2);
    const double s2 = rss / dof;
    rep.se_delta = std::sqrt(s2 / sxx);
    rep.se_log_eta = std::sqrt(s2 * (1.0 / sw + xbar * xbar / sxx));
    rep.r_squared_weighted = tss > 0.0 ? 1.0 - rss / tss : 1.0;

    if (rep.se_delta > 0.0) {
        rep.t_stat = rep.delta_hat / rep.se_delta;
        boost::math::students_t_distribution<double> st(dof);
        rep.p_value = 2.0 * boost::math::cdf(boost::math::complement(st, std::abs(rep.t_stat)));
    } else if (rep.delta_hat == 0.0) {
        rep.t_stat = 0.0;
        rep.p_value = 1.0; // exactly flat, exactly fit
    } else {
        rep.t_stat = std::numeric_limits<double>::infinity() * (rep.delta_hat > 0 ? 1.0 : -1.0);
        rep.p_value = 0.0; // exact power law with nonzero slope
    }
    return rep;
}

AggregateReport aggregate_days(const std::vector<TaggedReport>& reports, double threshold) {
    if (reports.empty()) throw std::invalid_argument("aggregate_days: no reports");
    std::map<std::pair<std::string, std::string>, std::vector<const TaggedReport*>> groups;
    for (const auto& r : reports) groups[{r.model, r.index}].push_back(&r);

    AggregateReport agg;
    agg.threshold = threshold;
    for (const auto& [key, group] : groups) {
        AggregateRow row;
        row.model = key.first;
        row.index = key.second;
        row.n_days = static_cast<int>(group.size());
        row.max_p = 0.0;
        double sum = 0.0;
        for (const auto* r : group) {
            sum += r->report.p_value;
            row.max_p = std::max(row.max_p, r->report.p_value);
            if (r->report.p_value >= threshold) row.flagged_days.push_back(r->day);
        }
        row.mean_p = sum / static_cast<double>(group.size());
        agg.rows.push_back(row);
    }
    return agg;
}

} // namespace ats
