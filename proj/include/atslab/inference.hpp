#pragma once
#include <string>
#include <vector>

#include "atslab/calibration.hpp"

namespace ats {

struct ScalingReport {
    double delta_hat = 0.0;   // slope of ln eta_hat on ln theta
    double log_eta_hat = 0.0; // intercept
    double se_delta = 0.0;
    double se_log_eta = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0; // two-sided, Student t with n-2 df
    int n_points = 0;
    double r_squared_weighted = 0.0;
};

// Weighted least squares of ln eta_hat on ln theta. Weights are the inverse
// delta-method variances of ln eta_hat; zero-variance points borrow the
// largest finite weight, and all-zero variances (or equal_weights) fall back
// to an unweighted fit.
ScalingReport fit_power_law(const std::vector<ThetaPoint>& points, bool equal_weights = false);

struct TaggedReport {
    std::string day;
    std::string model;
    std::string index;
    ScalingReport report;
};

struct AggregateRow {
    std::string model;
    std::string index;
    int n_days = 0;
    double mean_p = 0.0;
    double max_p = 0.0;
    std::vector<std::string> flagged_days; // p >= threshold
};

struct AggregateReport {
    double threshold = 1e-3;
    std::vector<AggregateRow> rows;
};

AggregateReport aggregate_days(const std::vector<TaggedReport>& reports,
                               double threshold = 1e-3);

} // namespace ats
