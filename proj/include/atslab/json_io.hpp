#pragma once
#include <optional>
#include <string>

#include "json.hpp"

#include "atslab/calibration.hpp"
#include "atslab/inference.hpp"
#include "atslab/market_data.hpp"
#include "atslab/model.hpp"

namespace ats {

using json = nlohmann::json;

// Model schema: {alpha, label, tenors:[{T, sigma, k, eta, phi}]}. phi may be
// omitted on input; it is then recomputed from the martingale condition.
json model_to_json(const ModelParams& m);
ModelParams model_from_json(const json& j);

json synthetic_config_to_json(const SyntheticConfig& cfg);
SyntheticConfig synthetic_config_from_json(const json& j);

// Calibration output bundle written by `calibrate` and read downstream.
struct FitsDocument {
    double alpha = 0.5;
    std::string label;
    std::string date;
    std::vector<TenorFit> tenors;
    std::vector<ThetaPoint> theta_points;
    std::optional<ConstantEtaFit> constant_eta;
};

json fits_to_json(const FitsDocument& doc);
FitsDocument fits_from_json(const json& j);

json scaling_report_to_json(const ScalingReport& rep, const std::string& day,
                            const std::string& model, const std::string& index);
TaggedReport tagged_report_from_json(const json& j);

std::string read_text_file(const std::string& path);
json read_json_file(const std::string& path);

// Temp-file-plus-rename so partially written outputs never appear.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace ats
