#include "dynmkw/report.hpp"

#include <stdexcept>

namespace dynmkw {

Matrix segment_means(const ObservationMatrix& x, const Segmentation& segmentation) {
    if (segmentation.length() != x.rows()) {
        throw std::invalid_argument("segmentation length does not match the data");
    }
    Matrix means(segmentation.segments(), x.dims());
    Index k = 0;
    for (auto [begin, end] : segmentation.ranges()) {
        means.row(k++) = x.values().middleRows(begin, end - begin).colwise().mean();
    }
    return means;
}

SegmentationReport make_report(const ObservationMatrix& x, const Detection& det,
                               const DetectorOptions& options, std::vector<std::string> labels) {
    SegmentationReport r;
    r.method = std::string(to_string(det.method));
    r.n = x.rows();
    r.dims = x.dims();
    r.min_seg_len = options.min_seg_len;
    r.labels = std::move(labels);
    r.boundaries = det.segmentation.boundaries();
    r.curve = det.curve;
    r.k_hat = det.k_hat;
    r.gate_pvalue = det.gate_pvalue;
    r.gated = det.gated;
    r.low_confidence = det.low_confidence;
    r.means = segment_means(x, det.segmentation);
    r.ridge = det.ridge;
    r.bandwidth = det.bandwidth;
    if (det.statistic) {
        r.statistic = det.statistic->value;
        r.df = det.statistic->df;
    }
    r.costs_materialized = det.costs_materialized;
    r.seed = options.seed;
    return r;
}

nlohmann::json to_json(const SegmentationReport& r) {
    using nlohmann::json;
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["method"] = r.method;
    j["n"] = r.n;
    j["dims"] = r.dims;
    j["min_seg_len"] = r.min_seg_len;
    if (!r.labels.empty()) j["labels"] = r.labels;
    j["boundaries"] = r.boundaries;
    json curve = json::array();
    for (std::size_t d = 0; d < r.curve.size(); ++d) {
        curve.push_back({{"change_points", d}, {"value", r.curve[d]}});
    }
    j["curve"] = curve;
    j["k_hat"] = r.k_hat ? json(*r.k_hat) : json(nullptr);
    j["gate_pvalue"] = r.gate_pvalue ? json(*r.gate_pvalue) : json(nullptr);
    j["gated"] = r.gated;
    j["low_confidence"] = r.low_confidence;
    json means = json::array();
    for (Index k = 0; k < r.means.rows(); ++k) {
        std::vector<double> row(r.means.row(k).begin(), r.means.row(k).end());
        means.push_back(row);
    }
    j["segment_means"] = means;
    j["ridge"] = r.ridge ? json(*r.ridge) : json(nullptr);
    j["regularized"] = r.ridge.has_value() && *r.ridge > 0.0;
    j["bandwidth"] = r.bandwidth ? json(*r.bandwidth) : json(nullptr);
    j["statistic"] = r.statistic ? json(*r.statistic) : json(nullptr);
    j["df"] = r.df ? json(*r.df) : json(nullptr);
    j["costs_materialized"] = r.costs_materialized;
    j["seed"] = r.seed;
    if (r.wall_time_seconds) j["wall_time_seconds"] = *r.wall_time_seconds;
    return j;
}

SegmentationReport report_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
        throw std::runtime_error("unsupported report schema version");
    }
    SegmentationReport r;
    r.method = j.at("method").get<std::string>();
    r.n = j.at("n").get<Index>();
    r.dims = j.at("dims").get<Index>();
    r.min_seg_len = j.at("min_seg_len").get<Index>();
    if (j.contains("labels")) r.labels = j["labels"].get<std::vector<std::string>>();
    r.boundaries = j.at("boundaries").get<std::vector<Index>>();
    for (const auto& point : j.at("curve")) r.curve.push_back(point.at("value").get<double>());
    if (!j.at("k_hat").is_null()) r.k_hat = j["k_hat"].get<Index>();
    if (!j.at("gate_pvalue").is_null()) r.gate_pvalue = j["gate_pvalue"].get<double>();
    r.gated = j.at("gated").get<bool>();
    r.low_confidence = j.at("low_confidence").get<bool>();
    const auto& means = j.at("segment_means");
    r.means.resize(static_cast<Index>(means.size()), r.dims);
    for (std::size_t k = 0; k < means.size(); ++k) {
        for (Index c = 0; c < r.dims; ++c) {
            r.means(static_cast<Index>(k), c) = means[k].at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    if (!j.at("ridge").is_null()) r.ridge = j["ridge"].get<double>();
    if (!j.at("bandwidth").is_null()) r.bandwidth = j["bandwidth"].get<double>();
    if (!j.at("statistic").is_null()) r.statistic = j["statistic"].get<double>();
    if (!j.at("df").is_null()) r.df = j["df"].get<Index>();
    r.costs_materialized = j.at("costs_materialized").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("wall_time_seconds")) r.wall_time_seconds = j["wall_time_seconds"].get<double>();
    return r;
}

}  // namespace dynmkw
