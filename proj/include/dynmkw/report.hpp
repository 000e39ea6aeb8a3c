#pragma once

#include "dynmkw/detector.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dynmkw {

inline constexpr int kReportSchemaVersion = 1;

// Per-segment coordinate means: the piecewise-constant smoothed signal.
Matrix segment_means(const ObservationMatrix& x, const Segmentation& segmentation);

struct SegmentationReport {
    std::string method;
    Index n = 0;
    Index dims = 0;
    Index min_seg_len = 1;
    std::vector<std::string> labels;
    std::vector<Index> boundaries;
    std::vector<double> curve;
    std::optional<Index> k_hat;
    std::optional<double> gate_pvalue;
    bool gated = false;
    bool low_confidence = false;
    Matrix means;  // segments x dims
    std::optional<double> ridge;
    std::optional<double> bandwidth;
    std::optional<double> statistic;
    std::optional<Index> df;
    bool costs_materialized = false;
    std::uint64_t seed = 0;
    std::optional<double> wall_time_seconds;
};

SegmentationReport make_report(const ObservationMatrix& x, const Detection& detection,
                               const DetectorOptions& options,
                               std::vector<std::string> labels = {});

nlohmann::json to_json(const SegmentationReport& report);
SegmentationReport report_from_json(const nlohmann::json& j);

}  // namespace dynmkw
