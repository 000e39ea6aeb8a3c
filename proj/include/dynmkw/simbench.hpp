#pragma once

// Synthetic piecewise-constant signals with correlated Gaussian noise and
// optional outliers, plus a Monte-Carlo precision/recall harness.

#include "dynmkw/detector.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dynmkw {

enum class SnrConvention {
    amplitude,  // snr_db = 20 log10(jump / sigma)
    power,      // snr_db = 10 log10(jump / sigma)
};

struct SimConfig {
    Index n = 500;
    Index dims = 5;
    std::vector<Index> boundaries{100, 200, 300, 400};
    Matrix levels;             // segments x dims baseline levels
    double jump_amplitude = 1.0;
    double snr_db = 16.0;
    SnrConvention snr_convention = SnrConvention::amplitude;
    Matrix noise_correlation;  // dims x dims, PSD with unit diagonal
    double outlier_rate = 0.0;
    double outlier_excess_db = 10.0;
    Index replications = 100;
    std::uint64_t seed = 1;
};

// n = 500, L = 5, boundaries (100, 200, 300, 400), unit jumps toggling three
// of the five coordinates per boundary, equicorrelated noise (rho = 0.3).
SimConfig default_sim_config();

// Builds the default level pattern and equicorrelation for arbitrary sizes.
Matrix default_levels(Index dims, Index segments, double amplitude);
Matrix equicorrelation(Index dims, double rho);

// Throws std::invalid_argument on any broken invariant.
void validate(const SimConfig& config);

// sigma = jump / 10^(snr_db / 20) (or / 10 under the power convention); 0 at +inf dB.
double noise_sigma(const SimConfig& config);

struct SimulatedSignal {
    Matrix clean;              // baseline
    Matrix noisy;              // baseline + noise (+ outliers)
    std::vector<Index> truth;
    double sigma = 0.0;
};

// Deterministic per (seed, replicate). Applies outliers when outlier_rate > 0.
SimulatedSignal generate_signal(const SimConfig& config, Index replicate);

// Adds N(0, sigma^2 10^(excess_db / 10)) noise to every coordinate of
// ceil(rate * n) distinct rows chosen uniformly.
Matrix inject_outliers(const Matrix& x, double rate, double excess_db, double sigma,
                       std::uint64_t seed);

struct EvalMetrics {
    double precision = 1.0;
    double recall = 0.0;
    Index tolerance = 1;
    Index detected = 0;
    Index matched = 0;
};

// Greedy one-to-one matching in increasing order: each detection takes the
// first unmatched true change within +-tol. Precision is 1 when nothing was
// detected.
EvalMetrics precision_recall(const std::vector<Index>& estimated, const std::vector<Index>& truth,
                             Index tolerance);

struct MethodSpec {
    Method method = Method::dynmkw;
    double alpha = 0.05;
    std::string label;  // CSV name, e.g. "dynmkw" or "binseg@0.01"
};

// "dynmkw", "linear", "kernel", "binseg" or "binseg@<alpha>".
std::optional<MethodSpec> parse_method_spec(const std::string& text);

struct MetricSummary {
    double mean = 0.0;
    double stderr_ = 0.0;  // NaN when replications == 1
};

struct MethodSummary {
    MetricSummary precision;
    MetricSummary recall;
    MetricSummary detected;
    MetricSummary exact_count;  // share of replicates with as many detections as true changes
    Index replications = 0;
};

struct RunSettings {
    bool known_k = true;
    Index tolerance = 1;
    Index permutations = 999;
    Index min_seg_len = 1;
    unsigned threads = 1;
};

// Per-replicate metrics for one method at the config's SNR and outlier rate.
std::vector<EvalMetrics> monte_carlo_replicates(const SimConfig& config, const MethodSpec& method,
                                                const RunSettings& settings);
MethodSummary summarize(const std::vector<EvalMetrics>& replicates, Index truth_count);
MethodSummary monte_carlo(const SimConfig& config, const MethodSpec& method,
                          const RunSettings& settings);

struct MetricRow {
    std::string method;
    double snr_db = 0.0;
    double outlier_rate = 0.0;
    std::string metric;
    double mean = 0.0;
    double stderr_ = 0.0;
    Index replications = 0;
};

struct BenchmarkPlan {
    SimConfig config = default_sim_config();
    std::vector<double> snr_db;         // defaults to 0, 2, ..., 30
    std::vector<double> outlier_rates;  // defaults to {config.outlier_rate}
    std::vector<MethodSpec> methods;
    RunSettings settings;
};

std::vector<double> default_snr_grid();

// All methods share each replicate's data, so comparisons are paired.
std::vector<MetricRow> run_benchmark(const BenchmarkPlan& plan);

inline constexpr int kBenchmarkSchemaVersion = 1;
void write_benchmark_csv(std::ostream& out, const std::vector<MetricRow>& rows);

}  // namespace dynmkw
