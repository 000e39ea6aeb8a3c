#include "dynmkw/simbench.hpp"

#include "dynmkw/parallel.hpp"
#include "dynmkw/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dynmkw {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kOutlierStream = 0x6f75746c;
constexpr std::uint64_t kMethodStream = 0x6d657468;

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

// Coordinates that change at boundary k.
std::vector<Index> changing_coordinates(Index dims, Index k) {
    if (dims == 5) {
        static const std::vector<std::vector<Index>> kPattern{{0, 1, 2}, {1, 3, 4}, {0, 2, 3}, {0, 1, 4}};
        return kPattern[static_cast<std::size_t>(k) % kPattern.size()];
    }
    if (dims == 1) return {0};
    if (dims == 2) return {k % 2};
    return {k % dims, (k + 1) % dims};
}

Matrix correlation_factor(const Matrix& correlation) {
    if (!correlation.isApprox(correlation.transpose(), 1e-12)) {
        throw std::invalid_argument("noise correlation is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(correlation);
    const Vector lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-10 * std::max(1.0, lambda.maxCoeff())) {
        throw std::invalid_argument("noise correlation is not positive semi-definite");
    }
    return eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}


}  // namespace

Matrix default_levels(Index dims, Index segments, double amplitude) {
    Matrix levels = Matrix::Zero(segments, dims);
    for (Index s = 1; s < segments; ++s) {
        levels.row(s) = levels.row(s - 1);
        for (Index c : changing_coordinates(dims, s - 1)) {
            levels(s, c) = levels(s - 1, c) == 0.0 ? amplitude : 0.0;
        }
    }
    return levels;
}

Matrix equicorrelation(Index dims, double rho) {
    Matrix c = Matrix::Constant(dims, dims, rho);
    c.diagonal().setOnes();
    return c;
}

SimConfig default_sim_config() {
    SimConfig cfg;
    cfg.levels = default_levels(cfg.dims, static_cast<Index>(cfg.boundaries.size()) + 1,
                                cfg.jump_amplitude);
    cfg.noise_correlation = equicorrelation(cfg.dims, 0.3);
    return cfg;
}

void validate(const SimConfig& cfg) {
    if (cfg.n < 2 || cfg.dims < 1) throw std::invalid_argument("simulation needs n >= 2, L >= 1");
    Index previous = 0;
    for (Index b : cfg.boundaries) {
        if (b <= previous || b >= cfg.n) {
            throw std::invalid_argument("true boundaries must be strictly increasing inside (0, n)");
        }
        previous = b;
    }
    const auto segments = static_cast<Index>(cfg.boundaries.size()) + 1;
    if (cfg.levels.rows() != segments || cfg.levels.cols() != cfg.dims) {
        throw std::invalid_argument("levels must be (boundaries + 1) x L");
    }
    for (Index s = 1; s < segments; ++s) {
        const auto changed = (cfg.levels.row(s).array() != cfg.levels.row(s - 1).array()).count();
        if (changed == 0) {
            throw std::invalid_argument("no coordinate changes at boundary " + std::to_string(s));
        }
        if (cfg.dims > 1 && changed == cfg.dims) {
            throw std::invalid_argument("every coordinate changes at boundary " + std::to_string(s) +
                                        "; at least one must stay constant");
        }
    }
    if (cfg.noise_correlation.rows() != cfg.dims || cfg.noise_correlation.cols() != cfg.dims) {
        throw std::invalid_argument("noise correlation must be L x L");
    }
    if (!cfg.noise_correlation.diagonal().isOnes(1e-12)) {
        throw std::invalid_argument("noise correlation must have a unit diagonal");
    }
    correlation_factor(cfg.noise_correlation);
    if (!(cfg.outlier_rate >= 0.0 && cfg.outlier_rate < 1.0)) {
        throw std::invalid_argument("outlier rate must be in [0, 1)");
    }
    if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (std::isnan(cfg.snr_db)) throw std::invalid_argument("SNR must not be NaN");
}

double noise_sigma(const SimConfig& cfg) {
    if (std::isinf(cfg.snr_db) && cfg.snr_db > 0) return 0.0;
    const double divisor = cfg.snr_convention == SnrConvention::amplitude ? 20.0 : 10.0;
    return cfg.jump_amplitude / std::pow(10.0, cfg.snr_db / divisor);
}


SimulatedSignal generate_signal(const SimConfig& cfg, Index replicate) {
    validate(cfg);
    SimulatedSignal sim;
    sim.truth = cfg.boundaries;
    sim.sigma = noise_sigma(cfg);
    sim.clean.resize(cfg.n, cfg.dims);
    Index segment = 0;
    for (Index i = 0; i < cfg.n; ++i) {
        while (segment < static_cast<Index>(cfg.boundaries.size()) &&
               i >= cfg.boundaries[static_cast<std::size_t>(segment)]) {
            ++segment;
        }
        sim.clean.row(i) = cfg.levels.row(segment);
    }

    const Matrix factor = correlation_factor(cfg.noise_correlation);
    Rng rng = make_stream(cfg.seed, {static_cast<std::uint64_t>(replicate), kNoiseStream});
    std::normal_distribution<double> normal;
    Matrix z(cfg.dims, cfg.n);
    for (Index i = 0; i < cfg.n; ++i) {
        for (Index j = 0; j < cfg.dims; ++j) z(j, i) = normal(rng);
    }
    sim.noisy = sim.clean + sim.sigma * (factor * z).transpose();

    if (cfg.outlier_rate > 0.0) {
        sim.noisy = inject_outliers(
            sim.noisy, cfg.outlier_rate, cfg.outlier_excess_db, sim.sigma,
            derive_seed(cfg.seed, {static_cast<std::uint64_t>(replicate), kOutlierStream}));
    }
    return sim;
}

Matrix inject_outliers(const Matrix& x, double rate, double excess_db, double sigma,
                       std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("outlier rate must be in [0, 1)");
    Matrix out = x;
    const Index n = x.rows();
    const auto count = static_cast<Index>(std::ceil(rate * static_cast<double>(n) - 1e-9));
    if (count == 0) return out;

    Rng rng(seed);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(count));
    std::sort(rows.begin(), rows.end());

    const double sd = sigma * std::pow(10.0, excess_db / 20.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index r : rows) {
        for (Index j = 0; j < x.cols(); ++j) out(r, j) += sd * normal(rng);
    }
    return out;
}

EvalMetrics precision_recall(const std::vector<Index>& estimated, const std::vector<Index>& truth,
                             Index tolerance) {
    if (tolerance < 0) throw std::invalid_argument("tolerance must be >= 0");
    std::vector<Index> est = estimated;
    std::sort(est.begin(), est.end());
    std::vector<bool> taken(truth.size(), false);
    EvalMetrics m;
    m.tolerance = tolerance;
    m.detected = static_cast<Index>(est.size());
    for (Index d : est) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (!taken[t] && std::abs(d - truth[t]) <= tolerance) {
                taken[t] = true;
                ++m.matched;
                break;
            }
        }
    }
    m.precision = est.empty() ? 1.0 : static_cast<double>(m.matched) / static_cast<double>(est.size());
    m.recall = truth.empty() ? 1.0 : static_cast<double>(m.matched) / static_cast<double>(truth.size());
    return m;
}

std::optional<MethodSpec> parse_method_spec(const std::string& text) {
    MethodSpec spec;
    spec.label = text;
    const auto at = text.find('@');
    const auto method = parse_method(text.substr(0, at));
    if (!method) return std::nullopt;
    spec.method = *method;
    if (at != std::string::npos) {
        if (spec.method != Method::binseg && spec.method != Method::dynmkw) return std::nullopt;
        const std::string level = text.substr(at + 1);
        auto [ptr, ec] = std::from_chars(level.data(), level.data() + level.size(), spec.alpha);
        if (ec != std::errc() || ptr != level.data() + level.size() || !(spec.alpha >= 0.0) ||
            !(spec.alpha < 1.0)) {
            return std::nullopt;
        }
    }
    return spec;
}

namespace {

// metrics[method][replicate]
std::vector<std::vector<EvalMetrics>> evaluate(const SimConfig& cfg,
                                               const std::vector<MethodSpec>& methods,
                                               const RunSettings& settings) {
    validate(cfg);
    const auto reps = static_cast<std::size_t>(cfg.replications);
    std::vector<std::vector<EvalMetrics>> out(methods.size(), std::vector<EvalMetrics>(reps));
    parallel_for(reps, settings.threads, [&](std::size_t r) {
        try {
            const SimulatedSignal sim = generate_signal(cfg, static_cast<Index>(r));
            const ObservationMatrix x(sim.noisy);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                DetectorOptions opt;
                opt.method = methods[m].method;
                opt.alpha = methods[m].alpha;
                opt.permutations = settings.permutations;
                opt.min_seg_len = settings.min_seg_len;
                opt.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), kMethodStream});
                if (settings.known_k) {
                    if (opt.method == Method::binseg) {
                        throw std::invalid_argument("binseg cannot run with a known number of changes");
                    }
                    opt.segments = static_cast<Index>(sim.truth.size()) + 1;
                }
                const Detection det = detect(x, opt);
                out[m][r] = precision_recall(det.segmentation.boundaries(), sim.truth,
                                             settings.tolerance);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("replicate " + std::to_string(r) + " (seed " +
                                     std::to_string(cfg.seed) + ", snr_db " +
                                     format_double(cfg.snr_db) + ") failed: " + e.what());
        }
    });
    return out;
}

MetricSummary summarize_values(const std::vector<double>& values) {
    MetricSummary s;
    const double count = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    if (values.size() < 2) {
        s.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (count - 1.0) / count);
    return s;
}

}  // namespace

MethodSummary summarize(const std::vector<EvalMetrics>& reps, Index truth_count) {
    std::vector<double> precision, recall, detected, exact;
    for (const EvalMetrics& m : reps) {
        precision.push_back(m.precision);
        recall.push_back(m.recall);
        detected.push_back(static_cast<double>(m.detected));
        exact.push_back(m.detected == truth_count ? 1.0 : 0.0);
    }
    MethodSummary s;
    s.replications = static_cast<Index>(reps.size());
    s.precision = summarize_values(precision);
    s.recall = summarize_values(recall);
    s.detected = summarize_values(detected);
    s.exact_count = summarize_values(exact);
    return s;
}

std::vector<EvalMetrics> monte_carlo_replicates(const SimConfig& cfg, const MethodSpec& method,
                                                const RunSettings& settings) {
    return evaluate(cfg, {method}, settings).front();
}

MethodSummary monte_carlo(const SimConfig& cfg, const MethodSpec& method,
                          const RunSettings& settings) {
    return summarize(monte_carlo_replicates(cfg, method, settings),
                     static_cast<Index>(cfg.boundaries.size()));
}

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int db = 0; db <= 30; db += 2) grid.push_back(db);
    return grid;
}

std::vector<MetricRow> run_benchmark(const BenchmarkPlan& plan) {
    if (plan.methods.empty()) throw std::invalid_argument("benchmark needs at least one method");
    const std::vector<double> snrs = plan.snr_db.empty() ? default_snr_grid() : plan.snr_db;
    const std::vector<double> rates =
        plan.outlier_rates.empty() ? std::vector<double>{plan.config.outlier_rate} : plan.outlier_rates;
    const auto truth_count = static_cast<Index>(plan.config.boundaries.size());

    std::vector<MetricRow> rows;
    for (double rate : rates) {
        for (double snr : snrs) {
            SimConfig cfg = plan.config;
            cfg.snr_db = snr;
            cfg.outlier_rate = rate;
            const auto metrics = evaluate(cfg, plan.methods, plan.settings);
            for (std::size_t m = 0; m < plan.methods.size(); ++m) {
                const MethodSummary s = summarize(metrics[m], truth_count);
                auto add = [&](const char* name, const MetricSummary& v) {
                    rows.push_back({plan.methods[m].label, snr, rate, name, v.mean, v.stderr_,
                                    s.replications});
                };
                add("precision", s.precision);
                add("recall", s.recall);
                add("detected", s.detected);
                add("exact_count", s.exact_count);
            }
        }
    }
    return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "schema_version,method,snr_db,outlier_rate,metric,mean,stderr,replications\n";
    for (const MetricRow& r : rows) {
        out << kBenchmarkSchemaVersion << ',' << r.method << ',' << format_double(r.snr_db) << ','
            << format_double(r.outlier_rate) << ',' << r.metric << ',' << format_double(r.mean)
            << ',' << format_double(r.stderr_) << ',' << r.replications << '\n';
    }
}

}  // namespace dynmkw
