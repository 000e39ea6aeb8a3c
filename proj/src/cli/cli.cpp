#include "dynmkw/cli.hpp"

#include "dynmkw/csv.hpp"
#include "dynmkw/distributions.hpp"
#include "dynmkw/random.hpp"
#include "dynmkw/report.hpp"
#include "dynmkw/simbench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dynmkw::cli {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Writes to --output when given, else to the command's stdout.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << text;
}

char parse_delimiter(const std::string& text) {
    if (text == "\\t" || text == "tab") return '\t';
    if (text.size() != 1) throw UsageError("--delimiter must be a single character or 'tab'");
    return text.front();
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
    std::string input;
    std::string output;
    std::optional<Index> k;
    std::optional<Index> kmax;
    Index min_seg_len = 1;
    std::string method = "dynmkw";
    double alpha = 0.05;
    Index permutations = 999;
    std::uint64_t seed = 0;
    double ridge_budget = kDefaultMaxRidge;
    std::size_t memory_budget = kDefaultMemoryBudget;
    double bandwidth = 0.0;
    bool header = false;
    std::string delimiter = ",";
    std::string binseg_scope = "local";
    unsigned threads = 1;
    bool timing = false;
};

void add_segment(CLI::App& app, SegmentArgs& a) {
    auto* cmd = app.add_subcommand("segment", "Detect change-points in a CSV signal (rows = time)");
    cmd->add_option("--input", a.input, "Input CSV path")->required();
    auto* k = cmd->add_option("--k", a.k, "Fixed number of segments K");
    auto* kmax = cmd->add_option("--kmax", a.kmax,
                                 "Largest number of segments when estimating K (default: min(21, n/(2 min_seg_len) + 1))");
    k->excludes(kmax);
    kmax->excludes(k);
    cmd->add_option("--min-seg-len", a.min_seg_len, "Minimum segment length")->check(CLI::PositiveNumber);
    cmd->add_option("--method", a.method, "dynmkw | linear | kernel | binseg")
        ->check(CLI::IsMember({"dynmkw", "linear", "kernel", "binseg"}));
    cmd->add_option("--alpha", a.alpha, "Level of the zero-change gate or of binseg splits")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--permutations", a.permutations, "Permutation replicates B")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "Random seed");
    cmd->add_option("--ridge-budget", a.ridge_budget,
                    "Largest covariance ridge tried, relative to trace/L")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--memory-budget", a.memory_budget,
                    "Bytes allowed for the materialized segment-cost table");
    cmd->add_option("--bandwidth", a.bandwidth, "Kernel bandwidth (default: median heuristic)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--header", a.header, "First CSV row holds column labels");
    cmd->add_option("--delimiter", a.delimiter, "CSV delimiter");
    cmd->add_option("--binseg-scope", a.binseg_scope, "Rank covariance used by binseg tests")
        ->check(CLI::IsMember({"local", "global"}));
    cmd->add_option("--threads", a.threads, "Worker threads for permutation tests (0 = all cores)");
    cmd->add_option("--output", a.output, "Write the JSON report here instead of stdout");
    cmd->add_flag("--timing", a.timing, "Include wall time in the report");
}

int run_segment(const SegmentArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    CsvData data = read_csv(a.input, a.header, parse_delimiter(a.delimiter));

    DetectorOptions opt;
    opt.method = *parse_method(a.method);
    if (a.k) {
        if (*a.k < 1) throw UsageError("--k must be >= 1");
        opt.segments = *a.k;
    }
    if (a.kmax) {
        if (*a.kmax < 4) throw UsageError("--kmax must be >= 4 for the slope heuristic");
        opt.max_change_points = *a.kmax - 1;
    }
    if (opt.method == Method::binseg && a.k) throw UsageError("--k cannot be combined with --method binseg");
    opt.min_seg_len = a.min_seg_len;
    opt.alpha = a.alpha;
    opt.permutations = a.permutations;
    opt.seed = a.seed;
    opt.max_ridge = a.ridge_budget;
    opt.memory_budget = a.memory_budget;
    opt.bandwidth = a.bandwidth;
    opt.binseg_scope = a.binseg_scope == "global" ? CovarianceScope::global : CovarianceScope::local;
    opt.threads = a.threads;

    const Detection det = detect(data.matrix, opt);
    SegmentationReport report = make_report(data.matrix, det, opt, std::move(data.labels));
    if (a.timing) {
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(a.output, to_json(report).dump(2) + "\n", out);
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::string output;
    Index replications = 100;
    std::vector<double> snr_db;
    std::string snr_grid;
    bool known_k = false;
    std::vector<std::string> methods{"dynmkw"};
    std::vector<double> outlier_rates{0.0};
    double outlier_excess_db = 10.0;
    std::uint64_t seed = 1;
    double correlation = 0.3;
    std::string snr_convention = "amplitude";
    Index tolerance = 1;
    Index permutations = 999;
    Index min_seg_len = 1;
    unsigned threads = 0;
    CLI::App* cmd = nullptr;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
    auto* cmd = app.add_subcommand("simulate", "Monte-Carlo precision/recall benchmark (tidy CSV)");
    a.cmd = cmd;
    cmd->add_option("--config", a.config, "JSON scenario file; explicit flags override it");
    cmd->add_option("--replications", a.replications, "Replicates per SNR")->check(CLI::PositiveNumber);
    cmd->add_option("--snr-db", a.snr_db, "SNR values in dB (comma separated)")->delimiter(',');
    cmd->add_option("--snr-grid", a.snr_grid, "SNR grid lo:hi:step (default 0:30:2)");
    cmd->add_flag("--known-k", a.known_k, "Give every method the true number of changes");
    cmd->add_option("--methods", a.methods, "dynmkw, linear, kernel, binseg[@alpha]")->delimiter(',');
    cmd->add_option("--outlier-rate", a.outlier_rates, "Outlier row fractions (comma separated)")
        ->delimiter(',');
    cmd->add_option("--outlier-excess-db", a.outlier_excess_db, "Outlier variance above the noise, dB");
    cmd->add_option("--seed", a.seed, "Random seed");
    cmd->add_option("--correlation", a.correlation, "Noise equicorrelation")->check(CLI::Range(-0.25, 1.0));
    cmd->add_option("--snr-convention", a.snr_convention, "amplitude (20 log10) | power (10 log10)")
        ->check(CLI::IsMember({"amplitude", "power"}));
    cmd->add_option("--tolerance", a.tolerance, "Matching tolerance in samples")->check(CLI::NonNegativeNumber);
    cmd->add_option("--permutations", a.permutations, "Permutation replicates")->check(CLI::PositiveNumber);
    cmd->add_option("--min-seg-len", a.min_seg_len, "Minimum segment length")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--output", a.output, "Write the CSV here instead of stdout");
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo) {
        throw UsageError("--snr-grid expects lo:hi:step with step > 0");
    }
    std::vector<double> grid;
    for (int i = 0; lo + i * step <= hi + 1e-9 * step; ++i) grid.push_back(lo + i * step);
    return grid;
}

bool given(const CLI::App* cmd, const char* name) { return cmd->count(name) > 0; }

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    BenchmarkPlan plan;
    SimConfig& cfg = plan.config;
    std::vector<std::string> methods = a.methods;
    bool known_k = a.known_k;
    double rho = a.correlation;
    std::optional<nlohmann::json> levels;

    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw UsageError("cannot open config " + a.config);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("invalid config: ") + e.what());
        }
        try {
            cfg.n = j.value("n", cfg.n);
            cfg.dims = j.value("dims", cfg.dims);
            cfg.boundaries = j.value("boundaries", cfg.boundaries);
            cfg.jump_amplitude = j.value("jump_amplitude", cfg.jump_amplitude);
            cfg.outlier_excess_db = j.value("outlier_excess_db", cfg.outlier_excess_db);
            cfg.replications = j.value("replications", cfg.replications);
            cfg.seed = j.value("seed", cfg.seed);
            rho = j.value("correlation", rho);
            if (j.contains("snr_convention")) {
                const auto conv = j["snr_convention"].get<std::string>();
                if (conv != "amplitude" && conv != "power") throw UsageError("bad snr_convention");
                cfg.snr_convention = conv == "power" ? SnrConvention::power : SnrConvention::amplitude;
            }
            plan.snr_db = j.value("snr_db", plan.snr_db);
            plan.outlier_rates = j.value("outlier_rates", plan.outlier_rates);
            methods = j.value("methods", methods);
            known_k = j.value("known_k", known_k);
            plan.settings.tolerance = j.value("tolerance", plan.settings.tolerance);
            plan.settings.permutations = j.value("permutations", plan.settings.permutations);
            plan.settings.min_seg_len = j.value("min_seg_len", plan.settings.min_seg_len);
            if (j.contains("levels")) levels = j["levels"];
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("invalid config: ") + e.what());
        }
    }

    const CLI::App* cmd = a.cmd;
    if (given(cmd, "--replications")) cfg.replications = a.replications;
    if (given(cmd, "--outlier-excess-db")) cfg.outlier_excess_db = a.outlier_excess_db;
    if (given(cmd, "--seed")) cfg.seed = a.seed;
    if (given(cmd, "--snr-convention")) {
        cfg.snr_convention = a.snr_convention == "power" ? SnrConvention::power : SnrConvention::amplitude;
    }
    if (given(cmd, "--known-k")) known_k = true;
    if (given(cmd, "--methods")) methods = a.methods;
    if (given(cmd, "--outlier-rate")) plan.outlier_rates = a.outlier_rates;
    if (given(cmd, "--tolerance")) plan.settings.tolerance = a.tolerance;
    if (given(cmd, "--permutations")) plan.settings.permutations = a.permutations;
    if (given(cmd, "--min-seg-len")) plan.settings.min_seg_len = a.min_seg_len;
    if (given(cmd, "--snr-db") && given(cmd, "--snr-grid")) {
        throw UsageError("--snr-db and --snr-grid are mutually exclusive");
    }
    if (given(cmd, "--snr-db")) plan.snr_db = a.snr_db;
    if (given(cmd, "--snr-grid")) plan.snr_db = parse_grid(a.snr_grid);
    plan.settings.threads = a.threads;
    plan.settings.known_k = known_k;

    if (levels) {
        cfg.levels.resize(static_cast<Index>(levels->size()), cfg.dims);
        for (std::size_t s = 0; s < levels->size(); ++s) {
            const auto row = (*levels)[s].get<std::vector<double>>();
            if (static_cast<Index>(row.size()) != cfg.dims) throw UsageError("levels rows must have L entries");
            for (Index c = 0; c < cfg.dims; ++c) cfg.levels(static_cast<Index>(s), c) = row[static_cast<std::size_t>(c)];
        }
    } else {
        cfg.levels = default_levels(cfg.dims, static_cast<Index>(cfg.boundaries.size()) + 1,
                                    cfg.jump_amplitude);
    }
    cfg.noise_correlation = equicorrelation(cfg.dims, rho);

    for (const std::string& m : methods) {
        auto spec = parse_method_spec(m);
        if (!spec) throw UsageError("unknown method '" + m + "'");
        if (known_k && spec->method == Method::binseg) {
            throw UsageError("binseg has no known-K mode; drop --known-k or the method");
        }
        plan.methods.push_back(*spec);
    }
    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::ostringstream csv;
    write_benchmark_csv(csv, run_benchmark(plan));
    emit(a.output, csv.str(), out);
    return kExitOk;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
    Index n = 200;
    Index dims = 2;
    Index k = 3;
    Index replications = 2000;
    std::uint64_t seed = 1;
    std::string output;
};

void add_calibrate(CLI::App& app, CalibrateArgs& a) {
    auto* cmd = app.add_subcommand(
        "calibrate", "Sample T under i.i.d. Gaussian null data with equally spaced boundaries");
    cmd->add_option("--n", a.n, "Series length");
    cmd->add_option("--dims", a.dims, "Dimension L");
    cmd->add_option("--k", a.k, "Number of groups K (>= 2)");
    cmd->add_option("--replications", a.replications, "Number of null samples");
    cmd->add_option("--seed", a.seed, "Random seed");
    cmd->add_option("--output", a.output, "Write the CSV here instead of stdout");
}

int run_calibrate(const CalibrateArgs& a, std::ostream& out) {
    if (a.replications < 1) throw UsageError("--replications must be >= 1");
    if (a.k < 2) throw UsageError("--k must be >= 2 (the test is undefined for a single group)");
    if (a.dims < 1) throw UsageError("--dims must be >= 1");
    if (a.n < 2 * a.k) throw UsageError("--n must be at least 2 * K");

    std::vector<Index> boundaries;
    for (Index k = 1; k < a.k; ++k) {
        boundaries.push_back((k * a.n + a.k - 1) / a.k);  // ceil(k n / K)
    }
    const Segmentation seg(a.n, boundaries);
    const Index df = (a.k - 1) * a.dims;

    std::vector<double> stats(static_cast<std::size_t>(a.replications));
    for (Index r = 0; r < a.replications; ++r) {
        Rng rng = make_stream(a.seed, {static_cast<std::uint64_t>(r)});
        std::normal_distribution<double> normal;
        Matrix x(a.n, a.dims);
        for (Index i = 0; i < a.n; ++i) {
            for (Index j = 0; j < a.dims; ++j) x(i, j) = normal(rng);
        }
        const RankTable ranks = compute_ranks(ObservationMatrix(std::move(x)));
        stats[static_cast<std::size_t>(r)] = statistic_t(ranks, rank_covariance(ranks), seg).value;
    }

    // Reference quantile at the plotting position of each sample's rank.
    std::vector<std::size_t> order(stats.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return stats[x] < stats[y]; });
    std::vector<double> position(stats.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        position[order[rank]] = (static_cast<double>(rank) + 0.5) / static_cast<double>(stats.size());
    }

    std::ostringstream csv;
    csv << "schema_version,replicate,statistic,df,plotting_position,chi2_quantile\n";
    for (std::size_t r = 0; r < stats.size(); ++r) {
        csv << kBenchmarkSchemaVersion << ',' << r << ',' << format_double(stats[r]) << ',' << df << ','
            << format_double(position[r]) << ','
            << format_double(chi2_quantile(position[r], static_cast<double>(df))) << '\n';
    }
    emit(a.output, csv.str(), out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dynmkw: rank-based multiple change-point detection"};
    app.require_subcommand(1);
    SegmentArgs seg;
    SimulateArgs sim;
    CalibrateArgs cal;
    add_segment(app, seg);
    add_simulate(app, sim);
    add_calibrate(app, cal);

    std::vector<std::string> storage{"dynmkw"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand("segment")) return run_segment(seg, out);
        if (app.got_subcommand("simulate")) return run_simulate(sim, out);
        if (app.got_subcommand("calibrate")) return run_calibrate(cal, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace dynmkw::cli
