// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any selected criterion fails.

#include "dynmkw/costs.hpp"
#include "dynmkw/detector.hpp"
#include "dynmkw/distributions.hpp"
#include "dynmkw/dp.hpp"
#include "dynmkw/model_select.hpp"
#include "dynmkw/random.hpp"
#include "dynmkw/simbench.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace dynmkw;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned g_threads = 0;

// Independent gains for the brute-force oracle.
double oracle_linear(const Matrix& x, Index b, Index e) {
    Vector s = Vector::Zero(x.cols());
    for (Index i = b; i < e; ++i) s += x.row(i).transpose();
    return s.squaredNorm() / static_cast<double>(e - b);
}

double oracle_kernel(const Matrix& x, Index b, Index e, double h) {
    double s = 0.0;
    for (Index i = b; i < e; ++i)
        for (Index j = b; j < e; ++j)
            s += std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2.0 * h * h));
    return s / static_cast<double>(e - b);
}

Outcome criterion_1() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<Index> size(2, 12), dims(1, 3), segs(1, 4);
    int checked = 0, value_fail = 0, boundary_fail = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 200; ++inst) {
        const Index n = size(rng);
        const Index k = std::min(segs(rng), n);
        const Matrix raw = oracle::random_matrix(rng, n, dims(rng));
        const ObservationMatrix x(raw);

        const Matrix ranks = oracle::counting_midranks(raw);
        const RankTable table = compute_ranks(x);
        const RankCovariance cov = rank_covariance(table);
        Matrix sigma = oracle::ecdf_covariance(ranks);
        sigma.diagonal().array() += cov.ridge();
        const double h = median_heuristic_bandwidth(x, 1);

        const std::vector<std::pair<std::shared_ptr<const SegmentCost>, std::function<double(Index, Index)>>>
            variants{
                {std::make_shared<RankCost>(table, cov),
                 [&](Index b, Index e) { return oracle::direct_cost_eig(ranks, sigma, b, e); }},
                {std::make_shared<LinearCost>(x), [&](Index b, Index e) { return oracle_linear(raw, b, e); }},
                {std::make_shared<KernelCost>(x, h),
                 [&](Index b, Index e) { return oracle_kernel(raw, b, e, h); }},
            };
        for (const auto& [cost, gain] : variants) {
            const DpTable t = solve(CostProvider(cost, 1), k);
            const auto brute = oracle::brute_force(gain, n, k);
            const double diff = std::abs(t.optimum(k) - brute.value);
            worst = std::max(worst, diff);
            value_fail += diff > 1e-9;
            boundary_fail += backtrack(t, k).boundaries() != brute.boundaries;
            ++checked;
        }
    }
    const double elapsed = seconds_since(start);
    return {value_fail == 0 && boundary_fail == 0 && elapsed < 60.0,
            fmt("%d solves, value mismatches %d (max |diff| %.2e), boundary mismatches %d, %.1f s",
                checked, value_fail, worst, boundary_fail, elapsed)};
}

Outcome criterion_2() {
    const auto start = Clock::now();
    const Index n = 200, dims = 2, reps = 2000;
    const Segmentation seg(n, {67, 134});
    std::vector<double> stats;
    for (Index r = 0; r < reps; ++r) {
        Rng rng = make_stream(2, {static_cast<std::uint64_t>(r)});
        const RankTable ranks = compute_ranks(ObservationMatrix(oracle::random_matrix(rng, n, dims)));
        stats.push_back(statistic_t(ranks, rank_covariance(ranks), seg).value);
    }
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= static_cast<double>(reps);
    const double d = ks_statistic(stats, [](double t) { return chi2_cdf(t, 4.0); });
    const double p = ks_pvalue(d, reps);
    const double elapsed = seconds_since(start);
    return {mean >= 3.7 && mean <= 4.3 && p > 0.01 && elapsed < 120.0,
            fmt("mean(T) = %.4f (want [3.7, 4.3]), KS D = %.4f, p = %.4f (want > 0.01), %.1f s", mean, d, p,
                elapsed)};
}

Matrix invariance_dataset(std::mt19937_64& rng) {
    Matrix x = oracle::random_matrix(rng, 120, 3);
    x.middleRows(40, 40).col(0).array() += 1.5;
    x.bottomRows(40).col(2).array() -= 1.5;
    return x;
}

Outcome criterion_3() {
    std::mt19937_64 rng(33);
    DetectorOptions opts;
    opts.permutations = 199;
    opts.seed = 5;
    opts.threads = g_threads;
    DetectorOptions lin;
    lin.method = Method::linear;
    lin.segments = 3;

    int mismatches = 0, linear_differs = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix x = invariance_dataset(rng);
        const Matrix cube = x.array().cube();
        const Matrix expx = x.array().exp();
        const Detection ref = detect(ObservationMatrix(x), opts);
        for (const Matrix* y : {&cube, &expx}) {
            const Detection d = detect(ObservationMatrix(*y), opts);
            const bool same = d.segmentation == ref.segmentation && d.k_hat == ref.k_hat &&
                              d.statistic && ref.statistic && d.statistic->value == ref.statistic->value &&
                              d.gate_pvalue == ref.gate_pvalue;
            mismatches += !same;
        }
        linear_differs += detect(ObservationMatrix(x), lin).segmentation !=
                          detect(ObservationMatrix(expx), lin).segmentation;
    }
    return {mismatches == 0 && linear_differs >= 1,
            fmt("dynMKW mismatches %d / 200 transformed datasets; linear baseline changed on %d / 100",
                mismatches, linear_differs)};
}

Outcome criterion_4() {
    const int reps = 1000;
    int fired = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = make_stream(4, {static_cast<std::uint64_t>(r)});
        const ObservationMatrix x(oracle::random_matrix(rng, 100, 2));
        PermutationOptions perm;
        perm.replicates = 199;
        perm.seed = derive_seed(44, {static_cast<std::uint64_t>(r)});
        perm.threads = g_threads;
        fired += zero_gate(x, 0.05, perm).significant;
    }
    const double rate = static_cast<double>(fired) / reps;
    return {std::abs(rate - 0.05) <= 0.018, fmt("rejection rate %.3f (want 0.050 +- 0.018)", rate)};
}

double mean_precision(SimConfig cfg, double snr, double outliers, const char* method,
                      const RunSettings& settings) {
    cfg.snr_db = snr;
    cfg.outlier_rate = outliers;
    return monte_carlo(cfg, *parse_method_spec(method), settings).precision.mean;
}

Outcome criterion_5() {
    const auto start = Clock::now();
    SimConfig cfg = default_sim_config();
    cfg.replications = 100;
    RunSettings settings;
    settings.known_k = true;
    settings.threads = g_threads;

    const double at16 = mean_precision(cfg, 16.0, 0.0, "dynmkw", settings);
    std::ostringstream detail;
    detail << fmt("(a) dynMKW precision at 16 dB %.3f (want >= 0.9); (b)", at16);
    bool ok_b = true;
    int compared = 0;
    for (double snr = 8.0; snr <= 20.0; snr += 2.0) {
        const double dyn = mean_precision(cfg, snr, 0.0, "dynmkw", settings);
        const double lin = mean_precision(cfg, snr, 0.0, "linear", settings);
        const double dyn_out = mean_precision(cfg, snr, 0.05, "dynmkw", settings);
        const double lin_out = mean_precision(cfg, snr, 0.05, "linear", settings);
        if (dyn <= 0.5 || lin <= 0.5) {
            detail << fmt(" %g dB skipped;", snr);
            continue;
        }
        ++compared;
        const bool ok = dyn - dyn_out < lin - lin_out;
        ok_b = ok_b && ok;
        detail << fmt(" %g dB drop %.3f vs %.3f%s;", snr, dyn - dyn_out, lin - lin_out, ok ? "" : " (x)");
    }
    const double elapsed = seconds_since(start);
    detail << fmt(" %.0f s", elapsed);
    return {at16 >= 0.9 && ok_b && compared > 0 && elapsed < 1800.0, detail.str()};
}

Outcome criterion_6() {
    SimConfig cfg = default_sim_config();
    cfg.replications = 100;
    RunSettings settings;
    settings.known_k = false;
    settings.threads = g_threads;

    bool ok = true;
    double detected_mid = 0.0;
    std::ostringstream detail;
    for (double snr = 12.0; snr <= 30.0; snr += 2.0) {
        cfg.snr_db = snr;
        const MethodSummary dyn = monte_carlo(cfg, *parse_method_spec("dynmkw"), settings);
        detail << fmt(" %g dB dyn P/R %.3f/%.3f", snr, dyn.precision.mean, dyn.recall.mean);
        for (const char* spec : {"binseg@0.01", "binseg@0.05"}) {
            const MethodSummary bs = monte_carlo(cfg, *parse_method_spec(spec), settings);
            const bool here = dyn.precision.mean >= bs.precision.mean && dyn.recall.mean >= bs.recall.mean;
            ok = ok && here;
            detail << fmt(", %s %.3f/%.3f%s", spec, bs.precision.mean, bs.recall.mean, here ? "" : " (x)");
            if (snr == 16.0 && std::string(spec) == "binseg@0.05") detected_mid = bs.detected.mean;
        }
        detail << ";";
    }
    detail << fmt(" binseg@0.05 mean detected at 16 dB %.2f (want > 4)", detected_mid);
    return {ok && detected_mid > 4.0, detail.str()};
}

Outcome criterion_7() {
    SimConfig cfg = default_sim_config();
    cfg.replications = 100;
    cfg.snr_db = 30.0;
    RunSettings settings;
    settings.known_k = false;
    settings.threads = g_threads;
    const auto reps = monte_carlo_replicates(cfg, *parse_method_spec("dynmkw"), settings);
    int four = 0;
    for (const auto& r : reps) four += r.detected == 4;

    const Index d_max = 20;
    int kinks_ok = 0, kinks = 0;
    for (Index kink = 2; kink <= d_max - 2; ++kink, ++kinks) {
        std::vector<double> curve;
        for (Index d = 0; d <= d_max; ++d) curve.push_back(40.0 * std::min(d, kink) + 2.0 * d + 7.0);
        const SlopeSelection s = select_change_count(curve);
        const auto fit = std::find_if(s.rss_curve.begin(), s.rss_curve.end(),
                                      [&](const KinkFit& f) { return f.change_points == kink; });
        kinks_ok += s.change_points == kink && fit != s.rss_curve.end() && fit->rss == 0.0;
    }
    return {four >= 80 && kinks_ok == kinks,
            fmt("K-hat = 4 in %d / 100 runs at 30 dB (want >= 80); exact kinks recovered %d / %d", four,
                kinks_ok, kinks)};
}

Outcome criterion_8() {
    std::vector<double> times;
    for (Index n : {2000, 4000, 8000}) {
        std::mt19937_64 rng(8);
        const ObservationMatrix x(oracle::random_matrix(rng, n, 5));
        const RankTable ranks = compute_ranks(x);
        const CostProvider provider = precompute_costs(ranks, rank_covariance(ranks), 1);
        double best = INFINITY;
        for (int run = 0; run < 3; ++run) {
            const auto start = Clock::now();
            const DpTable t = solve(provider, 10);
            best = std::min(best, seconds_since(start));
            if (!std::isfinite(t.optimum(10))) return {false, "non-finite optimum"};
        }
        times.push_back(best);
    }
    const double r1 = times[1] / times[0], r2 = times[2] / times[1];
    const auto in = [](double r) { return r >= 3.0 && r <= 5.5; };
    return {in(r1) && in(r2), fmt("solve times %.3f / %.3f / %.3f s, ratios %.2f and %.2f (want [3.0, 5.5])",
                                  times[0], times[1], times[2], r1, r2)};
}

Outcome criterion_9() {
    bool ok = true;
    std::ostringstream detail;
    for (Index n : {4, 17, 100}) {
        Matrix x(n, 1);
        for (Index i = 0; i < n; ++i) x(i, 0) = static_cast<double>((i * 7) % n);  // a permutation, no ties
        const RankTable ranks = compute_ranks(ObservationMatrix(x));
        const double got = rank_covariance(ranks).sigma()(0, 0);
        const double want = (static_cast<double>(n * n) + 2.0) / (12.0 * static_cast<double>(n));
        const bool here = std::abs(got - want) <= 1e-12;
        ok = ok && here;
        detail << fmt("n=%ld Sigma11 %.10g vs %.10g%s; ", static_cast<long>(n), got, want, here ? "" : " (x)");
    }
    Matrix w(4, 1);
    w << 1, 2, 3, 4;
    const RankTable ranks = compute_ranks(ObservationMatrix(w));
    const double t = statistic_t(ranks, rank_covariance(ranks), Segmentation(4, {2})).value;
    const bool t_ok = std::abs(t - 5.0 / 6.0) <= 1e-12;
    detail << fmt("worked example T %.10g vs %.10g%s", t, 5.0 / 6.0, t_ok ? "" : " (x)");
    return {ok && t_ok, detail.str()};
}

const std::map<int, std::pair<const char*, Outcome (*)()>> kCriteria{
    {1, {"DP exactness vs brute force", criterion_1}},
    {2, {"null calibration of T", criterion_2}},
    {3, {"rank invariance", criterion_3}},
    {4, {"permutation gate level", criterion_4}},
    {5, {"known-K precision and outlier robustness", criterion_5}},
    {6, {"unknown K vs binary segmentation", criterion_6}},
    {7, {"slope heuristic recovery", criterion_7}},
    {8, {"quadratic solve time", criterion_8}},
    {9, {"literal closed forms", criterion_9}},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynmkw acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (default: all)")->check(CLI::Range(0, 9));
    app.add_option("--threads", g_threads, "Worker threads (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    bool all = true;
    for (const auto& [id, entry] : kCriteria) {
        if (only != 0 && id != only) continue;
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " C" << id << " " << entry.first << ": " << o.detail
                  << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
