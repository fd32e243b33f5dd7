#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aoi_ncs/sim.hpp"

namespace aoi_ncs {

/// Runs fn(0..count-1) on a small worker pool. Work items write to
/// index-addressed slots, so results are identical for any thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Parses a system-matrix spec: a scalar literal ("0.9") or a path to a
/// plain-text matrix file.
Eigen::MatrixXd parse_a_spec(const std::string& spec);

/// Channel selector shared by the CLI commands; exactly one source is used:
/// geometric p when > 0, otherwise deterministic when det > 0, otherwise an
/// empirical pmf file.
struct ChannelOptions {
    double p = 0.0;
    int det = 0;
    std::string dist_file;
    double mass_floor = 1e-12;
};

TransmissionDistribution make_channel(const ChannelOptions& channel);

struct Table1Options {
    std::vector<double> p_list = {0.01, 0.05, 0.1, 0.2, 0.4, 0.8};
    std::int64_t cycles = 1'000'000;
    std::int64_t warmup = 1'000;
    std::uint64_t seed = 1;
    int max_wait = 100;
    double mass_floor = 1e-12;
    double epsilon = 1e-9;
    int threads = 1;
};

/// Time-average squared error of the zero-wait and threshold policies for
/// the scalar unit system over geometric channels: analytic renewal values
/// next to renewal-mode simulation, per success probability.
std::string run_table1(const Table1Options& options);

struct MeasCurveOptions {
    std::vector<double> p_list = {0.1, 0.3, 0.5, 0.7};
    int y_limit = 10;
    int max_wait = 100;
    double mass_floor = 1e-12;
    double epsilon = 1e-9;
};

/// Waiting-time curve g(y) of the threshold policy, continuous and floored.
std::string run_meas_curve(const MeasCurveOptions& options);

struct SweepOptions {
    std::vector<std::string> a_specs = {"1", "0.9", "0.5"};
    std::vector<double> p_list = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::string> policies = {"zero-wait", "meas"};
    double sigma2 = 1.0;
    std::int64_t cycles = 1'000'000;
    std::int64_t warmup = 1'000;
    std::uint64_t seed = 1;
    int max_wait = 100;
    double mass_floor = 1e-12;
    double epsilon = 1e-9;
    int threads = 1;
};

struct SweepResult {
    std::string csv;
    bool any_diverged = false;
};

/// Error-versus-p sweep across systems and policies. Rows whose system has
/// spectral radius above 1 are flagged diverged and carry no values.
SweepResult run_sweep(const SweepOptions& options);

struct AnalyzeOptions {
    std::string a_spec = "1";
    double sigma2 = 1.0;
    ChannelOptions channel;
    std::string policy = "zero-wait";
    int max_wait = 100;
    double epsilon = 1e-9;
};

struct AnalyzeResult {
    std::string report;
    std::string csv;
};

/// Single-point analytic evaluation: expected age, expected age cost, the
/// linear-cost constant when it exists, and the solved threshold for the
/// threshold policy.
AnalyzeResult run_analyze(const AnalyzeOptions& options);

struct SimulateOptions {
    std::string a_spec = "1";
    double sigma2 = 1.0;
    ChannelOptions channel;
    std::string policy = "zero-wait";
    int max_wait = 100;
    double epsilon = 1e-9;
    std::int64_t cycles = 1'000'000;
    std::int64_t warmup = 1'000;
    std::uint64_t seed = 1;
    bool renewal_mode = false;
    std::int64_t max_slots = 0;
    double divergence_threshold = 1e12;
    bool want_cycle_log = false;
};

struct SimulateResult {
    RunMetrics metrics;
    std::string report;
    std::string metrics_csv;
    std::string cycle_csv;
};

SimulateResult run_simulate(const SimulateOptions& options);

/// %.10g rendering used by every CSV emitter; keeps outputs byte-stable.
std::string format_double(double value);

} // namespace aoi_ncs
