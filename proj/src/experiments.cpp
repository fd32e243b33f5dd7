#include "aoi_ncs/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aoi_ncs/analytic.hpp"
#include "aoi_ncs/matrix_io.hpp"

namespace aoi_ncs {

namespace {

// Spectral-radius test with a small tolerance so rotations and unit scalars
// (radius exactly 1 up to rounding) are not misflagged.
bool is_divergent(const SystemModel& model) {
    return model.spectral_radius() > 1.0 + 1e-9;
}

std::string channel_label(const ChannelOptions& channel) {
    if (channel.p > 0.0) {
        return "geometric(" + format_double(channel.p) + ")";
    }
    if (channel.det > 0) {
        return "deterministic(" + std::to_string(channel.det) + ")";
    }
    return "empirical(" + channel.dist_file + ")";
}

int cost_table_span(const TransmissionDistribution& dist, const WaitingPolicy& policy) {
    return 2 * dist.max_support() + policy.max_table_wait();
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    std::size_t workers = threads <= 0 ? std::thread::hardware_concurrency()
                                       : static_cast<std::size_t>(threads);
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    break;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

Eigen::MatrixXd parse_a_spec(const std::string& spec) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(spec, &consumed);
        if (consumed == spec.size()) {
            Eigen::MatrixXd m(1, 1);
            m(0, 0) = value;
            return m;
        }
    } catch (const std::exception&) {
        // fall through to file loading
    }
    return load_matrix(spec);
}

TransmissionDistribution make_channel(const ChannelOptions& channel) {
    if (channel.p > 0.0) {
        return TransmissionDistribution::geometric(channel.p, channel.mass_floor);
    }
    if (channel.det > 0) {
        return TransmissionDistribution::deterministic(channel.det);
    }
    if (!channel.dist_file.empty()) {
        return load_empirical_pmf(channel.dist_file);
    }
    throw std::invalid_argument("no channel specified: use --p, --det, or --dist-file");
}

std::string run_table1(const Table1Options& options) {
    if (options.p_list.empty()) {
        throw std::invalid_argument("p grid is empty");
    }
    struct Row {
        double p = 0.0;
        double beta = 0.0;
        RenewalEvaluation zero_wait;
        RenewalEvaluation meas;
        RunMetrics zero_wait_sim;
        RunMetrics meas_sim;
    };
    std::vector<Row> rows(options.p_list.size());
    const SystemModel model = SystemModel::scalar(1.0, 1.0);

    parallel_for(options.p_list.size(), options.threads, [&](std::size_t i) {
        const double p = options.p_list[i];
        const auto dist = TransmissionDistribution::geometric(p, options.mass_floor);
        const MeasSolution solution = solve_meas(dist, options.max_wait, options.epsilon);
        const auto zero_wait = WaitingPolicy::zero_wait(dist, options.max_wait);
        const auto meas = WaitingPolicy::threshold(dist, solution.beta, options.max_wait);
        const auto cost = build_cost_function(model, cost_table_span(dist, meas));

        Row row;
        row.p = p;
        row.beta = solution.beta;
        row.zero_wait = expected_f_delta(cost, dist, zero_wait);
        row.meas = expected_f_delta(cost, dist, meas);

        // Both policies share the cell seed, hence the same transmission
        // stream: the simulated columns are paired comparisons.
        const std::uint64_t cell_seed = derive_seed(options.seed, StreamPurpose::Generic, i);
        SimConfig zw_config(model, dist, zero_wait);
        zw_config.cycles = options.cycles;
        zw_config.warmup_cycles = options.warmup;
        zw_config.seed = cell_seed;
        zw_config.mode = SimMode::RenewalFast;
        row.zero_wait_sim = run_renewal_fast(zw_config);

        SimConfig meas_config(model, dist, meas);
        meas_config.cycles = options.cycles;
        meas_config.warmup_cycles = options.warmup;
        meas_config.seed = cell_seed;
        meas_config.mode = SimMode::RenewalFast;
        row.meas_sim = run_renewal_fast(meas_config);
        rows[i] = row;
    });

    std::ostringstream out;
    out << "# command: table1\n"
        << "# a: 1\n"
        << "# sigma2: 1\n"
        << "# cycles: " << options.cycles << "\n"
        << "# warmup: " << options.warmup << "\n"
        << "# seed: " << options.seed << "\n"
        << "# max_wait: " << options.max_wait << "\n"
        << "# mass_floor: " << format_double(options.mass_floor) << "\n"
        << "# epsilon: " << format_double(options.epsilon) << "\n"
        << "p,zero_wait_analytic,zero_wait_sim,zero_wait_stderr,"
           "meas_beta,meas_analytic,meas_sim,meas_stderr\n";
    for (const Row& row : rows) {
        out << format_double(row.p) << ',' << format_double(row.zero_wait.value) << ','
            << format_double(row.zero_wait_sim.time_avg_sq_error) << ','
            << format_double(row.zero_wait_sim.stderr_sq_error) << ','
            << format_double(row.beta) << ',' << format_double(row.meas.value) << ','
            << format_double(row.meas_sim.time_avg_sq_error) << ','
            << format_double(row.meas_sim.stderr_sq_error) << '\n';
    }
    return out.str();
}

std::string run_meas_curve(const MeasCurveOptions& options) {
    if (options.p_list.empty() || options.y_limit < 1) {
        throw std::invalid_argument("meas-curve needs a p grid and y limit >= 1");
    }
    std::ostringstream out;
    out << "# command: meas-curve\n"
        << "# max_wait: " << options.max_wait << "\n"
        << "# mass_floor: " << format_double(options.mass_floor) << "\n"
        << "# epsilon: " << format_double(options.epsilon) << "\n"
        << "p,y,g_continuous,g_floored\n";
    for (const double p : options.p_list) {
        const auto dist = TransmissionDistribution::geometric(p, options.mass_floor);
        const MeasSolution solution = solve_meas(dist, options.max_wait, options.epsilon);
        const auto policy = WaitingPolicy::threshold(dist, solution.beta, options.max_wait);
        for (int y = 1; y <= options.y_limit; ++y) {
            const double g_cont = std::max(solution.beta - static_cast<double>(y), 0.0);
            out << format_double(p) << ',' << y << ',' << format_double(g_cont) << ','
                << policy.wait_for(y) << '\n';
        }
    }
    return out.str();
}

SweepResult run_sweep(const SweepOptions& options) {
    if (options.a_specs.empty() || options.p_list.empty() || options.policies.empty()) {
        throw std::invalid_argument("sweep grids must be non-empty");
    }
    std::vector<Eigen::MatrixXd> matrices;
    matrices.reserve(options.a_specs.size());
    for (const auto& spec : options.a_specs) {
        matrices.push_back(parse_a_spec(spec));
    }
    std::vector<PolicySpec> policy_specs;
    policy_specs.reserve(options.policies.size());
    for (const auto& text : options.policies) {
        policy_specs.push_back(parse_policy_spec(text));
    }

    struct Cell {
        bool diverged = false;
        RenewalEvaluation analytic;
        RunMetrics sim;
    };
    const std::size_t np = options.p_list.size();
    const std::size_t nq = options.policies.size();
    const std::size_t total = options.a_specs.size() * np * nq;
    std::vector<Cell> cells(total);

    parallel_for(total, options.threads, [&](std::size_t c) {
        const std::size_t ai = c / (np * nq);
        const std::size_t pi = (c / nq) % np;
        const std::size_t qi = c % nq;
        Cell& cell = cells[c];
        const SystemModel model(matrices[ai], options.sigma2);
        if (is_divergent(model)) {
            cell.diverged = true;
            return;
        }
        const auto dist =
            TransmissionDistribution::geometric(options.p_list[pi], options.mass_floor);
        const auto made = make_policy(policy_specs[qi], dist, options.max_wait, options.epsilon);
        const auto cost = build_cost_function(model, cost_table_span(dist, made.policy));
        cell.analytic = expected_f_delta(cost, dist, made.policy);

        SimConfig config(model, dist, made.policy);
        config.cycles = options.cycles;
        config.warmup_cycles = options.warmup;
        // Policies at the same (system, p) share the transmission stream.
        config.seed = derive_seed(options.seed, StreamPurpose::Generic, ai * np + pi);
        config.mode = SimMode::RenewalFast;
        cell.sim = run_renewal_fast(config);
    });

    std::ostringstream out;
    out << "# command: sweep\n"
        << "# sigma2: " << format_double(options.sigma2) << "\n"
        << "# cycles: " << options.cycles << "\n"
        << "# warmup: " << options.warmup << "\n"
        << "# seed: " << options.seed << "\n"
        << "# max_wait: " << options.max_wait << "\n"
        << "# mass_floor: " << format_double(options.mass_floor) << "\n"
        << "# epsilon: " << format_double(options.epsilon) << "\n"
        << "a,p,policy,analytic,sim,sim_stderr,diverged\n";
    bool any_diverged = false;
    for (std::size_t c = 0; c < total; ++c) {
        const std::size_t ai = c / (np * nq);
        const std::size_t pi = (c / nq) % np;
        const std::size_t qi = c % nq;
        const Cell& cell = cells[c];
        out << options.a_specs[ai] << ',' << format_double(options.p_list[pi]) << ','
            << options.policies[qi] << ',';
        if (cell.diverged) {
            out << ",,,1\n";
            any_diverged = true;
        } else {
            out << format_double(cell.analytic.value) << ','
                << format_double(cell.sim.time_avg_sq_error) << ','
                << format_double(cell.sim.stderr_sq_error) << ",0\n";
        }
    }
    return {out.str(), any_diverged};
}

AnalyzeResult run_analyze(const AnalyzeOptions& options) {
    const SystemModel model(parse_a_spec(options.a_spec), options.sigma2);
    const auto dist = make_channel(options.channel);
    const PolicySpec spec = parse_policy_spec(options.policy);
    const auto made = make_policy(spec, dist, options.max_wait, options.epsilon);
    const auto cost = build_cost_function(model, cost_table_span(dist, made.policy));

    const auto aoi = expected_aoi(dist, made.policy);
    const auto f_delta = expected_f_delta(cost, dist, made.policy);
    const auto gamma = cost.gamma();

    std::ostringstream report;
    report << "system: a=" << options.a_spec << " (dim " << model.dim() << ", spectral radius "
           << format_double(model.spectral_radius()) << "), sigma2="
           << format_double(options.sigma2) << "\n";
    report << "channel: " << channel_label(options.channel)
           << " mean=" << format_double(dist.mean())
           << " second_moment=" << format_double(dist.second_moment())
           << " truncation_mass=" << format_double(dist.truncation_mass()) << "\n";
    report << "policy: " << options.policy;
    if (made.meas) {
        report << " (beta=" << format_double(made.meas->beta)
               << ", residual=" << format_double(made.meas->residual)
               << ", iterations=" << made.meas->iterations << ")";
    }
    report << "\n";
    if (gamma) {
        report << "linear age cost: gamma=" << format_double(*gamma) << "\n";
    } else {
        report << "linear age cost: no\n";
    }
    report << "expected_aoi: " << format_double(aoi.value) << "\n";
    report << "expected_f_delta: " << format_double(f_delta.value)
           << " (truncation error bound " << format_double(f_delta.truncation_error_bound)
           << ")\n";

    std::ostringstream csv;
    csv << "a,sigma2,channel,policy,max_wait,gamma,expected_aoi,expected_f_delta,meas_beta\n";
    csv << options.a_spec << ',' << format_double(options.sigma2) << ','
        << channel_label(options.channel) << ',' << options.policy << ',' << options.max_wait
        << ',' << (gamma ? format_double(*gamma) : std::string()) << ','
        << format_double(aoi.value) << ',' << format_double(f_delta.value) << ','
        << (made.meas ? format_double(made.meas->beta) : std::string()) << '\n';
    return {report.str(), csv.str()};
}

SimulateResult run_simulate(const SimulateOptions& options) {
    const SystemModel model(parse_a_spec(options.a_spec), options.sigma2);
    const auto dist = make_channel(options.channel);
    const PolicySpec spec = parse_policy_spec(options.policy);
    const auto made = make_policy(spec, dist, options.max_wait, options.epsilon);

    SimConfig config(model, dist, made.policy);
    config.cycles = options.cycles;
    config.warmup_cycles = options.warmup;
    config.seed = options.seed;
    config.mode = options.renewal_mode ? SimMode::RenewalFast : SimMode::FullTrajectory;
    config.max_slots = options.max_slots;
    config.divergence_threshold = options.divergence_threshold;

    SimulateResult result;
    std::vector<CycleRecord> cycle_log;
    if (options.renewal_mode) {
        result.metrics = run_renewal_fast(config);
    } else {
        result.metrics = run_full(config, options.want_cycle_log ? &cycle_log : nullptr);
    }

    std::ostringstream report;
    report << "mode: " << (options.renewal_mode ? "renewal" : "full") << "\n";
    if (made.meas) {
        report << "meas: beta=" << format_double(made.meas->beta)
               << " residual=" << format_double(made.meas->residual)
               << " iterations=" << made.meas->iterations << "\n";
    }
    report << "time_avg_sq_error: " << format_double(result.metrics.time_avg_sq_error) << "\n"
           << "stderr_sq_error: " << format_double(result.metrics.stderr_sq_error) << "\n"
           << "empirical_mean_aoi: " << format_double(result.metrics.empirical_mean_aoi) << "\n"
           << "total_slots: " << result.metrics.total_slots << "\n"
           << "total_cycles: " << result.metrics.total_cycles << "\n"
           << "seed: " << result.metrics.seed << "\n";
    if (result.metrics.diverged) {
        report << "diverged at counted slot " << result.metrics.diverged_at_slot << "\n";
    }
    result.report = report.str();

    std::ostringstream csv;
    csv << "time_avg_sq_error,empirical_mean_aoi,total_slots,total_cycles,"
           "stderr_sq_error,seed,diverged,diverged_at_slot\n";
    csv << format_double(result.metrics.time_avg_sq_error) << ','
        << format_double(result.metrics.empirical_mean_aoi) << ','
        << result.metrics.total_slots << ',' << result.metrics.total_cycles << ','
        << format_double(result.metrics.stderr_sq_error) << ',' << result.metrics.seed << ','
        << (result.metrics.diverged ? 1 : 0) << ',' << result.metrics.diverged_at_slot << '\n';
    result.metrics_csv = csv.str();

    if (options.want_cycle_log) {
        std::ostringstream log;
        log << "k,y_prev,wait,y_cur,zeta,cycle_len\n";
        for (const CycleRecord& record : cycle_log) {
            log << record.k << ',' << record.y_prev << ',' << record.wait << ',' << record.y_cur
                << ',' << format_double(record.zeta) << ',' << record.cycle_len << '\n';
        }
        result.cycle_csv = log.str();
    }
    return result;
}

} // namespace aoi_ncs
