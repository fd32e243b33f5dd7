#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "aoi_ncs/experiments.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDiverged = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot write to " + path);
    }
    out << content;
}

void add_channel_flags(CLI::App* cmd, aoi_ncs::ChannelOptions& channel) {
    cmd->add_option("--p", channel.p, "geometric channel success probability");
    cmd->add_option("--det", channel.det, "deterministic transmission time");
    cmd->add_option("--dist-file", channel.dist_file, "empirical pmf file ('y probability' lines)");
    cmd->add_option("--mass-floor", channel.mass_floor,
                    "tail mass discarded when truncating the support")
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Estimation-error and age-of-information toolkit for a sampled control loop"};
    app.require_subcommand(1);
    app.set_config("--config");

    aoi_ncs::Table1Options table1;
    std::string table1_out = "table1.csv";
    auto* cmd_table1 = app.add_subcommand(
        "table1", "zero-wait vs threshold policy error table over geometric channels");
    cmd_table1->add_option("--p", table1.p_list, "success probability grid");
    cmd_table1->add_option("--cycles", table1.cycles, "counted renewal cycles per simulation")
        ->capture_default_str();
    cmd_table1->add_option("--warmup", table1.warmup, "discarded warmup cycles")
        ->capture_default_str();
    cmd_table1->add_option("--seed", table1.seed, "master seed")->capture_default_str();
    cmd_table1->add_option("--max-wait", table1.max_wait, "waiting-time cap")
        ->capture_default_str();
    cmd_table1->add_option("--mass-floor", table1.mass_floor, "truncation tail mass")
        ->capture_default_str();
    cmd_table1->add_option("--epsilon", table1.epsilon, "bisection tolerance")
        ->capture_default_str();
    cmd_table1->add_option("--threads", table1.threads, "worker pool size (0 = hardware)")
        ->capture_default_str();
    cmd_table1->add_option("--out", table1_out, "output CSV path")->capture_default_str();

    aoi_ncs::MeasCurveOptions curve;
    std::string curve_out = "meas_curve.csv";
    auto* cmd_curve =
        app.add_subcommand("meas-curve", "waiting-time map g(y) of the threshold policy");
    cmd_curve->add_option("--p", curve.p_list, "success probability grid");
    cmd_curve->add_option("--y-limit", curve.y_limit, "largest tabulated transmission time")
        ->capture_default_str();
    cmd_curve->add_option("--max-wait", curve.max_wait, "waiting-time cap")
        ->capture_default_str();
    cmd_curve->add_option("--mass-floor", curve.mass_floor, "truncation tail mass")
        ->capture_default_str();
    cmd_curve->add_option("--epsilon", curve.epsilon, "bisection tolerance")
        ->capture_default_str();
    cmd_curve->add_option("--out", curve_out, "output CSV path")->capture_default_str();

    aoi_ncs::SweepOptions sweep;
    std::string sweep_out = "sweep.csv";
    bool sweep_strict = false;
    auto* cmd_sweep =
        app.add_subcommand("sweep", "error vs p across systems and policies");
    cmd_sweep->add_option("--a", sweep.a_specs, "system matrices: scalars or matrix files");
    cmd_sweep->add_option("--p", sweep.p_list, "success probability grid");
    cmd_sweep->add_option("--policy", sweep.policies,
                          "policies: zero-wait, const:<g0>, meas");
    cmd_sweep->add_option("--sigma2", sweep.sigma2, "noise variance")->capture_default_str();
    cmd_sweep->add_option("--cycles", sweep.cycles, "counted renewal cycles per cell")
        ->capture_default_str();
    cmd_sweep->add_option("--warmup", sweep.warmup, "discarded warmup cycles")
        ->capture_default_str();
    cmd_sweep->add_option("--seed", sweep.seed, "master seed")->capture_default_str();
    cmd_sweep->add_option("--max-wait", sweep.max_wait, "waiting-time cap")
        ->capture_default_str();
    cmd_sweep->add_option("--mass-floor", sweep.mass_floor, "truncation tail mass")
        ->capture_default_str();
    cmd_sweep->add_option("--epsilon", sweep.epsilon, "bisection tolerance")
        ->capture_default_str();
    cmd_sweep->add_option("--threads", sweep.threads, "worker pool size (0 = hardware)")
        ->capture_default_str();
    cmd_sweep->add_option("--out", sweep_out, "output CSV path")->capture_default_str();
    cmd_sweep->add_flag("--strict", sweep_strict, "exit 3 when any row diverges");

    aoi_ncs::AnalyzeOptions analyze;
    std::string analyze_a_file;
    std::string analyze_out;
    auto* cmd_analyze =
        app.add_subcommand("analyze", "closed-form evaluation of one configuration");
    cmd_analyze->add_option("--a", analyze.a_spec, "scalar system matrix")
        ->capture_default_str();
    cmd_analyze->add_option("--a-file", analyze_a_file, "system matrix file");
    cmd_analyze->add_option("--sigma2", analyze.sigma2, "noise variance")->capture_default_str();
    add_channel_flags(cmd_analyze, analyze.channel);
    cmd_analyze->add_option("--policy", analyze.policy, "zero-wait, const:<g0>, or meas")
        ->capture_default_str();
    cmd_analyze->add_option("--max-wait", analyze.max_wait, "waiting-time cap")
        ->capture_default_str();
    cmd_analyze->add_option("--epsilon", analyze.epsilon, "bisection tolerance")
        ->capture_default_str();
    cmd_analyze->add_option("--out", analyze_out, "optional CSV output path");

    aoi_ncs::SimulateOptions simulate;
    std::string simulate_a_file;
    std::string simulate_out;
    std::string simulate_cycle_log;
    std::string simulate_mode = "full";
    bool simulate_strict = false;
    auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo run of one configuration");
    cmd_simulate->add_option("--a", simulate.a_spec, "scalar system matrix")
        ->capture_default_str();
    cmd_simulate->add_option("--a-file", simulate_a_file, "system matrix file");
    cmd_simulate->add_option("--sigma2", simulate.sigma2, "noise variance")
        ->capture_default_str();
    add_channel_flags(cmd_simulate, simulate.channel);
    cmd_simulate->add_option("--policy", simulate.policy, "zero-wait, const:<g0>, or meas")
        ->capture_default_str();
    cmd_simulate->add_option("--max-wait", simulate.max_wait, "waiting-time cap")
        ->capture_default_str();
    cmd_simulate->add_option("--epsilon", simulate.epsilon, "bisection tolerance")
        ->capture_default_str();
    cmd_simulate->add_option("--cycles", simulate.cycles, "counted renewal cycles")
        ->capture_default_str();
    cmd_simulate->add_option("--warmup", simulate.warmup, "discarded warmup cycles")
        ->capture_default_str();
    cmd_simulate->add_option("--seed", simulate.seed, "master seed")->capture_default_str();
    cmd_simulate
        ->add_option("--mode", simulate_mode, "full (slot-by-slot) or renewal (cycle sampling)")
        ->check(CLI::IsMember({"full", "renewal"}))
        ->capture_default_str();
    cmd_simulate->add_option("--max-slots", simulate.max_slots,
                             "stop after this many counted slots (0 = no cap)")
        ->capture_default_str();
    cmd_simulate
        ->add_option("--divergence-threshold", simulate.divergence_threshold,
                     "flag the run once the running average crosses this value")
        ->capture_default_str();
    cmd_simulate->add_option("--out", simulate_out, "optional metrics CSV path");
    cmd_simulate->add_option("--cycle-log", simulate_cycle_log, "optional per-cycle CSV path");
    cmd_simulate->add_flag("--strict", simulate_strict, "exit 3 when the run diverges");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        // Help requests exit 0; anything else is a validation failure.
        const int code = app.exit(error);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (cmd_table1->parsed()) {
            write_file(table1_out, aoi_ncs::run_table1(table1));
            return 0;
        }
        if (cmd_curve->parsed()) {
            write_file(curve_out, aoi_ncs::run_meas_curve(curve));
            return 0;
        }
        if (cmd_sweep->parsed()) {
            const auto result = aoi_ncs::run_sweep(sweep);
            write_file(sweep_out, result.csv);
            if (result.any_diverged) {
                std::cerr << "warning: diverged rows present\n";
                if (sweep_strict) {
                    return kExitDiverged;
                }
            }
            return 0;
        }
        if (cmd_analyze->parsed()) {
            if (!analyze_a_file.empty()) {
                analyze.a_spec = analyze_a_file;
            }
            const auto result = aoi_ncs::run_analyze(analyze);
            std::cout << result.report;
            if (!analyze_out.empty()) {
                write_file(analyze_out, result.csv);
            }
            return 0;
        }
        if (cmd_simulate->parsed()) {
            if (!simulate_a_file.empty()) {
                simulate.a_spec = simulate_a_file;
            }
            simulate.renewal_mode = simulate_mode == "renewal";
            simulate.want_cycle_log = !simulate_cycle_log.empty();
            const auto result = aoi_ncs::run_simulate(simulate);
            std::cout << result.report;
            if (!simulate_out.empty()) {
                write_file(simulate_out, result.metrics_csv);
            }
            if (!simulate_cycle_log.empty()) {
                write_file(simulate_cycle_log, result.cycle_csv);
            }
            if (result.metrics.diverged) {
                std::cerr << "warning: run diverged at counted slot "
                          << result.metrics.diverged_at_slot << "\n";
                if (simulate_strict) {
                    return kExitDiverged;
                }
            }
            return 0;
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
