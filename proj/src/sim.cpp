#include "aoi_ncs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoi_ncs {

namespace {

constexpr int kBatchCount = 100;

double arithmetic_block(int first, int len) {
    const double n = static_cast<double>(len);
    return n * static_cast<double>(first) + 0.5 * n * (n - 1.0);
}

void validate_config(const SimConfig& config) {
    if (config.cycles < 1) {
        throw std::invalid_argument("cycle count must be at least 1");
    }
    if (config.warmup_cycles < 0) {
        throw std::invalid_argument("warmup cycle count must be non-negative");
    }
    if (config.dist.max_support() == 0 && config.policy.wait_for(0) == 0) {
        throw std::invalid_argument("expected cycle length is zero; nothing to simulate");
    }
}

// Ratio-of-sums accumulator with batch-means error bars. The point estimate
// is sum(zeta)/sum(len); batches of consecutive cycles give nearly
// independent per-batch ratios whose spread estimates the standard error.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(std::int64_t target_cycles)
        : target_(std::max<std::int64_t>(target_cycles, 1)),
          batches_(static_cast<int>(std::min<std::int64_t>(kBatchCount, target_))) {
        batch_zeta_.assign(static_cast<std::size_t>(batches_), 0.0);
        batch_len_.assign(static_cast<std::size_t>(batches_), 0);
    }

    void add_cycle(double zeta, int len, double age_sum) {
        const auto b = static_cast<std::size_t>(
            std::min<std::int64_t>(counted_ * batches_ / target_, batches_ - 1));
        batch_zeta_[b] += zeta;
        batch_len_[b] += len;
        zeta_total_ += zeta;
        age_total_ += age_sum;
        len_total_ += len;
        ++counted_;
    }

    std::int64_t counted() const { return counted_; }
    std::int64_t total_slots() const { return len_total_; }

    RunMetrics finalize(std::uint64_t seed) const {
        RunMetrics metrics;
        metrics.seed = seed;
        metrics.total_cycles = counted_;
        metrics.total_slots = len_total_;
        if (len_total_ > 0) {
            metrics.time_avg_sq_error = static_cast<double>(zeta_total_) /
                                        static_cast<double>(len_total_);
            metrics.empirical_mean_aoi = static_cast<double>(age_total_) /
                                         static_cast<double>(len_total_);
        }
        std::vector<double> ratios;
        ratios.reserve(batch_zeta_.size());
        for (std::size_t b = 0; b < batch_zeta_.size(); ++b) {
            if (batch_len_[b] > 0) {
                ratios.push_back(batch_zeta_[b] / static_cast<double>(batch_len_[b]));
            }
        }
        if (ratios.size() >= 2) {
            double mean = 0.0;
            for (double r : ratios) {
                mean += r;
            }
            mean /= static_cast<double>(ratios.size());
            double ss = 0.0;
            for (double r : ratios) {
                ss += (r - mean) * (r - mean);
            }
            const double var = ss / static_cast<double>(ratios.size() - 1);
            metrics.stderr_sq_error = std::sqrt(var / static_cast<double>(ratios.size()));
        }
        return metrics;
    }

private:
    std::int64_t target_;
    int batches_;
    std::vector<double> batch_zeta_;
    std::vector<std::int64_t> batch_len_;
    long double zeta_total_ = 0.0L;
    long double age_total_ = 0.0L;
    std::int64_t len_total_ = 0;
    std::int64_t counted_ = 0;
};

} // namespace

RunMetrics run_full(const SimConfig& config, std::vector<CycleRecord>* cycle_log,
                    SlotTrace* slot_trace) {
    validate_config(config);
    if (config.mode != SimMode::FullTrajectory) {
        throw std::invalid_argument("run_full requires SimMode::FullTrajectory");
    }
    RngStream chan(derive_seed(config.seed, StreamPurpose::Transmission));
    RngStream noise(derive_seed(config.seed, StreamPurpose::PlantNoise));

    const Eigen::MatrixXd& a = config.model.a_matrix;
    const int d = config.model.dim();
    const double sd = std::sqrt(config.model.noise_variance);
    const std::int64_t skip = 1 + config.warmup_cycles;

    MetricsAccumulator acc(config.cycles);
    int y_prev = config.dist.sample(chan);
    std::vector<Eigen::VectorXd> tx_window;
    std::vector<Eigen::VectorXd> prev_window;
    Eigen::VectorXd err = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd w(d);

    long double zeta_running = 0.0L;
    std::int64_t slots_running = 0;
    bool diverged = false;
    std::int64_t diverged_at = -1;
    std::int64_t k = 0;
    std::int64_t global_slot = 0;

    while (acc.counted() < config.cycles) {
        ++k;
        const int wait = config.policy.wait_for(y_prev);
        const int y_cur = config.dist.sample(chan);
        const int len = wait + y_cur;
        const bool count = k > skip;

        double zeta = 0.0;
        if (count) {
            // Error at the departure slot: age equals the previous packet's
            // transmission time, so the noise sum runs exactly over that
            // packet's transmission window (oldest first).
            err.setZero();
            for (const Eigen::VectorXd& wv : prev_window) {
                err = a * err + wv;
            }
        }
        for (int step = 0; step < len; ++step) {
            if (count) {
                const double sq = err.squaredNorm();
                zeta += sq;
                zeta_running += sq;
                ++slots_running;
                if (!diverged && config.divergence_threshold > 0.0 &&
                    static_cast<double>(zeta_running) /
                            static_cast<double>(slots_running) >
                        config.divergence_threshold) {
                    diverged = true;
                    diverged_at = slots_running;
                }
                if (slot_trace) {
                    slot_trace->slot.push_back(global_slot + step);
                    slot_trace->age.push_back(y_prev + step);
                }
            }
            for (int r = 0; r < d; ++r) {
                w(r) = sd * noise.next_gaussian();
            }
            if (step >= wait) {
                tx_window.push_back(w);
            }
            if (count && step + 1 < len) {
                err = a * err + w;
            }
        }

        prev_window.swap(tx_window);
        tx_window.clear();
        global_slot += len;
        if (count) {
            const double age_sum = arithmetic_block(y_prev, len);
            acc.add_cycle(zeta, len, age_sum);
            if (cycle_log) {
                cycle_log->push_back({acc.counted(), y_prev, wait, y_cur, zeta, len});
            }
        }
        y_prev = y_cur;
        if (config.max_slots > 0 && slots_running >= config.max_slots) {
            break;
        }
    }

    RunMetrics metrics = acc.finalize(config.seed);
    metrics.diverged = diverged;
    metrics.diverged_at_slot = diverged_at;
    return metrics;
}

RunMetrics run_renewal_fast(const SimConfig& config) {
    validate_config(config);
    RngStream chan(derive_seed(config.seed, StreamPurpose::Transmission));
    const std::int64_t skip = 1 + config.warmup_cycles;

    // Sized for the truncated support plus slack; rare draws past the
    // truncation trigger a rebuild with a doubled range.
    int table_size = 2 * config.dist.max_support() + config.policy.max_table_wait() + 8;
    AoiCostFunction cost = build_cost_function(config.model, table_size);

    MetricsAccumulator acc(config.cycles);
    int y_prev = config.dist.sample(chan);
    long double zeta_running = 0.0L;
    std::int64_t slots_running = 0;
    bool diverged = false;
    std::int64_t diverged_at = -1;
    std::int64_t k = 0;

    while (acc.counted() < config.cycles) {
        ++k;
        const int wait = config.policy.wait_for(y_prev);
        const int y_cur = config.dist.sample(chan);
        const int len = wait + y_cur;
        if (k > skip) {
            const int needed = y_prev + len;
            if (needed > cost.max_delta()) {
                table_size = std::max(needed, 2 * table_size);
                cost = build_cost_function(config.model, table_size);
            }
            const double zeta = cost.f_block_sum(y_prev, len);
            acc.add_cycle(zeta, len, arithmetic_block(y_prev, len));
            zeta_running += zeta;
            slots_running += len;
            if (!diverged && config.divergence_threshold > 0.0 && slots_running > 0 &&
                static_cast<double>(zeta_running) / static_cast<double>(slots_running) >
                    config.divergence_threshold) {
                diverged = true;
                diverged_at = slots_running;
            }
        }
        y_prev = y_cur;
        if (config.max_slots > 0 && slots_running >= config.max_slots) {
            break;
        }
    }

    RunMetrics metrics = acc.finalize(config.seed);
    metrics.diverged = diverged;
    metrics.diverged_at_slot = diverged_at;
    return metrics;
}

ClosedLoopLog run_closed_loop_demo(const SimConfig& config, const Eigen::MatrixXd& gain,
                                   std::int64_t horizon_slots) {
    if (!config.model.b_matrix) {
        throw std::invalid_argument("closed-loop demo requires the input matrix");
    }
    if (horizon_slots < 1) {
        throw std::invalid_argument("horizon must be at least 1 slot");
    }
    if (config.dist.max_support() == 0 && config.policy.wait_for(0) == 0) {
        throw std::invalid_argument("expected cycle length is zero; nothing to simulate");
    }
    const Eigen::MatrixXd& a = config.model.a_matrix;
    const Eigen::MatrixXd& b = *config.model.b_matrix;
    const int d = config.model.dim();
    if (gain.rows() != b.cols() || gain.cols() != d) {
        throw std::invalid_argument("control gain must be (inputs x state dim)");
    }

    RngStream chan(derive_seed(config.seed, StreamPurpose::Transmission));
    RngStream noise(derive_seed(config.seed, StreamPurpose::PlantNoise));
    const double sd = std::sqrt(config.model.noise_variance);

    // Full histories; the demo is meant for short diagnostic horizons.
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> noises;
    states.reserve(static_cast<std::size_t>(horizon_slots));

    ClosedLoopLog log;
    log.slots.reserve(static_cast<std::size_t>(horizon_slots));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    int age = 0;
    // First sample is taken at slot 0; before it delivers, the estimator
    // tracks the exactly known initial state.
    int pending_y = config.dist.sample(chan);
    std::int64_t dep_slot = pending_y;

    for (std::int64_t n = 0; n < horizon_slots; ++n) {
        states.push_back(x);
        if (n > 0) {
            ++age;
        }
        while (n == dep_slot) {
            age = pending_y;
            const int wait = config.policy.wait_for(pending_y);
            const std::int64_t gen_slot = n + wait;
            pending_y = config.dist.sample(chan);
            dep_slot = gen_slot + pending_y;
        }

        // Reconstruct the state estimate from the freshest delivered sample
        // and the control history since its generation slot.
        const std::int64_t gen = n - age;
        Eigen::VectorXd x_hat = states[static_cast<std::size_t>(gen)];
        Eigen::VectorXd noise_sum = Eigen::VectorXd::Zero(d);
        for (std::int64_t t = gen; t < n; ++t) {
            x_hat = a * x_hat + b * inputs[static_cast<std::size_t>(t)];
            noise_sum = a * noise_sum + noises[static_cast<std::size_t>(t)];
        }
        const Eigen::VectorXd err = x - x_hat;
        const double gap = (err - noise_sum).cwiseAbs().maxCoeff();

        ClosedLoopSlot entry;
        entry.slot = n;
        entry.age = age;
        entry.norm_x = x.norm();
        entry.norm_e = err.norm();
        entry.identity_gap = gap;
        log.slots.push_back(entry);
        log.max_identity_gap = std::max(log.max_identity_gap, gap);
        if (gap > 1e-6) {
            throw std::logic_error("estimator error deviates from the noise-sum identity at slot " +
                                   std::to_string(n));
        }

        const Eigen::VectorXd u = -gain * x_hat;
        Eigen::VectorXd w(d);
        for (int r = 0; r < d; ++r) {
            w(r) = sd * noise.next_gaussian();
        }
        inputs.push_back(u);
        noises.push_back(w);
        x = a * x + b * u + w;
    }
    return log;
}

} // namespace aoi_ncs
