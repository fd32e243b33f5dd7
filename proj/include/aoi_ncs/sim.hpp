#pragma once

#include <cstdint>
#include <vector>

#include "aoi_ncs/analytic.hpp"
#include "aoi_ncs/channel.hpp"
#include "aoi_ncs/lti.hpp"
#include "aoi_ncs/policy.hpp"

namespace aoi_ncs {

enum class SimMode { FullTrajectory, RenewalFast };

/// One simulation run. Cycles are delimited by packet departures; the run
/// starts from a virtual departure at slot 0 whose transmission time is
/// drawn from the channel, and that bootstrap cycle is always discarded, so
/// `cycles` counts the cycles that enter the metrics after `warmup_cycles`
/// further discards.
struct SimConfig {
    SimConfig(SystemModel m, TransmissionDistribution d, WaitingPolicy p)
        : model(std::move(m)), dist(std::move(d)), policy(std::move(p)) {}

    SystemModel model;
    TransmissionDistribution dist;
    WaitingPolicy policy;
    std::int64_t cycles = 1'000'000;
    std::int64_t warmup_cycles = 1'000;
    std::uint64_t seed = 1;
    SimMode mode = SimMode::FullTrajectory;
    /// Stop after this many counted slots (checked at cycle boundaries);
    /// 0 means no cap.
    std::int64_t max_slots = 0;
    /// Flag the run as diverged once the running time-average squared error
    /// crosses this value.
    double divergence_threshold = 1e12;
};

/// Per-cycle record: previous transmission time, wait, current transmission
/// time, accumulated squared-error mass zeta, and the cycle length.
struct CycleRecord {
    std::int64_t k = 0;
    int y_prev = 0;
    int wait = 0;
    int y_cur = 0;
    double zeta = 0.0;
    int cycle_len = 0;
};

/// (slot, age) pairs for trajectory-level checks on small runs.
struct SlotTrace {
    std::vector<std::int64_t> slot;
    std::vector<int> age;
};

struct RunMetrics {
    double time_avg_sq_error = 0.0;
    double empirical_mean_aoi = 0.0;
    std::int64_t total_slots = 0;
    std::int64_t total_cycles = 0;
    /// Batch-means standard error of the time-average squared error
    /// (100 batches of cycles; cycles are only 1-dependent, so batches of
    /// many cycles are effectively independent).
    double stderr_sq_error = 0.0;
    std::uint64_t seed = 0;
    bool diverged = false;
    /// Counted slot (since metrics start) at which the divergence flag
    /// fired; -1 when it never did.
    std::int64_t diverged_at_slot = -1;
};

/// Slot-by-slot simulation: plant noise is drawn every slot, ages follow
/// the departure process, and the per-slot error is the exact noise sum at
/// the current age (maintained incrementally, re-anchored at departures).
RunMetrics run_full(const SimConfig& config,
                    std::vector<CycleRecord>* cycle_log = nullptr,
                    SlotTrace* slot_trace = nullptr);

/// Renewal-cycle mode: samples only the transmission-time chain and scores
/// each cycle with its conditional expected cost from the prefix tables.
/// Converges to the same limit as run_full with no per-slot work.
RunMetrics run_renewal_fast(const SimConfig& config);

struct ClosedLoopSlot {
    std::int64_t slot = 0;
    int age = 0;
    double norm_x = 0.0;
    double norm_e = 0.0;
    /// Max per-component gap between the estimator-based error and the
    /// noise-sum form of the same error.
    double identity_gap = 0.0;
};

struct ClosedLoopLog {
    std::vector<ClosedLoopSlot> slots;
    double max_identity_gap = 0.0;
};

/// Closed-loop diagnostic with certainty-equivalence control u = -K x_hat.
/// The estimator reconstructs the state from the freshest delivered sample
/// and the control history, applying A^(i-1) B to the input issued i slots
/// ago (i = 1..age). The run starts with the state known exactly at slot 0
/// (age 0) and the first sample taken immediately. At every slot the
/// estimator-based error must equal the noise sum at the current age; the
/// control terms cancel, so the waiting policy never enters the error.
ClosedLoopLog run_closed_loop_demo(const SimConfig& config, const Eigen::MatrixXd& gain,
                                   std::int64_t horizon_slots);

} // namespace aoi_ncs
