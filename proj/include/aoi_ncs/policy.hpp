#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoi_ncs/channel.hpp"

namespace aoi_ncs {

enum class PolicyKind { ZeroWait, Constant, Threshold };

/// Stationary randomized sampler realized as a deterministic waiting map:
/// after a delivery whose transmission took y slots, the next sample is
/// generated G(y) slots later, with 0 <= G(y) <= max_wait.
class WaitingPolicy {
public:
    static WaitingPolicy zero_wait(const TransmissionDistribution& dist, int max_wait);
    static WaitingPolicy constant(const TransmissionDistribution& dist, int g0, int max_wait);
    /// Threshold map G(y) = clamp(floor(max(beta - y, 0)), 0, max_wait).
    static WaitingPolicy threshold(const TransmissionDistribution& dist, double beta, int max_wait);

    PolicyKind kind() const { return kind_; }
    int max_wait() const { return max_wait_; }
    /// Threshold parameter; only meaningful for PolicyKind::Threshold.
    double beta() const { return beta_; }

    /// Wait for an observed transmission time. Table lookup on the channel
    /// support; values beyond the truncated support fall back to the
    /// defining formula so rare long draws still get a valid wait.
    int wait_for(int y) const;

    const std::vector<int>& support() const { return support_; }
    const std::vector<int>& wait_table() const { return wait_table_; }
    int max_table_wait() const { return max_table_wait_; }
    /// True when the map never waits on any reachable transmission time.
    bool is_zero_wait() const { return max_table_wait_ == 0; }

private:
    WaitingPolicy(PolicyKind kind, const TransmissionDistribution& dist, int max_wait,
                  int g0, double beta);
    int formula_wait(int y) const;

    PolicyKind kind_ = PolicyKind::ZeroWait;
    int max_wait_ = 0;
    int g0_ = 0;
    double beta_ = 0.0;
    std::vector<int> support_;
    std::vector<int> wait_table_;
    int max_table_wait_ = 0;
};

/// Result of the threshold bisection. `residual` is the bisection objective
/// 2*beta*E[Y+G] - E[(Y+G)^2] at the returned beta (zero at the fixed point).
struct MeasSolution {
    double beta = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double epsilon = 0.0;
};

/// Bisection objective o(beta) = 2*beta*E[Z] - E[Z^2] with Z = Y + g(Y) and
/// the continuous relaxation g(y) = max(beta - y, 0), i.e. Z = max(beta, Y).
/// Strictly increasing in beta; its unique root is the threshold at which
/// the waiting map minimizes the expected age.
double meas_objective(const TransmissionDistribution& dist, double beta);

/// Solves for the age-minimizing threshold by bisection on [0, u0] with
/// u0 = E[Y^2]/E[Y] + 2*(max support + max_wait). The solve runs on the
/// continuous relaxation; flooring and the max_wait clamp are applied only
/// when the waiting map is materialized.
MeasSolution solve_meas(const TransmissionDistribution& dist, int max_wait,
                        double epsilon = 1e-9);

/// CLI-facing policy selector: "zero-wait", "const:<g0>", or "meas".
struct PolicySpec {
    PolicyKind kind = PolicyKind::ZeroWait;
    int g0 = 0;
};

PolicySpec parse_policy_spec(const std::string& text);
std::string to_string(const PolicySpec& spec);

struct MaterializedPolicy {
    WaitingPolicy policy;
    std::optional<MeasSolution> meas;
};

MaterializedPolicy make_policy(const PolicySpec& spec, const TransmissionDistribution& dist,
                               int max_wait, double epsilon = 1e-9);

} // namespace aoi_ncs
