#include "aoi_ncs/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoi_ncs {

WaitingPolicy::WaitingPolicy(PolicyKind kind, const TransmissionDistribution& dist,
                             int max_wait, int g0, double beta)
    : kind_(kind), max_wait_(max_wait), g0_(g0), beta_(beta), support_(dist.support()) {
    if (max_wait < 0) {
        throw std::invalid_argument("max_wait must be non-negative");
    }
    wait_table_.reserve(support_.size());
    for (int y : support_) {
        const int g = formula_wait(y);
        wait_table_.push_back(g);
        max_table_wait_ = std::max(max_table_wait_, g);
    }
}

int WaitingPolicy::formula_wait(int y) const {
    switch (kind_) {
    case PolicyKind::ZeroWait:
        return 0;
    case PolicyKind::Constant:
        return std::min(g0_, max_wait_);
    case PolicyKind::Threshold: {
        const double g = std::floor(std::max(beta_ - static_cast<double>(y), 0.0));
        return static_cast<int>(std::min(g, static_cast<double>(max_wait_)));
    }
    }
    return 0;
}

int WaitingPolicy::wait_for(int y) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), y);
    if (it != support_.end() && *it == y) {
        return wait_table_[static_cast<std::size_t>(it - support_.begin())];
    }
    return formula_wait(y);
}

WaitingPolicy WaitingPolicy::zero_wait(const TransmissionDistribution& dist, int max_wait) {
    return WaitingPolicy(PolicyKind::ZeroWait, dist, max_wait, 0, 0.0);
}

WaitingPolicy WaitingPolicy::constant(const TransmissionDistribution& dist, int g0, int max_wait) {
    if (g0 < 0) {
        throw std::invalid_argument("constant wait must be non-negative");
    }
    return WaitingPolicy(PolicyKind::Constant, dist, max_wait, g0, 0.0);
}

WaitingPolicy WaitingPolicy::threshold(const TransmissionDistribution& dist, double beta,
                                       int max_wait) {
    if (!(beta >= 0.0)) {
        throw std::invalid_argument("threshold must be non-negative");
    }
    return WaitingPolicy(PolicyKind::Threshold, dist, max_wait, 0, beta);
}

double meas_objective(const TransmissionDistribution& dist, double beta) {
    const double ez = dist.expect_over_y(
        [&](int y) { return std::max(beta, static_cast<double>(y)); });
    const double ez2 = dist.expect_over_y([&](int y) {
        const double z = std::max(beta, static_cast<double>(y));
        return z * z;
    });
    return 2.0 * beta * ez - ez2;
}

MeasSolution solve_meas(const TransmissionDistribution& dist, int max_wait, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
    if (!(dist.mean() > 0.0)) {
        throw std::invalid_argument("transmission distribution needs a positive mean");
    }
    if (max_wait < 0) {
        throw std::invalid_argument("max_wait must be non-negative");
    }
    const double u0 = dist.second_moment() / dist.mean() +
                      2.0 * (dist.max_support() + max_wait);
    if (meas_objective(dist, u0) < 0.0) {
        throw std::runtime_error("upper bound too small for threshold bisection");
    }
    double lower = 0.0;
    double upper = u0;
    int iterations = 0;
    while (upper - lower > epsilon) {
        const double beta = 0.5 * (lower + upper);
        if (meas_objective(dist, beta) >= 0.0) {
            upper = beta;
        } else {
            lower = beta;
        }
        ++iterations;
    }
    MeasSolution solution;
    solution.beta = 0.5 * (lower + upper);
    solution.iterations = iterations;
    solution.residual = meas_objective(dist, solution.beta);
    solution.epsilon = epsilon;
    return solution;
}

PolicySpec parse_policy_spec(const std::string& text) {
    PolicySpec spec;
    if (text == "zero-wait") {
        spec.kind = PolicyKind::ZeroWait;
        return spec;
    }
    if (text == "meas") {
        spec.kind = PolicyKind::Threshold;
        return spec;
    }
    if (text.rfind("const:", 0) == 0) {
        spec.kind = PolicyKind::Constant;
        try {
            std::size_t consumed = 0;
            const std::string arg = text.substr(6);
            spec.g0 = std::stoi(arg, &consumed);
            if (consumed != arg.size() || spec.g0 < 0) {
                throw std::invalid_argument("");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("invalid constant wait in policy spec '" + text + "'");
        }
        return spec;
    }
    throw std::invalid_argument("unknown policy spec '" + text +
                                "' (expected zero-wait, const:<g0>, or meas)");
}

std::string to_string(const PolicySpec& spec) {
    switch (spec.kind) {
    case PolicyKind::ZeroWait:
        return "zero-wait";
    case PolicyKind::Constant:
        return "const:" + std::to_string(spec.g0);
    case PolicyKind::Threshold:
        return "meas";
    }
    return "zero-wait";
}

MaterializedPolicy make_policy(const PolicySpec& spec, const TransmissionDistribution& dist,
                               int max_wait, double epsilon) {
    switch (spec.kind) {
    case PolicyKind::ZeroWait:
        return {WaitingPolicy::zero_wait(dist, max_wait), std::nullopt};
    case PolicyKind::Constant:
        return {WaitingPolicy::constant(dist, spec.g0, max_wait), std::nullopt};
    case PolicyKind::Threshold: {
        const MeasSolution solution = solve_meas(dist, max_wait, epsilon);
        return {WaitingPolicy::threshold(dist, solution.beta, max_wait), solution};
    }
    }
    return {WaitingPolicy::zero_wait(dist, max_wait), std::nullopt};
}

} // namespace aoi_ncs
