#include "aoi_ncs/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace aoi_ncs {

namespace {

// Expected wait E[G(Y)] over the truncated support.
double expected_wait(const TransmissionDistribution& dist, const WaitingPolicy& policy) {
    return dist.expect_over_y([&](int y) { return static_cast<double>(policy.wait_for(y)); });
}

// sum_{j=a}^{a+len-1} j.
double arithmetic_block(int a, int len) {
    const double first = static_cast<double>(a);
    const double n = static_cast<double>(len);
    return n * first + 0.5 * n * (n - 1.0);
}

} // namespace

RenewalEvaluation expected_f_delta(const AoiCostFunction& cost,
                                   const TransmissionDistribution& dist,
                                   const WaitingPolicy& policy) {
    const int y_max = dist.max_support();
    const int g_max = policy.max_table_wait();
    const int required = 2 * y_max + g_max;
    if (cost.max_delta() < required) {
        throw std::out_of_range("cost table too small: need max_delta >= " +
                                std::to_string(required) + ", have " +
                                std::to_string(cost.max_delta()));
    }

    const auto& support = dist.support();
    const auto& pmf = dist.pmf();

    long double numerator = 0.0L;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const int y_prev = support[i];
        const int wait = policy.wait_for(y_prev);
        long double inner = 0.0L;
        for (std::size_t j = 0; j < support.size(); ++j) {
            const int y_cur = support[j];
            inner += static_cast<long double>(pmf[j]) *
                     cost.f_block_sum(y_prev, wait + y_cur);
        }
        numerator += static_cast<long double>(pmf[i]) * inner;
    }

    RenewalEvaluation eval;
    eval.numerator = static_cast<double>(numerator);
    eval.denominator = dist.mean() + expected_wait(dist, policy);
    if (!(eval.denominator > 0.0)) {
        throw std::invalid_argument("expected cycle length must be positive");
    }
    eval.value = eval.numerator / eval.denominator;

    const double mass = dist.truncation_mass();
    const double num_bound = 2.0 * mass * cost.f_block_sum(0, cost.max_delta());
    const double den_bound = mass * static_cast<double>(y_max + g_max);
    eval.truncation_error_bound =
        (num_bound + std::abs(eval.value) * den_bound) / eval.denominator;
    return eval;
}

RenewalEvaluation expected_aoi(const TransmissionDistribution& dist,
                               const WaitingPolicy& policy) {
    const auto& support = dist.support();
    const auto& pmf = dist.pmf();

    long double numerator = 0.0L;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const int y_prev = support[i];
        const int wait = policy.wait_for(y_prev);
        long double inner = 0.0L;
        for (std::size_t j = 0; j < support.size(); ++j) {
            inner += static_cast<long double>(pmf[j]) *
                     arithmetic_block(y_prev, wait + support[j]);
        }
        numerator += static_cast<long double>(pmf[i]) * inner;
    }

    RenewalEvaluation eval;
    eval.numerator = static_cast<double>(numerator);
    eval.denominator = dist.mean() + expected_wait(dist, policy);
    if (!(eval.denominator > 0.0)) {
        throw std::invalid_argument("expected cycle length must be positive");
    }
    eval.value = eval.numerator / eval.denominator;

    const double mass = dist.truncation_mass();
    const int max_age = 2 * dist.max_support() + policy.max_table_wait();
    const double num_bound =
        2.0 * mass * arithmetic_block(0, max_age > 0 ? max_age : 1);
    const double den_bound = mass * static_cast<double>(max_age);
    eval.truncation_error_bound =
        (num_bound + std::abs(eval.value) * den_bound) / eval.denominator;
    return eval;
}

double zero_wait_geometric_aoi(double p) {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("geometric success probability must lie in (0, 1]");
    }
    return (4.0 - p) / (2.0 * p) - 0.5;
}

} // namespace aoi_ncs
