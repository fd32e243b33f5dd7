#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "aoi_ncs/analytic.hpp"

using namespace aoi_ncs;

namespace {

constexpr double kTightFloor = 1e-14;

AoiCostFunction cost_for(const SystemModel& model, const TransmissionDistribution& dist,
                         const WaitingPolicy& policy) {
    return build_cost_function(model, 2 * dist.max_support() + policy.max_table_wait());
}

} // namespace

TEST_CASE("zero-wait error column for the unit scalar system") {
    const auto model = SystemModel::scalar(1.0, 1.0);
    const std::vector<double> p_grid = {0.01, 0.05, 0.1, 0.2, 0.4, 0.8};
    const std::vector<double> expected = {199.0, 39.0, 19.0, 9.0, 4.0, 1.5};
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        const auto dist = TransmissionDistribution::geometric(p_grid[i], kTightFloor);
        const auto policy = WaitingPolicy::zero_wait(dist, 100);
        const auto cost = cost_for(model, dist, policy);
        const auto eval = expected_f_delta(cost, dist, policy);
        CHECK(std::abs(eval.value - expected[i]) <= 1e-6);
        CHECK(eval.denominator == doctest::Approx(1.0 / p_grid[i]).epsilon(1e-12));
        CHECK(eval.value == doctest::Approx(eval.numerator / eval.denominator));
    }
}

TEST_CASE("closed-form zero-wait age for geometric channels") {
    CHECK(zero_wait_geometric_aoi(0.05) == doctest::Approx(39.0).epsilon(1e-15));
    CHECK(zero_wait_geometric_aoi(0.2) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(zero_wait_geometric_aoi(0.8) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(zero_wait_geometric_aoi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(zero_wait_geometric_aoi(0.0), std::invalid_argument);
    CHECK_THROWS_AS(zero_wait_geometric_aoi(1.1), std::invalid_argument);
}

TEST_CASE("double-sum and closed-form age paths agree") {
    for (double p : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto dist = TransmissionDistribution::geometric(p, kTightFloor);
        const auto policy = WaitingPolicy::zero_wait(dist, 100);
        const auto eval = expected_aoi(dist, policy);
        CHECK(std::abs(eval.value - zero_wait_geometric_aoi(p)) <= 1e-8);
        CHECK(eval.truncation_error_bound < 1e-6);
    }
}

TEST_CASE("constant channel ages enumerate by hand") {
    SUBCASE("zero-wait over deterministic(c): ages run c..2c-1") {
        for (int c : {1, 2, 5}) {
            const auto dist = TransmissionDistribution::deterministic(c);
            const auto policy = WaitingPolicy::zero_wait(dist, 100);
            const auto eval = expected_aoi(dist, policy);
            CHECK(eval.value == doctest::Approx(c + (c - 1) / 2.0).epsilon(1e-14));
        }
    }
    SUBCASE("deterministic(2) with unit wait: the single cycle has ages {2,3,4}") {
        const auto dist = TransmissionDistribution::deterministic(2);
        const auto policy = WaitingPolicy::constant(dist, 1, 100);
        CHECK(expected_aoi(dist, policy).value == doctest::Approx(3.0).epsilon(1e-14));

        const auto model = SystemModel::scalar(0.5, 1.0);
        const auto cost = cost_for(model, dist, policy);
        // (f(2) + f(3) + f(4)) / 3 with f = 1.25, 1.3125, 1.328125
        CHECK(expected_f_delta(cost, dist, policy).value ==
              doctest::Approx(1.296875).epsilon(1e-14));
    }
    SUBCASE("deterministic(2) zero-wait pins the age set {2,3}") {
        const auto dist = TransmissionDistribution::deterministic(2);
        const auto policy = WaitingPolicy::zero_wait(dist, 100);
        CHECK(expected_aoi(dist, policy).value == doctest::Approx(2.5).epsilon(1e-14));
        const auto model = SystemModel::scalar(1.0, 1.0);
        const auto cost = cost_for(model, dist, policy);
        CHECK(expected_f_delta(cost, dist, policy).value ==
              doctest::Approx(2.5).epsilon(1e-14));
    }
}

TEST_CASE("linear-cost systems reduce the error to gamma times the age") {
    const auto dist = TransmissionDistribution::geometric(0.1, kTightFloor);
    std::vector<WaitingPolicy> policies;
    policies.push_back(WaitingPolicy::zero_wait(dist, 100));
    policies.push_back(WaitingPolicy::constant(dist, 1, 100));
    policies.push_back(WaitingPolicy::constant(dist, 3, 100));
    policies.push_back(WaitingPolicy::threshold(dist, solve_meas(dist, 100).beta, 100));

    SUBCASE("planar rotation, gamma = 2 sigma2") {
        const SystemModel model(rotation2d(0.7), 1.0);
        for (const auto& policy : policies) {
            const auto cost = cost_for(model, dist, policy);
            REQUIRE(cost.gamma().has_value());
            const double gamma = *cost.gamma();
            CHECK(gamma == doctest::Approx(2.0).epsilon(1e-12));
            const double f_delta = expected_f_delta(cost, dist, policy).value;
            const double aoi = expected_aoi(dist, policy).value;
            CHECK(f_delta == doctest::Approx(gamma * aoi).epsilon(1e-10));
        }
    }
    SUBCASE("scalar +/-1, gamma = sigma2") {
        for (double a : {1.0, -1.0}) {
            const SystemModel model = SystemModel::scalar(a, 1.0);
            for (const auto& policy : policies) {
                const auto cost = cost_for(model, dist, policy);
                REQUIRE(cost.gamma().has_value());
                const double f_delta = expected_f_delta(cost, dist, policy).value;
                const double aoi = expected_aoi(dist, policy).value;
                CHECK(f_delta == doctest::Approx(aoi).epsilon(1e-10));
            }
        }
    }
    SUBCASE("rotation at p = 0.1 under zero-wait evaluates to 38") {
        const SystemModel model(rotation2d(0.7), 1.0);
        const auto policy = WaitingPolicy::zero_wait(dist, 100);
        const auto cost = cost_for(model, dist, policy);
        CHECK(std::abs(expected_f_delta(cost, dist, policy).value - 38.0) <= 2e-6);
    }
}

TEST_CASE("solved threshold policy never loses to zero-wait analytically") {
    const auto model = SystemModel::scalar(1.0, 1.0);
    for (double p : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto dist = TransmissionDistribution::geometric(p, kTightFloor);
        const auto zero = WaitingPolicy::zero_wait(dist, 100);
        const auto meas =
            WaitingPolicy::threshold(dist, solve_meas(dist, 100).beta, 100);
        const auto cost = cost_for(model, dist, meas);
        const double zw = expected_f_delta(cost, dist, zero).value;
        const double th = expected_f_delta(cost, dist, meas).value;
        CHECK(th <= zw);
    }
}

TEST_CASE("undersized cost tables are rejected with the required size") {
    const auto dist = TransmissionDistribution::geometric(0.5);
    const auto policy = WaitingPolicy::zero_wait(dist, 100);
    const auto model = SystemModel::scalar(1.0, 1.0);
    const auto cost = build_cost_function(model, 10);
    const int required = 2 * dist.max_support();
    try {
        expected_f_delta(cost, dist, policy);
        FAIL("expected out_of_range");
    } catch (const std::out_of_range& error) {
        CHECK(std::string(error.what()).find(std::to_string(required)) != std::string::npos);
    }
}
