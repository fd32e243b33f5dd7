#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "aoi_ncs/channel.hpp"

using namespace aoi_ncs;

namespace {

// Wilson-Hilferty approximation of the chi-squared quantile.
double chi_squared_critical(int df, double z) {
    const double a = 2.0 / (9.0 * df);
    const double base = 1.0 - a + z * std::sqrt(a);
    return df * base * base * base;
}

} // namespace

TEST_CASE("degenerate geometric channel") {
    const auto dist = TransmissionDistribution::geometric(1.0);
    CHECK(dist.support() == std::vector<int>{1});
    CHECK(dist.mean() == 1.0);
    CHECK(dist.second_moment() == 1.0);
    CHECK(dist.truncation_mass() == 0.0);
}

TEST_CASE("geometric moments come from closed forms") {
    const auto dist = TransmissionDistribution::geometric(0.1);
    CHECK(dist.mean() == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(dist.second_moment() == doctest::Approx(190.0).epsilon(1e-15));
    CHECK(dist.truncation_mass() <= 1e-12);
    CHECK(dist.min_support() == 1);

    // Truncated table is consistent with the closed forms.
    const double mass = dist.expect_over_y([](int) { return 1.0; });
    CHECK(mass == doctest::Approx(1.0 - dist.truncation_mass()).epsilon(1e-14));
    const double mean = dist.expect_over_y([](int y) { return double(y); });
    CHECK(std::abs(mean - 10.0) <= 1e-9);
    const double m2 = dist.expect_over_y([](int y) { return double(y) * y; });
    CHECK(std::abs(m2 - 190.0) <= 1e-7);
    const double y_max = dist.max_support();
    CHECK(std::abs(m2 - 190.0) <= 10.0 * 1e-12 * y_max * y_max);
}

TEST_CASE("geometric pmf head") {
    const auto dist = TransmissionDistribution::geometric(0.5);
    CHECK(dist.pmf()[0] == doctest::Approx(0.5));
    CHECK(dist.pmf()[1] == doctest::Approx(0.25));
    CHECK(dist.pmf()[2] == doctest::Approx(0.125));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(TransmissionDistribution::geometric(0.0), std::invalid_argument);
    CHECK_THROWS_AS(TransmissionDistribution::geometric(1.5), std::invalid_argument);
    CHECK_THROWS_AS(TransmissionDistribution::deterministic(0), std::invalid_argument);
}

TEST_CASE("deterministic sampling") {
    const auto dist = TransmissionDistribution::deterministic(3);
    RngStream stream(5);
    for (int i = 0; i < 10; ++i) {
        CHECK(dist.sample(stream) == 3);
    }
}

TEST_CASE("sampling is deterministic per stream state") {
    const auto dist = TransmissionDistribution::geometric(0.37);
    RngStream a(77);
    RngStream b(77);
    for (int i = 0; i < 100; ++i) {
        CHECK(dist.sample(a) == dist.sample(b));
    }
}

TEST_CASE("geometric sample mean satisfies the CLT bound") {
    const auto dist = TransmissionDistribution::geometric(0.5);
    RngStream stream(2025);
    const int draws = 1000000;
    long long total = 0;
    for (int i = 0; i < draws; ++i) {
        total += dist.sample(stream);
    }
    const double mean = static_cast<double>(total) / draws;
    CHECK(std::abs(mean - 2.0) < 0.01);
}

TEST_CASE("sample frequencies pass a goodness-of-fit test") {
    const auto dist = TransmissionDistribution::geometric(0.3);
    RngStream stream(31337);
    const int draws = 1000000;

    // Bins: one per support value while the expected count stays >= 5,
    // then a pooled tail.
    std::vector<double> expected;
    for (std::size_t i = 0; i < dist.pmf().size(); ++i) {
        const double e = dist.pmf()[i] * draws;
        if (e < 5.0) {
            break;
        }
        expected.push_back(e);
    }
    REQUIRE(expected.size() >= 2);
    const int head = static_cast<int>(expected.size());
    double tail_expected = draws;
    for (double e : expected) {
        tail_expected -= e;
    }

    std::vector<double> observed(expected.size() + 1, 0.0);
    for (int i = 0; i < draws; ++i) {
        const int y = dist.sample(stream);
        if (y <= head) {
            observed[static_cast<std::size_t>(y - 1)] += 1.0;
        } else {
            observed.back() += 1.0;
        }
    }
    expected.push_back(tail_expected);

    double stat = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const int df = static_cast<int>(expected.size()) - 1;
    // 1 - 1e-3 quantile of the standard normal is 3.0902.
    CHECK(stat < chi_squared_critical(df, 3.090232306167814));
}

TEST_CASE("expectation helper rejects non-finite integrands") {
    const auto dist = TransmissionDistribution::geometric(0.5);
    CHECK_THROWS_WITH_AS(
        dist.expect_over_y([](int y) { return y == 2 ? INFINITY : 1.0; }),
        "expectation integrand not finite at y = 2", std::domain_error);
}

TEST_CASE("empirical distributions") {
    SUBCASE("moments from the table") {
        const auto dist = TransmissionDistribution::empirical({1, 3}, {0.5, 0.5});
        CHECK(dist.mean() == doctest::Approx(2.0));
        CHECK(dist.second_moment() == doctest::Approx(5.0));
        CHECK(dist.truncation_mass() == 0.0);
    }
    SUBCASE("support may include zero") {
        const auto dist = TransmissionDistribution::empirical({0, 2}, {0.25, 0.75});
        CHECK(dist.min_support() == 0);
        CHECK(dist.mean() == doctest::Approx(1.5));
    }
    SUBCASE("slightly-off masses are renormalized") {
        const auto dist = TransmissionDistribution::empirical({1, 2}, {0.5, 0.5 + 1e-10});
        const double mass = std::accumulate(dist.pmf().begin(), dist.pmf().end(), 0.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("bad inputs are rejected") {
        CHECK_THROWS_AS(TransmissionDistribution::empirical({1, 2}, {0.6, 0.6}),
                        std::invalid_argument);
        CHECK_THROWS_AS(TransmissionDistribution::empirical({1, 1}, {0.5, 0.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(TransmissionDistribution::empirical({-1, 2}, {0.5, 0.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(TransmissionDistribution::empirical({1}, {0.0}), std::invalid_argument);
    }
    SUBCASE("sampling follows the table") {
        const auto dist = TransmissionDistribution::empirical({2, 5}, {0.25, 0.75});
        RngStream stream(9);
        int fives = 0;
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            const int y = dist.sample(stream);
            CHECK((y == 2 || y == 5));
            fives += y == 5;
        }
        CHECK(std::abs(fives / double(draws) - 0.75) < 0.01);
    }
}
