#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi_ncs/rng.hpp"

namespace aoi_ncs {

/// Discrete i.i.d. transmission-time law. The support is truncated for
/// analytic summation (total discarded mass <= mass_floor) while moments
/// come from closed forms and samples are drawn from the untruncated law,
/// so truncation only bounds the error of expectation sums.
class TransmissionDistribution {
public:
    enum class Kind { Geometric, Deterministic, Empirical };

    /// Geometric on {1, 2, ...} with success probability p:
    /// P(Y=y) = p (1-p)^(y-1), E[Y] = 1/p, E[Y^2] = (2-p)/p^2.
    static TransmissionDistribution geometric(double p, double mass_floor = 1e-12);

    /// Point mass at c >= 1.
    static TransmissionDistribution deterministic(int c);

    /// Arbitrary pmf over non-negative integer support. Probabilities within
    /// 1e-9 of summing to 1 are renormalized; anything further off is rejected.
    static TransmissionDistribution empirical(std::vector<int> support, std::vector<double> pmf);

    Kind kind() const { return kind_; }
    const std::vector<int>& support() const { return support_; }
    const std::vector<double>& pmf() const { return pmf_; }
    int max_support() const { return support_.back(); }
    int min_support() const { return support_.front(); }
    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }
    double truncation_mass() const { return truncation_mass_; }
    /// Geometric success probability; meaningful only for Kind::Geometric.
    double geometric_p() const { return p_; }

    /// Draws from the untruncated law (geometric by inversion on the full
    /// distribution, never from the truncated table).
    int sample(RngStream& stream) const;

    /// Truncated-support expectation sum_y pmf(y) h(y). For |h| <= H the
    /// truncation contributes at most H * truncation_mass() absolute error.
    template <typename Fn>
    double expect_over_y(Fn&& h) const {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < support_.size(); ++i) {
            const double value = static_cast<double>(h(support_[i]));
            if (!std::isfinite(value)) {
                throw std::domain_error("expectation integrand not finite at y = " +
                                        std::to_string(support_[i]));
            }
            acc += static_cast<long double>(pmf_[i]) * value;
        }
        return static_cast<double>(acc);
    }

private:
    TransmissionDistribution() = default;

    Kind kind_ = Kind::Deterministic;
    std::vector<int> support_;
    std::vector<double> pmf_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
    double truncation_mass_ = 0.0;
    double p_ = 0.0;
};

} // namespace aoi_ncs
