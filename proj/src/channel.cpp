#include "aoi_ncs/channel.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace aoi_ncs {

TransmissionDistribution TransmissionDistribution::geometric(double p, double mass_floor) {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("geometric success probability must lie in (0, 1]");
    }
    if (!(mass_floor > 0.0) || mass_floor >= 1.0) {
        throw std::invalid_argument("mass floor must lie in (0, 1)");
    }
    TransmissionDistribution dist;
    dist.kind_ = Kind::Geometric;
    dist.p_ = p;
    dist.mean_ = 1.0 / p;
    dist.second_moment_ = (2.0 - p) / (p * p);
    if (p == 1.0) {
        dist.support_ = {1};
        dist.pmf_ = {1.0};
        dist.truncation_mass_ = 0.0;
    } else {
        // Tail mass beyond y is (1-p)^y; keep 1..y_max with tail <= mass_floor.
        const int y_max = std::max(1, static_cast<int>(
            std::ceil(std::log(mass_floor) / std::log1p(-p))));
        dist.support_.resize(static_cast<std::size_t>(y_max));
        dist.pmf_.resize(static_cast<std::size_t>(y_max));
        double mass = p;
        for (int y = 1; y <= y_max; ++y) {
            dist.support_[static_cast<std::size_t>(y - 1)] = y;
            dist.pmf_[static_cast<std::size_t>(y - 1)] = mass;
            mass *= (1.0 - p);
        }
        dist.truncation_mass_ = std::pow(1.0 - p, y_max);
    }
    return dist;
}

TransmissionDistribution TransmissionDistribution::deterministic(int c) {
    if (c < 1) {
        throw std::invalid_argument("deterministic transmission time must be >= 1");
    }
    TransmissionDistribution dist;
    dist.kind_ = Kind::Deterministic;
    dist.support_ = {c};
    dist.pmf_ = {1.0};
    dist.mean_ = static_cast<double>(c);
    dist.second_moment_ = static_cast<double>(c) * static_cast<double>(c);
    return dist;
}

TransmissionDistribution TransmissionDistribution::empirical(std::vector<int> support,
                                                             std::vector<double> pmf) {
    if (support.size() != pmf.size() || support.empty()) {
        throw std::invalid_argument("empirical pmf needs matching, non-empty support and masses");
    }
    std::map<int, double> table;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0) {
            throw std::invalid_argument("empirical support values must be non-negative integers");
        }
        if (!(pmf[i] > 0.0)) {
            throw std::invalid_argument("empirical masses must be positive");
        }
        if (!table.emplace(support[i], pmf[i]).second) {
            throw std::invalid_argument("duplicate empirical support value " +
                                        std::to_string(support[i]));
        }
    }
    double total = 0.0;
    for (const auto& [y, mass] : table) {
        total += mass;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("empirical masses sum to " + std::to_string(total) +
                                    ", expected 1 within 1e-9");
    }
    TransmissionDistribution dist;
    dist.kind_ = Kind::Empirical;
    long double mean = 0.0L;
    long double m2 = 0.0L;
    for (const auto& [y, mass] : table) {
        const double q = mass / total;
        dist.support_.push_back(y);
        dist.pmf_.push_back(q);
        mean += static_cast<long double>(q) * y;
        m2 += static_cast<long double>(q) * y * y;
    }
    dist.mean_ = static_cast<double>(mean);
    dist.second_moment_ = static_cast<double>(m2);
    return dist;
}

int TransmissionDistribution::sample(RngStream& stream) const {
    switch (kind_) {
    case Kind::Deterministic:
        return support_.front();
    case Kind::Geometric: {
        if (p_ == 1.0) {
            return 1;
        }
        // Inversion on the full law: smallest y with 1-(1-p)^y >= u.
        const double u = stream.next_uniform();
        return 1 + static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-p_)));
    }
    case Kind::Empirical: {
        const double u = stream.next_uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pmf_.size(); ++i) {
            acc += pmf_[i];
            if (u < acc) {
                return support_[i];
            }
        }
        return support_.back();
    }
    }
    return support_.back();
}

} // namespace aoi_ncs
