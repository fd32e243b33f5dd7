#pragma once

#include "aoi_ncs/channel.hpp"
#include "aoi_ncs/lti.hpp"
#include "aoi_ncs/policy.hpp"

namespace aoi_ncs {

/// A renewal-reward ratio: value = numerator / denominator, with the
/// denominator the expected cycle length E[Y + G]. The reported
/// truncation_error_bound is a first-order bound on the value error induced
/// by the channel's truncated support.
struct RenewalEvaluation {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double truncation_error_bound = 0.0;
};

/// Expected age cost E[f(age)] under the stationary waiting map, evaluated
/// as the exact renewal ratio
///
///   E[ sum_{j=y .. y+G(y)+y'-1} f(j) ] / E[Y + G]
///
/// with (y, y') the previous and current transmission times, independent by
/// the i.i.d. channel assumption. The numerator is a double sum over the
/// truncated support with O(1) per-pair cost via the double-prefix table;
/// the cost table must extend to ages y_max + G_max + y_max.
RenewalEvaluation expected_f_delta(const AoiCostFunction& cost,
                                   const TransmissionDistribution& dist,
                                   const WaitingPolicy& policy);

/// Expected age E[age] under the waiting map: same cycle decomposition with
/// the inner sum replaced by the closed-form arithmetic series.
RenewalEvaluation expected_aoi(const TransmissionDistribution& dist,
                               const WaitingPolicy& policy);

/// Closed-form expected age of the zero-wait policy over a geometric
/// channel: E[Y^2]/(2 E[Y]) + E[Y] - 1/2 = (4-p)/(2p) - 1/2.
double zero_wait_geometric_aoi(double p);

} // namespace aoi_ncs
