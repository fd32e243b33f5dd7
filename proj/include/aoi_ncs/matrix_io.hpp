#pragma once

#include <Eigen/Dense>

#include <string>

#include "aoi_ncs/channel.hpp"

namespace aoi_ncs {

/// Reads a plain-text matrix: one row per line, entries separated by
/// whitespace and/or commas, dimensions inferred. Blank lines and lines
/// starting with '#' are skipped.
Eigen::MatrixXd load_matrix(const std::string& path);

/// Reads an empirical transmission-time pmf: lines of "y probability".
/// Masses within 1e-9 of summing to 1 are renormalized, otherwise the file
/// is rejected.
TransmissionDistribution load_empirical_pmf(const std::string& path);

} // namespace aoi_ncs
