#include "aoi_ncs/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace aoi_ncs {

namespace {

std::vector<std::vector<double>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open file: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        double value = 0.0;
        while (fields >> value) {
            row.push_back(value);
        }
        std::string tail;
        fields.clear();
        if (fields >> tail) {
            throw std::invalid_argument("non-numeric entry '" + tail + "' in " + path);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

Eigen::MatrixXd load_matrix(const std::string& path) {
    const auto rows = read_rows(path);
    if (rows.empty()) {
        throw std::invalid_argument("matrix file has no rows: " + path);
    }
    const std::size_t cols = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != cols) {
            throw std::invalid_argument("ragged matrix rows in " + path);
        }
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

TransmissionDistribution load_empirical_pmf(const std::string& path) {
    const auto rows = read_rows(path);
    if (rows.empty()) {
        throw std::invalid_argument("pmf file has no rows: " + path);
    }
    std::vector<int> support;
    std::vector<double> pmf;
    for (const auto& row : rows) {
        if (row.size() != 2) {
            throw std::invalid_argument("pmf lines must be 'y probability' in " + path);
        }
        const double y = row[0];
        if (y < 0.0 || y != std::floor(y)) {
            throw std::invalid_argument("pmf support values must be non-negative integers in " +
                                        path);
        }
        support.push_back(static_cast<int>(y));
        pmf.push_back(row[1]);
    }
    return TransmissionDistribution::empirical(std::move(support), std::move(pmf));
}

} // namespace aoi_ncs
