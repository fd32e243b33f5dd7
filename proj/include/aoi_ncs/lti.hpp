#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aoi_ncs/rng.hpp"

namespace aoi_ncs {

/// Thrown when an age-cost coefficient leaves the finite double range,
/// which happens for spectrally unstable dynamics and large age bounds.
class CostOverflowError : public std::runtime_error {
public:
    CostOverflowError(std::string message, int index)
        : std::runtime_error(std::move(message)), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

/// Discrete-time plant x' = A x + B u + w with isotropic Gaussian noise
/// w ~ N(0, sigma2 * I). Only the isotropic covariance is representable;
/// the input matrix is needed only by the closed-loop demo.
struct SystemModel {
    Eigen::MatrixXd a_matrix;
    std::optional<Eigen::MatrixXd> b_matrix;
    double noise_variance = 1.0;

    SystemModel(Eigen::MatrixXd a, double sigma2,
                std::optional<Eigen::MatrixXd> b = std::nullopt);

    int dim() const { return static_cast<int>(a_matrix.rows()); }
    double spectral_radius() const;

    static SystemModel scalar(double a, double sigma2);
};

/// 2x2 rotation by `theta`; orthogonal, so the age cost is linear.
Eigen::MatrixXd rotation2d(double theta);

/// Tabulated age cost f(age) = sum_{i<age} sigma2 * |A^i|_F^2 with single
/// and double prefix sums so any contiguous cost-of-ages block is O(1).
///
///   coeffs[i]        = per-step increment c_i
///   prefix[m]        = f(m)
///   double_prefix[m] = sum_{j<m} f(j)
///
/// `gamma` is set when f(j) = gamma * j holds over the whole table
/// (orthogonal A; in the scalar case only A = +/-1).
class AoiCostFunction {
public:
    AoiCostFunction(std::vector<double> coeffs, double gamma_rel_tol = 1e-10);

    int max_delta() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::optional<double> gamma() const { return gamma_; }

    /// f(age); valid for 0 <= age <= max_delta.
    double f(int age) const {
        require_index(age);
        return prefix_[static_cast<std::size_t>(age)];
    }

    /// sum_{j=start_age}^{start_age+length-1} f(j).
    double f_block_sum(int start_age, int length) const {
        require_index(start_age + length);
        return double_prefix_[static_cast<std::size_t>(start_age + length)] -
               double_prefix_[static_cast<std::size_t>(start_age)];
    }

private:
    void require_index(int m) const {
        if (m < 0 || m > max_delta()) {
            throw std::out_of_range("cost table too small: need max_delta >= " +
                                    std::to_string(m) + ", have " + std::to_string(max_delta()));
        }
    }

    std::vector<double> coeffs_;
    std::vector<double> prefix_;
    std::vector<double> double_prefix_;
    std::optional<double> gamma_;
};

/// Builds the age-cost table by iterated matrix powers; overflow of any
/// coefficient raises CostOverflowError carrying the offending index.
AoiCostFunction build_cost_function(const SystemModel& model, int max_delta);

/// Returns gamma = f(1) = dim * sigma2 when |f(j) - gamma*j| <= rel_tol*gamma*j
/// for every 1 <= j <= max_delta, absent otherwise.
std::optional<double> check_linear_cost(const AoiCostFunction& cost, double rel_tol = 1e-10);

/// Materialized i.i.d. N(0, sigma2*I) noise sequence W_0..W_{n-1}; the same
/// seed regenerates the identical trace.
struct NoiseTrace {
    Eigen::MatrixXd samples; // dim x length, column n = W_n
    std::uint64_t seed = 0;

    static NoiseTrace generate(const SystemModel& model, int length, std::uint64_t seed);
    int length() const { return static_cast<int>(samples.cols()); }
};

/// Estimation error at slot n for the given age:
/// sum_{i=1..age} A^(i-1) W_{n-i}; age 0 yields the zero vector.
Eigen::VectorXd error_from_noise(const SystemModel& model, const NoiseTrace& noise,
                                 int age, int n);

/// E[|e|^2] at the given age, accumulated element-wise from the entries of
/// the iterated powers of A. Independent code path from the cost table;
/// the two must agree, which makes this the table's cross-check oracle.
double per_slot_error_variance(const SystemModel& model, int age);

} // namespace aoi_ncs
