#include "aoi_ncs/lti.hpp"

#include <cmath>
#include <limits>

namespace aoi_ncs {

SystemModel::SystemModel(Eigen::MatrixXd a, double sigma2, std::optional<Eigen::MatrixXd> b)
    : a_matrix(std::move(a)), b_matrix(std::move(b)), noise_variance(sigma2) {
    if (a_matrix.rows() == 0 || a_matrix.rows() != a_matrix.cols()) {
        throw std::invalid_argument("system matrix must be square and non-empty");
    }
    if (!(noise_variance > 0.0)) {
        throw std::invalid_argument("noise variance must be positive");
    }
    if (b_matrix && b_matrix->rows() != a_matrix.rows()) {
        throw std::invalid_argument("input matrix row count must match the state dimension");
    }
}

SystemModel SystemModel::scalar(double a, double sigma2) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = a;
    return SystemModel(m, sigma2);
}

double SystemModel::spectral_radius() const {
    return a_matrix.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd rotation2d(double theta) {
    Eigen::MatrixXd r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

AoiCostFunction::AoiCostFunction(std::vector<double> coeffs, double gamma_rel_tol)
    : coeffs_(std::move(coeffs)) {
    const std::size_t n = coeffs_.size();
    prefix_.resize(n + 1);
    double_prefix_.resize(n + 1);
    prefix_[0] = 0.0;
    double_prefix_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (coeffs_[i] < 0.0) {
            throw std::invalid_argument("age-cost coefficients must be non-negative");
        }
        prefix_[i + 1] = prefix_[i] + coeffs_[i];
        double_prefix_[i + 1] = double_prefix_[i] + prefix_[i];
    }
    gamma_ = check_linear_cost(*this, gamma_rel_tol);
}

AoiCostFunction build_cost_function(const SystemModel& model, int max_delta) {
    if (max_delta < 1) {
        throw std::invalid_argument("max_delta must be at least 1");
    }
    const int d = model.dim();
    std::vector<double> coeffs(static_cast<std::size_t>(max_delta));
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < max_delta; ++i) {
        if (i > 0) {
            power = model.a_matrix * power;
        }
        const double c = model.noise_variance * power.squaredNorm();
        if (!std::isfinite(c)) {
            throw CostOverflowError("cost overflow at index " + std::to_string(i), i);
        }
        coeffs[static_cast<std::size_t>(i)] = c;
    }
    return AoiCostFunction(std::move(coeffs));
}

std::optional<double> check_linear_cost(const AoiCostFunction& cost, double rel_tol) {
    if (cost.max_delta() < 2) {
        return std::nullopt;
    }
    const double gamma = cost.f(1);
    if (!(gamma > 0.0)) {
        return std::nullopt;
    }
    for (int j = 1; j <= cost.max_delta(); ++j) {
        if (std::abs(cost.f(j) - gamma * j) > rel_tol * gamma * j) {
            return std::nullopt;
        }
    }
    return gamma;
}

NoiseTrace NoiseTrace::generate(const SystemModel& model, int length, std::uint64_t seed) {
    if (length < 0) {
        throw std::invalid_argument("noise trace length must be non-negative");
    }
    NoiseTrace trace;
    trace.seed = seed;
    trace.samples.resize(model.dim(), length);
    RngStream stream(seed);
    const double sd = std::sqrt(model.noise_variance);
    for (int n = 0; n < length; ++n) {
        for (int r = 0; r < model.dim(); ++r) {
            trace.samples(r, n) = sd * stream.next_gaussian();
        }
    }
    return trace;
}

Eigen::VectorXd error_from_noise(const SystemModel& model, const NoiseTrace& noise,
                                 int age, int n) {
    if (age < 0) {
        throw std::invalid_argument("age must be non-negative");
    }
    if (n - age < 0) {
        throw std::out_of_range("noise index underflow: n - age < 0");
    }
    if (n > noise.length()) {
        throw std::out_of_range("slot index beyond the noise trace");
    }
    // Horner form: W_{n-1} + A (W_{n-2} + A (...)).
    Eigen::VectorXd err = Eigen::VectorXd::Zero(model.dim());
    for (int i = age; i >= 1; --i) {
        err = model.a_matrix * err + noise.samples.col(n - i);
    }
    return err;
}

double per_slot_error_variance(const SystemModel& model, int age) {
    if (age < 1) {
        throw std::invalid_argument("age must be at least 1");
    }
    const int d = model.dim();
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    double total = 0.0;
    for (int i = 1; i <= age; ++i) {
        if (i > 1) {
            power = power * model.a_matrix;
        }
        double sum_sq = 0.0;
        for (int r = 0; r < d; ++r) {
            for (int l = 0; l < d; ++l) {
                const double a = power(r, l);
                sum_sq += a * a;
            }
        }
        total += model.noise_variance * sum_sq;
        if (!std::isfinite(total)) {
            throw CostOverflowError("cost overflow at index " + std::to_string(i - 1), i - 1);
        }
    }
    return total;
}

} // namespace aoi_ncs
