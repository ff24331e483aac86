#pragma once

// Test-only reference implementations, deliberately independent of the
// library's numerical paths: a plain trapezoid integrator, direct Fourier
// sums, closed-form covariances, and brute-force matrix routes. Library
// results are checked against these, never the other way around.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "toepca/linalg.hpp"
#include "toepca/rng.hpp"

namespace oracle {

/// Composite trapezoid rule with a fixed high resolution.
inline double trapezoid(const std::function<double(double)>& f, double a, double b,
                        std::size_t intervals = 1u << 20) {
    const double h = (b - a) / static_cast<double>(intervals);
    double acc = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < intervals; ++i) acc += f(a + h * static_cast<double>(i));
    return acc * h;
}

/// Band-limited covariance by definition: (1/pi) int_0^W cos(theta tau).
inline double bandlimited_covariance(double half_bandwidth, long tau,
                                     std::size_t intervals = 1u << 20) {
    return trapezoid([&](double th) { return std::cos(th * static_cast<double>(tau)); }, 0.0,
                     half_bandwidth, intervals) /
           M_PI;
}

/// Closed-form band-limited covariance sin(W tau) / (pi tau).
inline double bandlimited_covariance_closed(double half_bandwidth, long tau) {
    if (tau == 0) return half_bandwidth / M_PI;
    const double t = static_cast<double>(tau);
    return std::sin(half_bandwidth * t) / (M_PI * t);
}

/// Truncated Fourier sum by direct evaluation, cosine form.
inline double direct_partial_sum(const std::vector<double>& cov, double theta) {
    double acc = cov[0];
    for (std::size_t tau = 1; tau < cov.size(); ++tau)
        acc += 2.0 * cov[tau] * std::cos(theta * static_cast<double>(tau));
    return acc;
}

inline double ar1_density(double rho, double theta) {
    return (1.0 - rho * rho) / (1.0 - 2.0 * rho * std::cos(theta) + rho * rho);
}

/// Plain triple-loop quadratic form a^T T a on a dense matrix.
inline double dense_quadratic_form(const toepca::Matrix& t, const std::vector<double>& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) acc += a[i] * t(i, j) * a[j];
    return acc;
}

/// Element-wise Frobenius distance, no library calls.
inline double elementwise_frobenius(const toepca::Matrix& a, const toepca::Matrix& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            acc += d * d;
        }
    return std::sqrt(acc);
}

/// Random n x n orthogonal matrix via Gram-Schmidt on Gaussian columns.
inline toepca::Matrix random_orthogonal(std::size_t n, std::uint64_t seed,
                                        std::uint64_t stream) {
    toepca::NormalStream gen(seed, stream);
    toepca::Matrix q(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> v(n);
        for (auto& x : v) x = gen.next();
        for (std::size_t prev = 0; prev < col; ++prev) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += v[i] * q(i, prev);
            for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, prev);
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) q(i, col) = v[i] / nrm;
    }
    return q;
}

/// Random rank-n map from Gaussian factors, the competitor family used in
/// optimality tests.
inline toepca::Matrix random_rank_n(std::size_t dim, std::size_t rank, std::uint64_t seed,
                                    std::uint64_t stream) {
    toepca::NormalStream gen(seed, stream);
    toepca::Matrix x(dim, rank), y(rank, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < rank; ++k) x(i, k) = gen.next();
    for (std::size_t k = 0; k < rank; ++k)
        for (std::size_t j = 0; j < dim; ++j) y(k, j) = gen.next();
    return x * y;
}

// Frozen reference values, computed from the definitions above at high
// precision before the implementation existed.

// band-limited W = pi/4: sigma(tau) for tau = 0..8
inline constexpr double kBandlimitedQuarter[9] = {
    0.25,
    0.22507907903927651739,
    0.15915494309189533577,
    0.07502635967975883913,
    0.0,
    -0.045015815807855303478,
    -0.053051647697298445256,
    -0.032154154148468073913,
    0.0,
};

// truncated Fourier sum of sigma(tau) = cos(2 pi tau / 8), tau_max = 16,
// at theta in {0, 0.5, pi/4, 1.5, 3.0}
inline constexpr double kDirichletTheta[5] = {0.0, 0.5, 0.78539816339744830962, 1.5, 3.0};
inline constexpr double kDirichletValue[5] = {
    1.0,
    -2.9278519215761037954,
    17.0,
    -0.99529468397569307732,
    -0.70402752262593311605,
};

}  // namespace oracle
