#pragma once

// Symmetric Toeplitz truncations of a covariance sequence, quadratic forms
// against them, and Frobenius geometry. Rank-reduced covariances are not
// Toeplitz in general, so the dense overloads accept arbitrary symmetric
// matrices.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/linalg.hpp"

namespace toepca {

struct ToeplitzTruncation {
    std::size_t dim = 0;            // window length N
    std::vector<double> first_row;  // sigma(0 .. N-1)

    /// Materialize the dense symmetric matrix; built on demand, never cached.
    Matrix dense() const {
        Matrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                m(i, j) = first_row[i > j ? i - j : j - i];
        return m;
    }
};

/// Finitely supported test sequence; the window position is bookkeeping
/// only, quadratic forms against a stationary covariance do not depend on it.
struct TestFunction {
    long support_offset = 0;
    Vector coefficients;
    std::string id;   // optional label for reports

    void validate() const {
        bool nonzero = false;
        for (double c : coefficients) {
            if (!std::isfinite(c)) throw ValidationError("test function: non-finite coefficient");
            if (c != 0.0) nonzero = true;
        }
        if (coefficients.empty() || !nonzero)
            throw ValidationError("test function: needs at least one nonzero coefficient");
    }
};

inline ToeplitzTruncation truncate(const CovarianceSequence& cov, std::size_t n) {
    cov.validate();
    if (n < 1) throw ValidationError("truncate: window length must be >= 1");
    if (cov.tau_max() + 1 < n)
        throw ValidationError("truncate: window " + std::to_string(n) +
                              " requires covariance lags up to tau_max = " + std::to_string(n - 1) +
                              ", have " + std::to_string(cov.tau_max()));
    ToeplitzTruncation t;
    t.dim = n;
    t.first_row.assign(cov.values.begin(), cov.values.begin() + static_cast<long>(n));
    return t;
}

/// a^T T a via banded accumulation: sum_tau sigma(tau) * (lag-tau autocorrelation
/// of a), so the dense matrix is never formed.
inline double quadratic_form(const ToeplitzTruncation& t, const TestFunction& psi) {
    psi.validate();
    const std::size_t n = t.dim;
    if (psi.coefficients.size() != n)
        throw DimensionError("quadratic_form: test function length " +
                             std::to_string(psi.coefficients.size()) + " vs window " +
                             std::to_string(n));
    const Vector& a = psi.coefficients;
    CompensatedSum acc;
    double r0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r0 += a[i] * a[i];
    acc.add(t.first_row[0] * r0);
    for (std::size_t tau = 1; tau < n; ++tau) {
        double r = 0.0;
        for (std::size_t i = 0; i + tau < n; ++i) r += a[i] * a[i + tau];
        acc.add(2.0 * t.first_row[tau] * r);
    }
    return acc.value();
}

/// a^T A a for a dense symmetric matrix.
inline double quadratic_form(const Matrix& a, const TestFunction& psi) {
    psi.validate();
    if (a.rows() != a.cols() || psi.coefficients.size() != a.rows())
        throw DimensionError("quadratic_form: dimensions disagree");
    return dot(psi.coefficients, a * psi.coefficients);
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    detail::require_same_shape(a, b, "frobenius_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            acc += d * d;
        }
    return std::sqrt(acc);
}

/// Diagonal averaging: the nearest Toeplitz matrix in Frobenius norm.
inline Matrix toeplitzification(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("toeplitzification: square input required");
    const std::size_t n = a.rows();
    std::vector<double> diag_mean(n, 0.0);
    for (std::size_t d = 0; d < n; ++d) {
        double acc = 0.0;
        for (std::size_t i = 0; i + d < n; ++i) acc += 0.5 * (a(i, i + d) + a(i + d, i));
        diag_mean[d] = acc / static_cast<double>(n - d);
    }
    Matrix t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            t(i, j) = diag_mean[i > j ? i - j : j - i];
    return t;
}

/// || A - toeplitzification(A) ||_F / ||A||_F; 0 for exactly Toeplitz input.
inline double toeplitz_defect(const Matrix& a) {
    const double nrm = frobenius_norm(a);
    if (nrm == 0.0) return 0.0;
    return frobenius_distance(a, toeplitzification(a)) / nrm;
}

}  // namespace toepca
