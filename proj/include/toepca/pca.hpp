#pragma once

// Optimal rank-n linear approximation of a window of the process: keep the
// principal eigenvectors, project onto their span. The projector M = Un Un^T
// is the unique optimizer up to rotations inside the kept subspace, which
// leave both M and the reduced covariance unchanged; the identity rotation
// is used throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/spectrum.hpp"

namespace toepca {

struct RankNApproximation {
    std::size_t rank = 0;              // n
    Matrix projector;                  // M = Un Un^T, orthogonal projection
    Matrix principal_vectors;          // Un, N x n
    std::vector<double> kept_eigenvalues;
    Matrix reduced_covariance;         // Un diag(lambda_1..n) Un^T
    double error = 0.0;                // sum of discarded eigenvalues
    bool degenerate_cut = false;       // lambda_n == lambda_{n+1} within round-off

    std::size_t dim() const { return projector.rows(); }
};

/// Best rank-n approximator of the window covariance whose spectrum is `s`.
/// The approximation error is the tail eigenvalue sum, summed in ascending
/// index order.
inline RankNApproximation optimal_approximator(const SpectrumResult& s, std::size_t n) {
    const std::size_t dim = s.source_dim;
    if (n < 1 || n > dim)
        throw ValidationError("optimal_approximator: rank " + std::to_string(n) +
                              " out of range [1, " + std::to_string(dim) + "]");

    RankNApproximation approx;
    approx.rank = n;
    approx.principal_vectors = Matrix(dim, n);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < n; ++k)
            approx.principal_vectors(i, k) = s.eigenvectors(i, k);
    approx.kept_eigenvalues.assign(s.eigenvalues.begin(),
                                   s.eigenvalues.begin() + static_cast<long>(n));

    approx.projector = Matrix(dim, dim);
    approx.reduced_covariance = Matrix(dim, dim);
    const Matrix& u = approx.principal_vectors;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double proj = 0.0;
            double red = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double p = u(i, k) * u(j, k);
                proj += p;
                red += s.eigenvalues[k] * p;
            }
            approx.projector(i, j) = proj;
            approx.reduced_covariance(i, j) = red;
        }

    double tail = 0.0;
    for (std::size_t k = n; k < dim; ++k) tail += s.eigenvalues[k];
    approx.error = tail;

    if (n < dim) {
        const double lead = std::max(s.eigenvalues.front(), 1.0);
        approx.degenerate_cut = (s.eigenvalues[n - 1] - s.eigenvalues[n]) <= 1e-10 * lead;
    }
    return approx;
}

/// Rank actually carried by the leading n modes: trailing eigenvalues at
/// round-off scale contribute nothing to the reduced covariance (and cannot
/// support state-space directions downstream).
inline std::size_t carried_rank(const SpectrumResult& s, std::size_t n) {
    const double floor = 1e-12 * std::max(s.eigenvalues.front(), 1.0);
    std::size_t r = 0;
    while (r < n && r < s.source_dim && s.eigenvalues[r] > floor) ++r;
    return std::max<std::size_t>(r, 1);
}

/// Mean squared approximation error tr((I-M) T (I-M)^T) of an arbitrary
/// candidate map M against covariance T.
inline double approximation_error_of(const Matrix& t, const Matrix& m) {
    if (t.rows() != t.cols() || m.rows() != m.cols() || t.rows() != m.rows())
        throw DimensionError("approximation_error_of: dimensions disagree");
    const std::size_t n = t.rows();
    Matrix r = Matrix::identity(n) - m;
    const Matrix rt = r * t;
    // tr(R T R^T) = sum_ij (R T)_ij R_ij
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += rt(i, j) * r(i, j);
    return acc;
}

/// Numerical certificates that the stored map is the orthogonal projection
/// it is supposed to be: symmetry, idempotency, the uncorrelatedness of the
/// approximation with its error against the source covariance, and trace as
/// a rank witness.
struct ProjectionCertificate {
    double symmetry_residual = 0.0;      // ||M - M^T||_F
    double idempotency_residual = 0.0;   // ||M - M^2||_F
    double orthogonality_residual = 0.0; // ||M S - M S M^T||_F
    double trace = 0.0;                  // tr(M), ~ rank
};

inline ProjectionCertificate projection_certificate(const RankNApproximation& approx,
                                                    const SpectrumResult& s) {
    if (approx.dim() != s.source_dim)
        throw DimensionError("projection_certificate: window sizes disagree");
    const std::size_t dim = s.source_dim;
    Matrix sigma(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k)
                acc += s.eigenvectors(i, k) * s.eigenvalues[k] * s.eigenvectors(j, k);
            sigma(i, j) = acc;
        }

    const Matrix& m = approx.projector;
    ProjectionCertificate cert;
    cert.symmetry_residual = frobenius_distance(m, transpose(m));
    cert.idempotency_residual = frobenius_distance(m, m * m);
    const Matrix ms = m * sigma;
    cert.orthogonality_residual = frobenius_distance(ms, ms * transpose(m));
    cert.trace = trace(m);
    return cert;
}

}  // namespace toepca
