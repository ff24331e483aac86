#pragma once

// Dense symmetric eigensolver and spectral bookkeeping.
//
// The solver is a cyclic Jacobi sweep with a fixed row-major pivot order, a
// fixed rotation threshold, and a fixed eigenvector sign convention, so the
// decomposition of a given matrix is identical across runs and platforms
// with IEEE doubles. Eigenvalue tracking across growing window lengths and
// threshold-based effective rank live here too.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca {

struct JacobiOptions {
    /// Rotations are applied while |a_pq| exceeds threshold_scale * ||T||_F.
    double threshold_scale = 1e-14;
    int max_sweeps = 64;
};

struct EigOptions {
    bool require_psd = true;        // reject spectra below -psd_tolerance * max(lambda_1, 1)
    bool clamp_negatives = true;    // zero out negative round-off eigenvalues afterwards
    double psd_tolerance = 1e-10;
    double symmetry_tolerance = 1e-12;
    JacobiOptions jacobi;
};

struct SpectrumResult {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // orthonormal columns, one per eigenvalue
    std::size_t source_dim = 0;
    double orthonormality_residual = 0.0;  // max |U^T U - I|
    double reconstruction_residual = 0.0;  // ||T - U diag(lambda) U^T||_F

    const Vector eigenvector(std::size_t k) const {
        Vector v(source_dim);
        for (std::size_t i = 0; i < source_dim; ++i) v[i] = eigenvectors(i, k);
        return v;
    }
};

namespace detail {

/// One full cyclic Jacobi pass; returns the number of rotations applied.
inline std::size_t jacobi_sweep(Matrix& a, Matrix& v, double threshold) {
    const std::size_t n = a.rows();
    std::size_t rotations = 0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (std::abs(apq) <= threshold) continue;
            ++rotations;
            const double app = a(p, p);
            const double aqq = a(q, q);
            const double theta = 0.5 * (aqq - app) / apq;
            // stable tangent of the annihilating rotation
            double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            const double tau = s / (1.0 + c);
            const double h = t * apq;

            a(p, p) = app - h;
            a(q, q) = aqq + h;
            a(p, q) = 0.0;
            a(q, p) = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == p || i == q) continue;
                const double aip = a(i, p);
                const double aiq = a(i, q);
                a(i, p) = aip - s * (aiq + tau * aip);
                a(i, q) = aiq + s * (aip - tau * aiq);
                a(p, i) = a(i, p);
                a(q, i) = a(i, q);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double vip = v(i, p);
                const double viq = v(i, q);
                v(i, p) = vip - s * (viq + tau * vip);
                v(i, q) = viq + s * (vip - tau * viq);
            }
        }
    }
    return rotations;
}

inline double offdiagonal_norm(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
}

}  // namespace detail

/// Full spectral decomposition of a dense symmetric matrix.
///
/// Output contract: eigenvalues descending (stable order within round-off
/// ties), each eigenvector scaled so its largest-magnitude entry is positive
/// (first such entry wins on exact magnitude ties), residuals recorded and
/// enforced. With require_psd the spectrum must sit above
/// -psd_tolerance * max(lambda_1, 1); negative round-off values are then
/// clamped to zero.
inline SpectrumResult eigendecompose(const Matrix& t, const EigOptions& opt = {}) {
    if (t.rows() != t.cols() || t.rows() == 0)
        throw ValidationError("eigendecompose: square nonempty input required");
    const std::size_t n = t.rows();
    const double scale = std::max(1.0, max_abs(t));
    if (symmetry_residual(t) > opt.symmetry_tolerance * scale)
        throw ValidationError("eigendecompose: input is not symmetric");

    Matrix a = t;
    Matrix v = Matrix::identity(n);
    const double threshold = opt.jacobi.threshold_scale * frobenius_norm(t);

    bool converged = false;
    for (int sweep = 0; sweep < opt.jacobi.max_sweeps; ++sweep) {
        if (detail::jacobi_sweep(a, v, threshold) == 0) {
            converged = true;
            break;
        }
    }
    if (!converged && detail::offdiagonal_norm(a) > threshold * static_cast<double>(n))
        throw AccuracyError("eigendecompose: Jacobi did not converge, off-diagonal norm " +
                                std::to_string(detail::offdiagonal_norm(a)),
                            detail::offdiagonal_norm(a));

    // descending order, original diagonal position breaks exact ties
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SpectrumResult res;
    res.source_dim = n;
    res.eigenvalues.resize(n);
    res.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        res.eigenvalues[k] = a(src, src);
        std::size_t lead = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(v(i, src));
            if (m > best) {
                best = m;
                lead = i;
            }
        }
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = sign * v(i, src);
    }

    // certificates
    {
        const Matrix& u = res.eigenvectors;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t r = 0; r < n; ++r) acc += u(r, i) * u(r, j);
                worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
            }
        res.orthonormality_residual = worst;

        double frob = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    acc += u(i, k) * res.eigenvalues[k] * u(j, k);
                const double d = t(i, j) - acc;
                frob += d * d;
            }
        res.reconstruction_residual = std::sqrt(frob);
    }
    const double lead = std::max(res.eigenvalues.empty() ? 0.0 : res.eigenvalues.front(), 1.0);
    if (res.orthonormality_residual > 1e-10)
        throw AccuracyError("eigendecompose: eigenvector basis lost orthonormality",
                            res.orthonormality_residual);
    if (res.reconstruction_residual > 1e-9 * lead)
        throw AccuracyError("eigendecompose: reconstruction residual too large",
                            res.reconstruction_residual);

    if (opt.require_psd) {
        const double floor = -opt.psd_tolerance * lead;
        for (double l : res.eigenvalues)
            if (l < floor)
                throw ValidationError("eigendecompose: input not positive semidefinite "
                                      "(eigenvalue " + std::to_string(l) + ")");
    }
    if (opt.clamp_negatives)
        for (double& l : res.eigenvalues)
            if (l < 0.0) l = 0.0;
    return res;
}

struct WeylTrack {
    std::size_t k = 0;                 // eigenvalue index, 1-based
    std::vector<std::size_t> dims;     // increasing window lengths
    std::vector<double> values;        // lambda_{N,k} per window
    double limit_estimate = 0.0;       // value at the largest window
    bool monotone = true;              // nondecreasing within round-off
    double max_violation = 0.0;
};

/// lambda_{N,k} across increasing windows N. The k-th eigenvalue never
/// decreases as the window grows; the track records the largest observed
/// violation so callers can assert it is round-off sized.
inline WeylTrack weyl_track(const CovarianceSequence& cov, const std::vector<std::size_t>& dims,
                            std::size_t k) {
    if (k < 1) throw ValidationError("weyl_track: eigenvalue index is 1-based");
    if (dims.empty()) throw ValidationError("weyl_track: no window lengths");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        if (!(dims[i] < dims[i + 1]))
            throw ValidationError("weyl_track: window lengths must increase strictly");
    if (k > dims.front())
        throw ValidationError("weyl_track: index " + std::to_string(k) +
                              " out of range for smallest window " + std::to_string(dims.front()));
    if (dims.back() > cov.tau_max() + 1)
        throw ValidationError("weyl_track: largest window exceeds stored covariance lags");

    WeylTrack track;
    track.k = k;
    track.dims = dims;
    for (std::size_t n : dims) {
        const auto spec = eigendecompose(truncate(cov, n).dense());
        track.values.push_back(spec.eigenvalues[k - 1]);
    }
    track.limit_estimate = track.values.back();
    for (std::size_t i = 0; i + 1 < track.values.size(); ++i) {
        const double tol = 1e-10 * std::max(track.values[i + 1], 1.0);
        const double drop = track.values[i] - track.values[i + 1];
        if (drop > tol) {
            track.monotone = false;
            track.max_violation = std::max(track.max_violation, drop);
        }
    }
    return track;
}

/// Number of eigenvalues above rel_threshold * lambda_1.
inline std::size_t effective_rank(const SpectrumResult& s, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
        throw ValidationError("effective_rank: threshold must lie in (0, 1)");
    if (s.eigenvalues.empty()) return 0;
    const double cut = rel_threshold * s.eigenvalues.front();
    std::size_t count = 0;
    for (double l : s.eigenvalues)
        if (l > cut) ++count;
    return count;
}

}  // namespace toepca
