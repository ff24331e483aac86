#pragma once

// Stationary extension of a rank-n window approximation. The weighted
// principal basis B = Un diag(sqrt(lambda)) lists the approximated process
// over the window, one time step per row; propagating rows by one step is a
// linear map, recovered in least squares and then projected onto the nearest
// orthogonal matrix. The result is a state-space model
//
//     state(t+1) = A state(t),   output(t) = c state(t),   E state state^T = I
//
// whose covariance c A^tau c^T extends the window to every lag and whose
// spectrum is a finite set of lines read off the rotation angles of A.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/pca.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca {

struct StateSpaceRealization {
    std::size_t state_dim = 0;       // n
    Matrix dynamics;                 // A, n x n orthogonal
    Vector readout;                  // c, row of length n
    Matrix state_covariance;         // P = I in this basis
    std::size_t basis_window = 0;    // N used to build the model

    double orthogonality_residual = 0.0;  // ||A^T A - I||_F
    double observability_sv = 0.0;        // smallest singular value of [c; cA; ...]
    double stationarity_residual = 0.0;   // ||A P A^T - P||_F
    double shift_residual = 0.0;          // ||B0 A - B1||_F / ||B||_F, model defect
};

struct LineSpectrum {
    std::vector<SpectralLine> lines;  // theta ascending in [0, pi]

    double total_power() const {
        double acc = 0.0;
        for (const auto& l : lines) acc += l.power;
        return acc;
    }
};

namespace detail {

/// Singular values of an arbitrary rectangular matrix via the Gram spectrum.
inline std::vector<double> singular_values(const Matrix& b) {
    const Matrix gram = transpose(b) * b;
    EigOptions opt;
    opt.require_psd = true;
    opt.clamp_negatives = true;
    const auto spec = eigendecompose(gram, opt);
    std::vector<double> sv(spec.eigenvalues.size());
    for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::sqrt(spec.eigenvalues[i]);
    return sv;
}

}  // namespace detail

/// Build the stationary state-space extension of a rank-n approximation.
///
/// Throws DegenerateBasisError when the window rows do not span n independent
/// directions (the shift system is rank-deficient), and ConditioningError
/// when the least-squares shift map is too close to singular for the
/// orthogonal projection to be trusted.
inline StateSpaceRealization stationary_extension(const RankNApproximation& approx) {
    const std::size_t big_n = approx.dim();
    const std::size_t n = approx.rank;
    if (big_n < n + 1)
        throw ValidationError("stationary_extension: window must exceed the rank by one row");

    // weighted principal basis, one window time step per row
    Matrix basis(big_n, n);
    for (std::size_t i = 0; i < big_n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            basis(i, k) = approx.principal_vectors(i, k) * std::sqrt(approx.kept_eigenvalues[k]);

    Matrix rows_head(big_n - 1, n);  // window rows 0 .. N-2
    Matrix rows_tail(big_n - 1, n);  // window rows 1 .. N-1
    for (std::size_t i = 0; i + 1 < big_n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            rows_head(i, k) = basis(i, k);
            rows_tail(i, k) = basis(i + 1, k);
        }

    // least-squares shift: rows_head * shift = rows_tail via the Gram system
    const Matrix gram = transpose(rows_head) * rows_head;
    EigOptions gram_opt;
    gram_opt.require_psd = true;
    const auto gram_spec = eigendecompose(gram, gram_opt);
    const double gram_lead = gram_spec.eigenvalues.front();
    // weighted directions at sqrt(round-off) scale are artifacts of the
    // eigensolve, not oscillations the window supports
    if (!(gram_lead > 0.0) ||
        gram_spec.eigenvalues.back() <= 1e-14 * gram_lead)
        throw DegenerateBasisError(
            "stationary_extension: window rows span fewer than " + std::to_string(n) +
            " directions; the window cannot support that many independent oscillations");

    Matrix gram_inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += gram_spec.eigenvectors(i, k) * gram_spec.eigenvectors(j, k) /
                       gram_spec.eigenvalues[k];
            gram_inv(i, j) = acc;
        }
    const Matrix shift = gram_inv * (transpose(rows_head) * rows_tail);

    // polar factor: nearest orthogonal matrix to the shift map
    const Matrix h = transpose(shift) * shift;
    EigOptions polar_opt;
    polar_opt.require_psd = true;
    const auto h_spec = eigendecompose(h, polar_opt);
    for (double l : h_spec.eigenvalues)
        if (std::sqrt(std::max(l, 0.0)) < 1e-12)
            throw ConditioningError(
                "stationary_extension: shift map nearly singular, orthogonal projection "
                "unreliable");
    Matrix h_invsqrt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += h_spec.eigenvectors(i, k) * h_spec.eigenvectors(j, k) /
                       std::sqrt(h_spec.eigenvalues[k]);
            h_invsqrt(i, j) = acc;
        }

    StateSpaceRealization model;
    model.state_dim = n;
    model.basis_window = big_n;
    model.dynamics = shift * h_invsqrt;
    model.readout.resize(n);
    for (std::size_t k = 0; k < n; ++k) model.readout[k] = basis(0, k);
    model.state_covariance = Matrix::identity(n);

    const Matrix& a = model.dynamics;
    model.orthogonality_residual = frobenius_distance(transpose(a) * a, Matrix::identity(n));
    model.stationarity_residual =
        frobenius_distance(a * model.state_covariance * transpose(a), model.state_covariance);
    model.shift_residual =
        frobenius_distance(rows_head * a, rows_tail) / std::max(frobenius_norm(basis), 1e-300);

    Matrix observability(n, n);
    Vector row = model.readout;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) observability(r, k) = row[k];
        row = transposed_times(a, row);  // row <- row A
    }
    const auto sv = detail::singular_values(observability);
    model.observability_sv = sv.back();
    return model;
}

/// Covariance of the extended process at any lag: c A^|tau| c^T.
inline double extend_covariance(const StateSpaceRealization& model, long tau) {
    std::size_t steps = static_cast<std::size_t>(tau < 0 ? -tau : tau);
    Vector row = model.readout;
    for (std::size_t s = 0; s < steps; ++s) row = transposed_times(model.dynamics, row);
    // P = identity, so the form collapses to a plain dot product
    return dot(row, model.readout);
}

/// Dirac line spectrum of the realized process.
///
/// The symmetric part (A + A^T)/2 of an orthogonal A has eigenvalue
/// cos(theta) on each rotation-by-theta invariant plane (doubled) and +/-1 on
/// fixed axes, so its spectrum delivers the frequencies directly; the power
/// of a line is the squared projection of the readout on the corresponding
/// invariant subspace. Powers sum to the lag-zero covariance.
inline LineSpectrum line_spectrum(const StateSpaceRealization& model) {
    const std::size_t n = model.state_dim;
    Matrix sym(n, n);
    const Matrix& a = model.dynamics;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));

    EigOptions opt;
    opt.require_psd = false;
    opt.clamp_negatives = false;
    const auto spec = eigendecompose(sym, opt);

    struct Cluster {
        double cosine;
        double power;
    };
    std::vector<Cluster> clusters;
    const double resolution = 1e-8;
    for (std::size_t k = 0; k < n; ++k) {
        const double mu = std::clamp(spec.eigenvalues[k], -1.0, 1.0);
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += model.readout[i] * spec.eigenvectors(i, k);
        const double p = proj * proj;
        // acos is 1-Lipschitz-equivalent away from the ends; cluster on the
        // angle, not the cosine, so closely spaced slow lines stay separate
        const double theta = std::acos(mu);
        bool merged = false;
        for (auto& c : clusters) {
            if (std::abs(std::acos(std::clamp(c.cosine, -1.0, 1.0)) - theta) < resolution) {
                c.power += p;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({mu, p});
    }

    LineSpectrum result;
    for (const auto& c : clusters)
        result.lines.push_back({std::acos(std::clamp(c.cosine, -1.0, 1.0)), c.power});
    std::sort(result.lines.begin(), result.lines.end(),
              [](const SpectralLine& x, const SpectralLine& y) { return x.theta < y.theta; });
    return result;
}

}  // namespace toepca
