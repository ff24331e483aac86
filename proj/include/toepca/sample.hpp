#pragma once

// Monte Carlo layer: Gaussian window samples drawn through the spectral
// square root U diag(sqrt(lambda)), plus the sample-based estimates used to
// validate the analytic approximation errors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/rng.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca {

struct PathBatch {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string generator_id;
    std::vector<double> paths;  // count x dim, row-major

    double operator()(std::size_t path, std::size_t t) const { return paths[path * dim + t]; }

    const double* path(std::size_t p) const { return paths.data() + p * dim; }
};

/// Draw `count` window samples y = U sqrt(Lambda) g with independent standard
/// normal g. Path p consumes only stream p of the generator, so any prefix of
/// a larger batch is bit-identical to the smaller batch with the same seed.
inline PathBatch sample_paths(const SpectrumResult& s, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("sample_paths: count must be >= 1");
    const std::size_t n = s.source_dim;
    // eigenvalues at solver round-off scale are noise, and their square roots
    // would inject sqrt(eps)-sized artifacts into the paths; drop them
    const double floor = 1e-14 * std::max(s.eigenvalues.front(), 1.0);
    Matrix root(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            root(i, k) = s.eigenvalues[k] > floor
                             ? s.eigenvectors(i, k) * std::sqrt(s.eigenvalues[k])
                             : 0.0;

    PathBatch batch;
    batch.dim = n;
    batch.count = count;
    batch.seed = seed;
    batch.generator_id = kGeneratorId;
    batch.paths.assign(count * n, 0.0);

    Vector g(n);
    for (std::size_t p = 0; p < count; ++p) {
        NormalStream stream(seed, p);
        for (std::size_t i = 0; i < n; ++i) g[i] = stream.next();
        double* out = batch.paths.data() + p * n;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += root(i, k) * g[k];
            out[i] = acc;
        }
    }
    return batch;
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Sample mean and standard error of (psi^T (y - M y))^2 over the batch.
inline McEstimate mc_weak_error(const PathBatch& batch, const Matrix& m, const TestFunction& psi) {
    psi.validate();
    if (m.rows() != batch.dim || m.cols() != batch.dim ||
        psi.coefficients.size() != batch.dim)
        throw DimensionError("mc_weak_error: dimensions disagree");
    const std::size_t n = batch.dim;

    // w = (I - M)^T psi, so each path costs one dot product
    Vector w = psi.coefficients;
    const Vector mt_psi = transposed_times(m, psi.coefficients);
    for (std::size_t i = 0; i < n; ++i) w[i] -= mt_psi[i];

    std::vector<double> squares(batch.count);
    CompensatedSum mean_acc;
    for (std::size_t p = 0; p < batch.count; ++p) {
        const double* y = batch.path(p);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += w[i] * y[i];
        squares[p] = d * d;
        mean_acc.add(squares[p]);
    }
    McEstimate est;
    est.count = batch.count;
    est.estimate = mean_acc.value() / static_cast<double>(batch.count);
    CompensatedSum var_acc;
    for (double s : squares) {
        const double d = s - est.estimate;
        var_acc.add(d * d);
    }
    if (batch.count > 1)
        est.std_error = std::sqrt(var_acc.value() /
                                  (static_cast<double>(batch.count - 1) *
                                   static_cast<double>(batch.count)));
    return est;
}

/// Max-abs entry of the sample estimate of E[(y - My)(My)^T]; vanishes at the
/// Monte Carlo rate when M is the optimal projector.
inline double mc_orthogonality(const PathBatch& batch, const Matrix& m) {
    if (m.rows() != batch.dim || m.cols() != batch.dim)
        throw DimensionError("mc_orthogonality: dimensions disagree");
    const std::size_t n = batch.dim;
    Matrix acc(n, n);
    Vector my(n), res(n);
    for (std::size_t p = 0; p < batch.count; ++p) {
        const double* y = batch.path(p);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += m(i, j) * y[j];
            my[i] = v;
            res[i] = y[i] - v;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) acc(i, j) += res[i] * my[j];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(acc(i, j) / static_cast<double>(batch.count)));
    return worst;
}

}  // namespace toepca
