#pragma once

// Weak-convergence harness: quadratic-form gaps psi^T (Sigma - Sigma_hat) psi
// between a window covariance and its rank-n reduction, their decay as the
// rank grows, and the matching frequency-domain forms evaluated against the
// spectral symbol and against the realized line spectrum.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/pca.hpp"
#include "toepca/quadrature.hpp"
#include "toepca/realize.hpp"
#include "toepca/rng.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca {

/// |psi_hat(e^{i omega})|^2 for psi_hat(e^{i omega}) = sum_k psi(k) e^{i omega k}.
/// The support offset only rotates the phase and drops out of the modulus.
inline double test_transform_power(const TestFunction& psi, double omega) {
    CompensatedSum re, im;
    for (std::size_t k = 0; k < psi.coefficients.size(); ++k) {
        re.add(psi.coefficients[k] * std::cos(omega * static_cast<double>(k)));
        im.add(psi.coefficients[k] * std::sin(omega * static_cast<double>(k)));
    }
    return re.value() * re.value() + im.value() * im.value();
}

/// psi^T (Sigma - Sigma_hat^n) psi from a precomputed spectrum. Both the
/// direct difference of quadratic forms and the equivalent residual-projection
/// form are evaluated and must agree; their mean discrepancy is round-off.
inline double weak_gap(const SpectrumResult& s, const Matrix& sigma, std::size_t n,
                       const TestFunction& psi) {
    psi.validate();
    if (psi.coefficients.size() != s.source_dim || sigma.rows() != s.source_dim)
        throw DimensionError("weak_gap: dimensions disagree");
    if (n < 1 || n > s.source_dim)
        throw ValidationError("weak_gap: rank out of range");

    const auto approx = optimal_approximator(s, n);
    const double qf_full = quadratic_form(sigma, psi);
    const double qf_reduced = quadratic_form(approx.reduced_covariance, psi);
    const double direct = qf_full - qf_reduced;

    // same number through the complementary projection: w = (I - M)^T psi,
    // gap = w^T Sigma w
    Vector w = psi.coefficients;
    const Vector mp = transposed_times(approx.projector, psi.coefficients);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= mp[i];
    double via_projection = 0.0;
    {
        const Vector sw = sigma * w;
        via_projection = dot(w, sw);
    }
    const double scale = std::max(std::abs(qf_full), 1.0);
    if (std::abs(direct - via_projection) > 1e-9 * scale)
        throw AccuracyError("weak_gap: quadratic-form routes disagree",
                            std::abs(direct - via_projection));
    return direct;
}

inline double weak_gap(const CovarianceSequence& cov, std::size_t window, std::size_t n,
                       const TestFunction& psi) {
    const Matrix sigma = truncate(cov, window).dense();
    return weak_gap(eigendecompose(sigma), sigma, n, psi);
}

struct ConvergenceCurve {
    std::size_t dim = 0;
    TestFunction psi;
    std::vector<std::pair<std::size_t, double>> entries;  // (n, gap), n = 1..N
    double reference_qf = 0.0;                            // psi^T Sigma psi
};

/// Full gap curve for n = 1..N from a single decomposition. In the eigenbasis
/// the gap at rank n is the tail sum over k > n of lambda_k (u_k^T psi)^2,
/// which is nonnegative, nonincreasing and exactly zero at n = N; those
/// properties are re-checked numerically before returning.
inline ConvergenceCurve convergence_sweep(const SpectrumResult& s, const TestFunction& psi) {
    psi.validate();
    if (psi.coefficients.size() != s.source_dim)
        throw DimensionError("convergence_sweep: test function length mismatch");
    const std::size_t dim = s.source_dim;

    std::vector<double> weighted(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < dim; ++i) c += s.eigenvectors(i, k) * psi.coefficients[i];
        weighted[k] = s.eigenvalues[k] * c * c;
    }

    ConvergenceCurve curve;
    curve.dim = dim;
    curve.psi = psi;
    std::vector<double> tail(dim + 1, 0.0);
    for (std::size_t k = dim; k-- > 0;) tail[k] = tail[k + 1] + weighted[k];
    curve.reference_qf = tail[0];
    for (std::size_t n = 1; n <= dim; ++n) curve.entries.emplace_back(n, tail[n]);

    const double tol = 1e-9 * std::max(curve.reference_qf, 1.0);
    for (std::size_t i = 0; i < curve.entries.size(); ++i) {
        const double gap = curve.entries[i].second;
        if (gap < -tol)
            throw AccuracyError("convergence_sweep: negative gap", gap);
        if (i > 0 && gap > curve.entries[i - 1].second + tol)
            throw AccuracyError("convergence_sweep: gap increased with rank",
                                gap - curve.entries[i - 1].second);
    }
    if (curve.entries.back().second > tol)
        throw AccuracyError("convergence_sweep: gap at full rank did not vanish",
                            curve.entries.back().second);
    return curve;
}

inline ConvergenceCurve convergence_sweep(const CovarianceSequence& cov, std::size_t window,
                                          const TestFunction& psi) {
    return convergence_sweep(eigendecompose(truncate(cov, window).dense()), psi);
}

/// Frequency-domain quadratic form against a density symbol:
/// (1/2pi) integral of |psi_hat|^2 phi over [-pi, pi], reduced to [0, pi] by
/// evenness. Panels align with the symbol's discontinuities.
inline double spectral_quadratic_form(const Symbol& symbol, const TestFunction& psi,
                                      const QuadratureSpec& quad = {}) {
    psi.validate();
    symbol.validate();
    quad.validate();
    if (symbol.is_line_spectral()) {
        CompensatedSum acc;
        for (const auto& l : symbol.lines)
            acc.add(symbol.scale * l.power * test_transform_power(psi, l.theta));
        return acc.value();
    }
    const auto rule = gauss_legendre(quad.points_per_panel);
    const auto breaks = symbol.smooth_breakpoints();
    const double value = integrate_piecewise(
                             [&](double th) {
                                 return symbol.density(th) * test_transform_power(psi, th);
                             },
                             breaks, quad.panels, rule) /
                         M_PI;
    const double refined = integrate_piecewise(
                               [&](double th) {
                                   return symbol.density(th) * test_transform_power(psi, th);
                               },
                               breaks, 2 * quad.panels, rule) /
                           M_PI;
    const double residual = std::abs(refined - value);
    if (residual > quad.tolerance * std::max(1.0, std::abs(refined)))
        throw AccuracyError("spectral_quadratic_form: quadrature did not settle", residual);
    return refined;
}

/// Frequency-domain quadratic form against a discrete line spectrum:
/// sum_k p_k |psi_hat(e^{i theta_k})|^2, the exact finite counterpart of the
/// density integral.
inline double spectral_quadratic_form(const LineSpectrum& lines, const TestFunction& psi) {
    psi.validate();
    CompensatedSum acc;
    for (const auto& l : lines.lines) acc.add(l.power * test_transform_power(psi, l.theta));
    return acc.value();
}

/// Side-by-side weak-convergence report for one (window, rank, test function)
/// configuration: the four quadratic forms (time/frequency, full/reduced),
/// the two time-vs-frequency residuals, the weak gap, and the distance of the
/// reduced covariance from stationarity. The reduced-side frequency form uses
/// the realized line spectrum, so its residual also carries that defect.
struct WconvReport {
    double sigma_qf_time = 0.0;
    double sigma_qf_freq = 0.0;
    double sigmahat_qf_time = 0.0;
    double sigmahat_qf_freq = 0.0;
    double weak_gap = 0.0;
    double parseval_residual_sigma = 0.0;     // relative
    double parseval_residual_sigmahat = 0.0;  // relative, includes the defect
    double toeplitz_defect = 0.0;
};

inline WconvReport wconv_report(const CovarianceSequence& cov, const Symbol& symbol,
                                std::size_t window, std::size_t n, const TestFunction& psi,
                                const QuadratureSpec& quad = {}) {
    const Matrix sigma = truncate(cov, window).dense();
    const auto spec = eigendecompose(sigma);
    const auto approx = optimal_approximator(spec, n);

    WconvReport report;
    report.sigma_qf_time = quadratic_form(sigma, psi);
    report.sigma_qf_freq = spectral_quadratic_form(symbol, psi, quad);
    report.sigmahat_qf_time = quadratic_form(approx.reduced_covariance, psi);
    if (n < window) {
        // realize at the carried rank: zero tail modes change nothing in the
        // reduced covariance but cannot support state directions
        const std::size_t r = carried_rank(spec, n);
        const auto model =
            stationary_extension(r == n ? approx : optimal_approximator(spec, r));
        report.sigmahat_qf_freq = spectral_quadratic_form(line_spectrum(model), psi);
    } else {
        // full rank: the reduction is the window covariance itself and its
        // spectral content is the symbol
        report.sigmahat_qf_freq = report.sigma_qf_freq;
    }
    report.weak_gap = weak_gap(spec, sigma, n, psi);
    report.toeplitz_defect = toeplitz_defect(approx.reduced_covariance);

    const double s1 = std::max({std::abs(report.sigma_qf_time), std::abs(report.sigma_qf_freq), 1.0});
    report.parseval_residual_sigma = std::abs(report.sigma_qf_time - report.sigma_qf_freq) / s1;
    const double s2 =
        std::max({std::abs(report.sigmahat_qf_time), std::abs(report.sigmahat_qf_freq), 1.0});
    report.parseval_residual_sigmahat =
        std::abs(report.sigmahat_qf_time - report.sigmahat_qf_freq) / s2;
    return report;
}

/// Standard bank of test functions: canonical basis vectors, a boxcar, an
/// alternating sign pattern, a Gaussian-decay window, then seeded random
/// directions up to `count`. All non-basis entries are normalized to unit
/// Euclidean length. Identifiers are stable.
inline std::vector<TestFunction> make_test_bank(std::size_t dim, std::size_t count,
                                                std::uint64_t seed) {
    if (dim < 1) throw ValidationError("make_test_bank: empty window");
    std::vector<TestFunction> bank;
    auto normalized = [](Vector v) {
        const double nrm = norm2(v);
        for (double& x : v) x /= nrm;
        return v;
    };

    const std::size_t basis = std::min<std::size_t>(dim, 8);
    for (std::size_t i = 0; i < basis && bank.size() < count; ++i) {
        TestFunction f;
        f.coefficients.assign(dim, 0.0);
        f.coefficients[i] = 1.0;
        f.id = "e" + std::to_string(i);
        bank.push_back(std::move(f));
    }
    if (bank.size() < count) {
        TestFunction f;
        f.coefficients = normalized(Vector(dim, 1.0));
        f.id = "box";
        bank.push_back(std::move(f));
    }
    if (bank.size() < count && dim > 1) {
        Vector v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
        TestFunction f;
        f.coefficients = normalized(std::move(v));
        f.id = "alt";
        bank.push_back(std::move(f));
    }
    if (bank.size() < count) {
        Vector v(dim);
        const double mid = 0.5 * static_cast<double>(dim - 1);
        const double width = std::max(1.0, static_cast<double>(dim) / 4.0);
        for (std::size_t i = 0; i < dim; ++i) {
            const double z = (static_cast<double>(i) - mid) / width;
            v[i] = std::exp(-0.5 * z * z);
        }
        TestFunction f;
        f.coefficients = normalized(std::move(v));
        f.id = "gauss";
        bank.push_back(std::move(f));
    }
    std::size_t r = 0;
    while (bank.size() < count) {
        NormalStream stream(seed, 0x7E57F000u + r);
        Vector v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = stream.next();
        TestFunction f;
        f.coefficients = normalized(std::move(v));
        f.id = "rnd" + std::to_string(r);
        bank.push_back(std::move(f));
        ++r;
    }
    return bank;
}

}  // namespace toepca
