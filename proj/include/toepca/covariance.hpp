#pragma once

// Covariance sequences and the Fourier transform pair connecting them to
// spectral symbols: sigma(tau) = (1/2pi) integral of phi(theta) e^{i theta tau}.
// Only tau >= 0 is stored; sigma(-tau) = sigma(tau) for real processes.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/quadrature.hpp"
#include "toepca/symbol.hpp"

namespace toepca {

/// Guard against runaway dense eigenproblems downstream; callers that really
/// want more pass allow_large_tau.
inline constexpr std::size_t kTauMaxCap = 4096;

struct CovarianceSequence {
    std::vector<double> values;                // sigma(0 .. tau_max)
    std::optional<Symbol> origin_symbol;
    std::optional<double> quadrature_residual; // achieved panel-doubling residual

    std::size_t tau_max() const { return values.empty() ? 0 : values.size() - 1; }

    /// Symmetric lookup sigma(|tau|); throws past the stored horizon.
    double at(long tau) const {
        const std::size_t a = static_cast<std::size_t>(tau < 0 ? -tau : tau);
        if (a >= values.size())
            throw ValidationError("covariance: lag " + std::to_string(tau) +
                                  " beyond stored tau_max " + std::to_string(tau_max()));
        return values[a];
    }

    void validate() const {
        if (values.empty())
            throw ValidationError("covariance: empty sequence");
        for (double v : values)
            if (!std::isfinite(v))
                throw ValidationError("covariance: non-finite entry");
        if (!(values[0] > 0.0))
            throw ValidationError("covariance: sigma(0) must be positive");
    }
};

/// Fourier coefficients of a symbol up to lag tau_max.
///
/// Density families are integrated piece by piece with composite
/// Gauss-Legendre panels aligned to the symbol's breakpoints; the result is
/// cross-checked against a doubled panel count and an AccuracyError carrying
/// the achieved residual is thrown if the two disagree beyond spec.tolerance
/// (relative to max(1, sigma(0))). Line-spectral symbols bypass quadrature:
/// sigma(tau) = sum_k p_k cos(theta_k tau).
inline CovarianceSequence covariance_from_symbol(const Symbol& symbol, std::size_t tau_max,
                                                 const QuadratureSpec& quad = {},
                                                 bool allow_large_tau = false) {
    symbol.validate();
    quad.validate();
    if (tau_max > kTauMaxCap && !allow_large_tau)
        throw ValidationError("covariance_from_symbol: tau_max " + std::to_string(tau_max) +
                              " exceeds cap " + std::to_string(kTauMaxCap) +
                              "; pass allow_large_tau to override");

    CovarianceSequence cov;
    cov.origin_symbol = symbol;
    cov.values.assign(tau_max + 1, 0.0);

    if (symbol.is_line_spectral()) {
        for (std::size_t tau = 0; tau <= tau_max; ++tau) {
            CompensatedSum acc;
            for (const auto& l : symbol.lines)
                acc.add(symbol.scale * l.power * std::cos(l.theta * static_cast<double>(tau)));
            cov.values[tau] = acc.value();
        }
        cov.validate();
        return cov;
    }

    const auto rule = gauss_legendre(quad.points_per_panel);
    const auto breaks = symbol.smooth_breakpoints();
    // sigma(tau) = (1/pi) int_0^pi phi(theta) cos(theta tau) dtheta  (even symbol)
    auto coefficient = [&](std::size_t tau, int panels) {
        const double t = static_cast<double>(tau);
        return integrate_piecewise(
                   [&](double th) { return symbol.density(th) * std::cos(th * t); },
                   breaks, panels, rule) /
               M_PI;
    };

    double worst = 0.0;
    for (std::size_t tau = 0; tau <= tau_max; ++tau) {
        const double coarse = coefficient(tau, quad.panels);
        const double fine = coefficient(tau, 2 * quad.panels);
        worst = std::max(worst, std::abs(fine - coarse));
        cov.values[tau] = fine;
    }
    const double scale = std::max(1.0, std::abs(cov.values[0]));
    if (worst > quad.tolerance * scale)
        throw AccuracyError("covariance_from_symbol: quadrature did not settle (residual " +
                                std::to_string(worst) + ")",
                            worst);
    cov.quadrature_residual = worst;
    cov.validate();
    return cov;
}

/// Truncated Fourier sum sum_{|tau| <= tau_max} sigma(tau) e^{-i theta tau},
/// evaluated on a grid in [-pi, pi]. The sum is assembled in complex form and
/// the imaginary part, which cancels by symmetry, is asserted small.
inline std::vector<double> partial_symbol(const CovarianceSequence& cov,
                                          const std::vector<double>& grid) {
    cov.validate();
    if (grid.empty())
        throw ValidationError("partial_symbol: empty grid");
    for (double th : grid)
        if (!(th >= -M_PI - 1e-12 && th <= M_PI + 1e-12))
            throw ValidationError("partial_symbol: grid point outside [-pi, pi]");

    std::vector<double> out(grid.size(), 0.0);
    const long k = static_cast<long>(cov.tau_max());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double th = grid[g];
        CompensatedSum re, im;
        for (long tau = -k; tau <= k; ++tau) {
            const double s = cov.at(tau);
            re.add(s * std::cos(th * static_cast<double>(tau)));
            im.add(-s * std::sin(th * static_cast<double>(tau)));
        }
        if (std::abs(im.value()) > 1e-12 * cov.values[0])
            throw AccuracyError("partial_symbol: imaginary residual " +
                                    std::to_string(im.value()) + " at theta " +
                                    std::to_string(th),
                                std::abs(im.value()));
        out[g] = re.value();
    }
    return out;
}

}  // namespace toepca
