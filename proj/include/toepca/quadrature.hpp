#pragma once

// Composite Gauss-Legendre quadrature. Nodes and weights are computed by
// Newton iteration on the Legendre recurrence (deterministic to the last
// bit), panels are summed in index order.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "toepca/error.hpp"
#include "toepca/linalg.hpp"

namespace toepca {

struct QuadratureSpec {
    int points_per_panel = 16;
    int panels = 64;
    /// Accepted disagreement between the panel count and its doubling,
    /// relative to max(1, |sigma(0)|) of the result being integrated.
    double tolerance = 1e-9;

    void validate() const {
        if (points_per_panel < 4)
            throw ValidationError("quadrature: need at least 4 points per panel");
        if (panels < 8)
            throw ValidationError("quadrature: need at least 8 panels");
        if (!(tolerance > 0.0))
            throw ValidationError("quadrature: tolerance must be positive");
    }
};

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre: need n >= 1");
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // root bracketing guess, then Newton on P_n
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = -p1 / pp;
            z += dz;
            if (std::abs(dz) < 1e-15) {
                // one clean-up step, then stop
                p1 = 1.0; p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                break;
            }
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

/// Integrate f over [a, b] with `panels` equal panels of an n-point rule.
inline double integrate_panels(const std::function<double(double)>& f, double a, double b,
                               int panels, const GaussLegendreRule& rule) {
    if (!(b >= a)) throw ValidationError("integrate_panels: b < a");
    CompensatedSum acc;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            acc.add(0.5 * h * rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]));
    }
    return acc.value();
}

/// Integrate f over consecutive pieces [breaks[i], breaks[i+1]], splitting a
/// total panel budget across pieces proportionally to their length (at least
/// one panel per piece). Discontinuities of f must lie on the breaks.
inline double integrate_piecewise(const std::function<double(double)>& f,
                                  const std::vector<double>& breaks,
                                  int total_panels, const GaussLegendreRule& rule) {
    if (breaks.size() < 2) throw ValidationError("integrate_piecewise: need >= 2 breakpoints");
    const double total = breaks.back() - breaks.front();
    if (!(total > 0.0)) throw ValidationError("integrate_piecewise: empty interval");
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double len = breaks[i + 1] - breaks[i];
        const int panels = std::max(1, static_cast<int>(std::llround(total_panels * len / total)));
        acc.add(integrate_panels(f, breaks[i], breaks[i + 1], panels, rule));
    }
    return acc.value();
}

}  // namespace toepca
