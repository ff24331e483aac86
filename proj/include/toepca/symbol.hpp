#pragma once

// Spectral symbols: even, nonnegative, bounded densities on [-pi, pi],
// plus discrete line spectra. Line spectra are kept as frequency/power
// pairs and never gridded; frequencies live in [0, pi] with powers
// counting both half-circle contributions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "toepca/error.hpp"

namespace toepca {

enum class SymbolFamily { white, bandlimited, ar1, lines, piecewise };

inline const char* family_name(SymbolFamily f) {
    switch (f) {
        case SymbolFamily::white: return "white";
        case SymbolFamily::bandlimited: return "bandlimited";
        case SymbolFamily::ar1: return "ar1";
        case SymbolFamily::lines: return "lines";
        case SymbolFamily::piecewise: return "piecewise";
    }
    return "?";
}

struct SpectralLine {
    double theta = 0.0;   // in [0, pi]
    double power = 0.0;   // full-circle power of the +/-theta pair
};

class Symbol {
public:
    SymbolFamily family = SymbolFamily::white;
    double scale = 1.0;
    double half_bandwidth = 0.0;                   // bandlimited
    double pole = 0.0;                             // ar1
    std::vector<SpectralLine> lines;               // lines
    std::vector<double> breakpoints;               // piecewise, 0 = b0 < ... < bm = pi
    std::vector<std::vector<double>> piece_coeffs; // polynomial in theta per piece

    static Symbol white(double scale = 1.0) {
        Symbol s;
        s.family = SymbolFamily::white;
        s.scale = scale;
        s.validate();
        return s;
    }

    static Symbol bandlimited(double half_bandwidth, double scale = 1.0) {
        Symbol s;
        s.family = SymbolFamily::bandlimited;
        s.half_bandwidth = half_bandwidth;
        s.scale = scale;
        s.validate();
        return s;
    }

    static Symbol ar1(double pole, double scale = 1.0) {
        Symbol s;
        s.family = SymbolFamily::ar1;
        s.pole = pole;
        s.scale = scale;
        s.validate();
        return s;
    }

    static Symbol line_spectral(std::vector<SpectralLine> lines, double scale = 1.0) {
        Symbol s;
        s.family = SymbolFamily::lines;
        s.lines = std::move(lines);
        s.scale = scale;
        s.validate();
        return s;
    }

    static Symbol piecewise(std::vector<double> breakpoints,
                            std::vector<std::vector<double>> piece_coeffs,
                            double scale = 1.0) {
        Symbol s;
        s.family = SymbolFamily::piecewise;
        s.breakpoints = std::move(breakpoints);
        s.piece_coeffs = std::move(piece_coeffs);
        s.scale = scale;
        s.validate();
        return s;
    }

    bool is_line_spectral() const { return family == SymbolFamily::lines; }

    /// Density value at theta. Even extension is structural: only |theta|
    /// is consulted. Not defined for line-spectral symbols.
    double density(double theta) const {
        const double t = std::abs(theta);
        switch (family) {
            case SymbolFamily::white:
                return scale;
            case SymbolFamily::bandlimited:
                return t <= half_bandwidth ? scale : 0.0;
            case SymbolFamily::ar1: {
                const double r = pole;
                return scale * (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(t) + r * r);
            }
            case SymbolFamily::piecewise:
                return scale * piece_value(t);
            case SymbolFamily::lines:
                throw ValidationError("symbol: line spectra have no pointwise density");
        }
        return 0.0;
    }

    /// Breakpoints of smoothness on [0, pi], endpoints included. Quadrature
    /// panels are aligned with these so jumps never cross a panel.
    std::vector<double> smooth_breakpoints() const {
        switch (family) {
            case SymbolFamily::bandlimited:
                if (half_bandwidth < M_PI) return {0.0, half_bandwidth, M_PI};
                return {0.0, M_PI};
            case SymbolFamily::piecewise:
                return breakpoints;
            default:
                return {0.0, M_PI};
        }
    }

    void validate() const {
        if (!std::isfinite(scale) || scale <= 0.0)
            throw ValidationError("symbol: scale must be positive and finite");
        switch (family) {
            case SymbolFamily::white:
                break;
            case SymbolFamily::bandlimited:
                if (!std::isfinite(half_bandwidth) || half_bandwidth <= 0.0 ||
                    half_bandwidth > M_PI)
                    throw ValidationError("symbol: half bandwidth must lie in (0, pi]");
                break;
            case SymbolFamily::ar1:
                if (!std::isfinite(pole) || std::abs(pole) >= 1.0)
                    throw ValidationError("symbol: ar1 pole must lie inside the unit disc");
                break;
            case SymbolFamily::lines: {
                if (lines.empty())
                    throw ValidationError("symbol: line spectrum needs at least one line");
                for (const auto& l : lines) {
                    if (!std::isfinite(l.theta) || l.theta < 0.0 || l.theta > M_PI)
                        throw ValidationError("symbol: line frequency outside [0, pi]");
                    if (!std::isfinite(l.power) || l.power <= 0.0)
                        throw ValidationError("symbol: line power must be positive");
                }
                for (std::size_t i = 0; i < lines.size(); ++i)
                    for (std::size_t j = i + 1; j < lines.size(); ++j)
                        if (std::abs(lines[i].theta - lines[j].theta) < 1e-12)
                            throw ValidationError("symbol: duplicate line frequency");
                break;
            }
            case SymbolFamily::piecewise: {
                if (breakpoints.size() < 2)
                    throw ValidationError("symbol: piecewise needs >= 2 breakpoints");
                if (std::abs(breakpoints.front()) > 1e-12 ||
                    std::abs(breakpoints.back() - M_PI) > 1e-12)
                    throw ValidationError("symbol: piecewise breakpoints must span [0, pi]");
                for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
                    if (!(breakpoints[i] < breakpoints[i + 1]))
                        throw ValidationError("symbol: breakpoints must increase strictly");
                if (piece_coeffs.size() + 1 != breakpoints.size())
                    throw ValidationError("symbol: need one coefficient list per piece");
                for (const auto& c : piece_coeffs) {
                    if (c.empty())
                        throw ValidationError("symbol: empty piece coefficient list");
                    for (double v : c)
                        if (!std::isfinite(v))
                            throw ValidationError("symbol: non-finite piece coefficient");
                }
                // nonnegativity probed on a dense grid
                const int grid = 4096;
                for (int g = 0; g <= grid; ++g) {
                    const double th = M_PI * g / grid;
                    if (piece_value(th) < -1e-12)
                        throw ValidationError("symbol: piecewise density negative near theta=" +
                                              std::to_string(th));
                }
                break;
            }
        }
    }

private:
    double piece_value(double t) const {
        // pieces are [b_i, b_{i+1}); the last piece also owns theta = pi
        std::size_t i = 0;
        while (i + 2 < breakpoints.size() && t >= breakpoints[i + 1]) ++i;
        const auto& c = piece_coeffs[i];
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
        return v;
    }
};

}  // namespace toepca
