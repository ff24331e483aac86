// Recover a two-line spectrum: window covariance -> principal subspace ->
// orthogonal state-space model -> frequencies, powers, and covariances far
// beyond the window.

#include <cmath>
#include <cstdio>

#include "toepca/toepca.hpp"

int main() {
    using namespace toepca;
    const auto symbol = Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}});
    const std::size_t window = 32;
    const auto cov = covariance_from_symbol(symbol, window - 1);
    const auto spectrum = eigendecompose(truncate(cov, window).dense());
    const auto approx = optimal_approximator(spectrum, 4);
    const auto model = stationary_extension(approx);
    const auto lines = line_spectrum(model);

    std::printf("state dimension %zu, unitarity residual %s\n", model.state_dim,
                format_double(model.orthogonality_residual).c_str());
    for (const auto& l : lines.lines)
        std::printf("line: theta = %s, power = %s\n", format_double(l.theta).c_str(),
                    format_double(l.power).c_str());
    std::printf("covariance at lag 100: model %s, generator %s\n",
                format_double(extend_covariance(model, 100)).c_str(),
                format_double(2.0 * std::cos(M_PI / 5 * 100) + std::cos(M_PI / 3 * 100)).c_str());
    return 0;
}
