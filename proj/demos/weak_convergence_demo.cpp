// Minimal library walkthrough: build a band-limited symbol, reduce its window
// covariance rank by rank, and watch the quadratic-form gap collapse once the
// rank passes the concentration count N*W/pi.

#include <cstdio>

#include "toepca/toepca.hpp"

int main() {
    using namespace toepca;
    const std::size_t window = 64;
    const auto symbol = Symbol::bandlimited(M_PI / 4);
    const auto cov = covariance_from_symbol(symbol, window - 1);
    const auto sigma = truncate(cov, window).dense();
    const auto spectrum = eigendecompose(sigma);

    TestFunction psi;
    psi.coefficients.assign(window, 0.0);
    psi.coefficients[0] = 1.0;

    const auto curve = convergence_sweep(spectrum, psi);
    std::printf("window %zu, sigma(0) = %s, psi = unit impulse\n", window,
                format_double(cov.values[0]).c_str());
    std::printf("%4s  %-14s\n", "n", "gap");
    for (std::size_t n : {1u, 4u, 8u, 12u, 14u, 16u, 18u, 20u, 24u, 32u, 64u})
        std::printf("%4zu  %-14s\n", n, format_double(curve.entries[n - 1].second).c_str());
    return 0;
}
