#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "toepca/covariance.hpp"
#include "toepca/pca.hpp"
#include "toepca/realize.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

using namespace toepca;

namespace {

StateSpaceRealization realize_lines(const Symbol& symbol, std::size_t window, std::size_t rank) {
    const auto cov = covariance_from_symbol(symbol, window - 1);
    const auto spec = eigendecompose(truncate(cov, window).dense());
    return stationary_extension(optimal_approximator(spec, rank));
}

}  // namespace

TEST_CASE("cosine process realizes as a rotation") {
    const double theta0 = 2.0 * M_PI / 8.0;
    const auto model = realize_lines(Symbol::line_spectral({{theta0, 1.0}}), 8, 2);
    CHECK(model.orthogonality_residual <= 1e-10);
    CHECK(model.observability_sv > 1e-8 * norm2(model.readout));
    CHECK(model.stationarity_residual <= 1e-6);
    CHECK(model.shift_residual <= 1e-10);

    const auto lines = line_spectrum(model);
    REQUIRE(lines.lines.size() == 1);
    CHECK(lines.lines[0].theta == Catch::Approx(theta0).margin(1e-8));
    CHECK(lines.lines[0].power == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("two-line symbol recovers both frequencies") {
    const auto sym = Symbol::line_spectral({{M_PI / 3, 1.0}, {M_PI / 5, 2.0}});
    const auto model = realize_lines(sym, 32, 4);
    const auto lines = line_spectrum(model);
    REQUIRE(lines.lines.size() == 2);
    CHECK(lines.lines[0].theta == Catch::Approx(M_PI / 5).margin(1e-6));
    CHECK(lines.lines[1].theta == Catch::Approx(M_PI / 3).margin(1e-6));
    CHECK(lines.lines[0].power == Catch::Approx(2.0).margin(1e-6));
    CHECK(lines.lines[1].power == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("constant process is a fixed point with unit readout") {
    const auto model = realize_lines(Symbol::line_spectral({{0.0, 1.0}}), 4, 1);
    REQUIRE(model.state_dim == 1);
    CHECK(model.dynamics(0, 0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(model.readout[0]) == Catch::Approx(1.0).margin(1e-12));
    const auto lines = line_spectrum(model);
    REQUIRE(lines.lines.size() == 1);
    CHECK(lines.lines[0].theta == Catch::Approx(0.0).margin(1e-7));
    CHECK(lines.lines[0].power == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("alternating process realizes as a reflection") {
    const auto model = realize_lines(Symbol::line_spectral({{M_PI, 0.7}}), 4, 1);
    CHECK(model.dynamics(0, 0) == Catch::Approx(-1.0).margin(1e-12));
    for (long tau = 0; tau <= 9; ++tau)
        CHECK(extend_covariance(model, tau) ==
              Catch::Approx(0.7 * (tau % 2 == 0 ? 1.0 : -1.0)).margin(1e-10));
}

TEST_CASE("extended covariance: definition, periodicity, closed form") {
    const double theta0 = 2.0 * M_PI / 8.0;
    const auto model = realize_lines(Symbol::line_spectral({{theta0, 1.0}}), 8, 2);
    const double var = extend_covariance(model, 0);
    CHECK(var == Catch::Approx(1.0).margin(1e-10));
    for (long k = 1; k <= 4; ++k)
        CHECK(extend_covariance(model, 8 * k) == Catch::Approx(var).margin(1e-8));
    for (long tau = 0; tau <= 32; ++tau) {
        CHECK(extend_covariance(model, tau) ==
              Catch::Approx(std::cos(theta0 * static_cast<double>(tau))).margin(1e-6));
        CHECK(std::abs(extend_covariance(model, tau)) <= var + 1e-10);
    }
    CHECK(extend_covariance(model, -3) == extend_covariance(model, 3));
}

TEST_CASE("exact recovery for line-spectral generators") {
    struct Case {
        Symbol symbol;
        std::size_t rank;
        std::size_t window;
    };
    const std::vector<Case> cases = {
        {Symbol::line_spectral({{1.1, 0.8}}), 2, 8},
        {Symbol::line_spectral({{0.0, 1.0}, {1.0, 0.5}}), 3, 12},
        {Symbol::line_spectral({{0.5, 1.0}, {1.2, 0.7}, {2.5, 1.5}}), 6, 24},
        {Symbol::line_spectral({{0.0, 0.5}, {1.1, 1.0}, {M_PI, 0.25}}), 4, 16},
    };
    for (const auto& c : cases) {
        const std::size_t horizon = 4 * c.window;
        const auto cov = covariance_from_symbol(c.symbol, horizon);
        const auto spec = eigendecompose(truncate(cov, c.window).dense());
        const auto model = stationary_extension(optimal_approximator(spec, c.rank));
        CAPTURE(c.window, c.rank);
        CHECK(model.orthogonality_residual <= 1e-10);
        CHECK(model.observability_sv > 1e-8 * norm2(model.readout));

        const auto lines = line_spectrum(model);
        auto want = c.symbol.lines;
        std::sort(want.begin(), want.end(),
                  [](const SpectralLine& a, const SpectralLine& b) { return a.theta < b.theta; });
        REQUIRE(lines.lines.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(lines.lines[i].theta == Catch::Approx(want[i].theta).margin(1e-6));
            CHECK(lines.lines[i].power == Catch::Approx(want[i].power).margin(1e-6));
        }
        for (std::size_t tau = 0; tau <= horizon; ++tau)
            CHECK(extend_covariance(model, static_cast<long>(tau)) ==
                  Catch::Approx(cov.values[tau]).margin(1e-6 * cov.values[0]));
    }
}

TEST_CASE("line spectrum power totals the lag-zero variance") {
    const auto sym = Symbol::line_spectral({{0.4, 1.5}, {2.0, 0.5}});
    const auto model = realize_lines(sym, 16, 4);
    const auto lines = line_spectrum(model);
    CHECK(lines.total_power() ==
          Catch::Approx(extend_covariance(model, 0)).epsilon(1e-8));
    for (std::size_t i = 0; i + 1 < lines.lines.size(); ++i)
        CHECK(lines.lines[i + 1].theta - lines.lines[i].theta > 1e-8);
    // the lines reproduce the extended covariance
    for (long tau = 0; tau <= 64; ++tau) {
        double direct = 0.0;
        for (const auto& l : lines.lines)
            direct += l.power * std::cos(l.theta * static_cast<double>(tau));
        CHECK(direct == Catch::Approx(extend_covariance(model, tau)).margin(1e-8));
    }
}

TEST_CASE("window placement does not change the realization") {
    // stationarity: the construction depends only on the covariance, so two
    // builds from the same window length are identical
    const auto sym = Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}});
    const auto a = realize_lines(sym, 20, 4);
    const auto b = realize_lines(sym, 20, 4);
    CHECK(max_abs(a.dynamics - b.dynamics) == 0.0);
    const auto la = line_spectrum(a);
    const auto lb = line_spectrum(b);
    REQUIRE(la.lines.size() == lb.lines.size());
    for (std::size_t i = 0; i < la.lines.size(); ++i) {
        CHECK(la.lines[i].theta == lb.lines[i].theta);
        CHECK(la.lines[i].power == lb.lines[i].power);
    }
}

TEST_CASE("toeplitz defect of reduced covariances") {
    SECTION("exact line reductions stay Toeplitz") {
        const auto cov =
            covariance_from_symbol(Symbol::line_spectral({{2.0 * M_PI / 8.0, 1.0}}), 7);
        const auto spec = eigendecompose(truncate(cov, 8).dense());
        const auto approx = optimal_approximator(spec, 2);
        CHECK(toeplitz_defect(approx.reduced_covariance) < 1e-12);
    }
    SECTION("ar1 reductions are not Toeplitz and the defect is reported") {
        const auto cov = covariance_from_symbol(Symbol::ar1(0.5), 15);
        const auto spec = eigendecompose(truncate(cov, 16).dense());
        const auto approx = optimal_approximator(spec, 3);
        const double defect = toeplitz_defect(approx.reduced_covariance);
        CHECK(defect > 1e-6);
        CHECK(defect < 1.0);
    }
}

TEST_CASE("construction preconditions and failure modes") {
    SECTION("window must exceed the rank") {
        const auto cov = covariance_from_symbol(Symbol::ar1(0.5), 3);
        const auto spec = eigendecompose(truncate(cov, 4).dense());
        CHECK_THROWS_AS(stationary_extension(optimal_approximator(spec, 4)), ValidationError);
    }
    SECTION("rank above the true process rank degenerates") {
        const auto cov =
            covariance_from_symbol(Symbol::line_spectral({{2.0 * M_PI / 8.0, 1.0}}), 7);
        const auto spec = eigendecompose(truncate(cov, 8).dense());
        CHECK_THROWS_AS(stationary_extension(optimal_approximator(spec, 3)),
                        DegenerateBasisError);
    }
}
