#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "toepca/converge.hpp"
#include "toepca/covariance.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

using namespace toepca;

namespace {
TestFunction basis_vector(std::size_t dim, std::size_t i) {
    TestFunction f;
    f.coefficients.assign(dim, 0.0);
    f.coefficients[i] = 1.0;
    f.id = "e" + std::to_string(i);
    return f;
}
}  // namespace

TEST_CASE("weak gap closed forms on the 2x2 ar1 window") {
    CovarianceSequence cov;
    cov.values = {1.0, 0.5};
    CHECK(weak_gap(cov, 2, 1, {0, {1.0, 0.0}, ""}) == Catch::Approx(0.25).margin(1e-12));
    CHECK(weak_gap(cov, 2, 1, {0, {1.0, 1.0}, ""}) == Catch::Approx(0.0).margin(1e-12));
    CHECK(weak_gap(cov, 2, 2, {0, {1.0, 0.0}, ""}) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("full-rank gap vanishes for any test function") {
    const auto cov = covariance_from_symbol(Symbol::ar1(0.7), 7);
    const auto sigma = truncate(cov, 8).dense();
    const auto spec = eigendecompose(sigma);
    for (const auto& psi : make_test_bank(8, 12, 5))
        CHECK(std::abs(weak_gap(spec, sigma, 8, psi)) <=
              1e-9 * quadratic_form(sigma, psi));
}

TEST_CASE("sweep matches per-rank dense gaps") {
    const auto cov = covariance_from_symbol(Symbol::bandlimited(M_PI / 4), 15);
    const auto sigma = truncate(cov, 16).dense();
    const auto spec = eigendecompose(sigma);
    for (const auto& psi : make_test_bank(16, 6, 21)) {
        const auto curve = convergence_sweep(spec, psi);
        REQUIRE(curve.entries.size() == 16);
        CHECK(curve.reference_qf ==
              Catch::Approx(quadratic_form(sigma, psi)).epsilon(1e-10));
        for (std::size_t n : {1u, 5u, 9u, 16u}) {
            const double dense_gap = weak_gap(spec, sigma, n, psi);
            CHECK(curve.entries[n - 1].second ==
                  Catch::Approx(dense_gap).margin(1e-10 * std::max(1.0, curve.reference_qf)));
        }
    }
}

TEST_CASE("sweep invariants across families") {
    const std::vector<Symbol> symbols = {
        Symbol::white(), Symbol::ar1(0.5), Symbol::ar1(0.9),
        Symbol::bandlimited(M_PI / 8),
        Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}})};
    for (const auto& sym : symbols) {
        const auto cov = covariance_from_symbol(sym, 63);
        for (std::size_t window : {8u, 32u, 64u}) {
            const auto spec = eigendecompose(truncate(cov, window).dense());
            for (const auto& psi : make_test_bank(window, 20, 3)) {
                const auto curve = convergence_sweep(spec, psi);
                const double tol = 1e-9 * std::max(curve.reference_qf, 1.0);
                double prev = curve.reference_qf;
                for (const auto& [n, gap] : curve.entries) {
                    CHECK(gap >= -tol);
                    CHECK(gap <= prev + tol);
                    prev = gap;
                }
                CHECK(curve.entries.back().second <= tol);
            }
        }
    }
}

TEST_CASE("cosine window converges after two components") {
    const auto cov = covariance_from_symbol(Symbol::line_spectral({{2.0 * M_PI / 8.0, 1.0}}), 7);
    const auto spec = eigendecompose(truncate(cov, 8).dense());
    for (const auto& psi : make_test_bank(8, 10, 17)) {
        const auto curve = convergence_sweep(spec, psi);
        for (const auto& [n, gap] : curve.entries)
            if (n >= 2) CHECK(gap <= 1e-9 * std::max(curve.reference_qf, 1.0));
    }
}

TEST_CASE("band-limited gap curve plunges near the concentration count") {
    const std::size_t window = 64;
    const auto cov = covariance_from_symbol(Symbol::bandlimited(M_PI / 4), window - 1);
    const auto spec = eigendecompose(truncate(cov, window).dense());
    const auto curve = convergence_sweep(spec, basis_vector(window, 0));
    // time-bandwidth count is 16; the crossing of 0.01 sigma(0) happens in a
    // short plunge no later than rank 20
    const double threshold = 0.01 * cov.values[0];
    std::size_t crossing = window;
    for (const auto& [n, gap] : curve.entries)
        if (gap < threshold) {
            crossing = n;
            break;
        }
    CHECK(crossing >= 10);
    CHECK(crossing <= 20);
}

TEST_CASE("spectral quadratic form closed forms") {
    SECTION("a unit impulse integrates the density to sigma(0)") {
        for (const auto& sym : {Symbol::ar1(0.5), Symbol::bandlimited(M_PI / 4)}) {
            const auto cov = covariance_from_symbol(sym, 4);
            CHECK(spectral_quadratic_form(sym, basis_vector(5, 0)) ==
                  Catch::Approx(cov.values[0]).margin(1e-10));
        }
    }
    SECTION("white density gives the test function energy") {
        TestFunction psi{0, {0.5, -1.0, 2.0, 0.25}, ""};
        CHECK(spectral_quadratic_form(Symbol::white(), psi) ==
              Catch::Approx(dot(psi.coefficients, psi.coefficients)).margin(1e-10));
    }
    SECTION("single line with a unit impulse") {
        const auto sym = Symbol::line_spectral({{0.7854, 1.0}});
        CHECK(spectral_quadratic_form(sym, basis_vector(4, 0)) ==
              Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("time and frequency quadratic forms agree across the bank") {
    for (const auto& sym :
         {Symbol::ar1(0.5), Symbol::ar1(-0.6), Symbol::bandlimited(M_PI / 4),
          Symbol::piecewise({0.0, 1.0, M_PI}, {{2.0}, {0.5}})}) {
        const auto cov = covariance_from_symbol(sym, 31);
        const auto trunc = truncate(cov, 32);
        for (const auto& psi : make_test_bank(32, 12, 9)) {
            const double time_qf = quadratic_form(trunc, psi);
            const double freq_qf = spectral_quadratic_form(sym, psi);
            CHECK(std::abs(time_qf - freq_qf) <=
                  1e-6 * std::max({std::abs(time_qf), std::abs(freq_qf), 1.0}));
        }
    }
    // line-spectral: both sides are finite sums, agreement is exact
    const auto sym = Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}});
    const auto cov = covariance_from_symbol(sym, 31);
    const auto trunc = truncate(cov, 32);
    for (const auto& psi : make_test_bank(32, 12, 9)) {
        const double time_qf = quadratic_form(trunc, psi);
        const double freq_qf = spectral_quadratic_form(sym, psi);
        CHECK(std::abs(time_qf - freq_qf) <=
              1e-10 * std::max({std::abs(time_qf), std::abs(freq_qf), 1.0}));
    }
}

TEST_CASE("weak-convergence report ties the four forms together") {
    SECTION("exact rank-2 cosine case: all four agree") {
        const auto sym = Symbol::line_spectral({{2.0 * M_PI / 8.0, 1.0}});
        const auto cov = covariance_from_symbol(sym, 7);
        const auto report = wconv_report(cov, sym, 8, 2, basis_vector(8, 1));
        CHECK(report.weak_gap <= 1e-9);
        CHECK(report.parseval_residual_sigma <= 1e-6);
        CHECK(report.parseval_residual_sigmahat <= 1e-6);
        CHECK(std::abs(report.sigma_qf_time - report.sigmahat_qf_freq) <= 1e-6);
        CHECK(report.toeplitz_defect <= 1e-10);
    }
    SECTION("white noise at full rank agrees within quadrature accuracy") {
        const auto sym = Symbol::white();
        const auto cov = covariance_from_symbol(sym, 5);
        const auto report = wconv_report(cov, sym, 6, 6, basis_vector(6, 0));
        CHECK(report.weak_gap <= 1e-12);
        CHECK(report.parseval_residual_sigma <= 1e-8);
        CHECK(report.parseval_residual_sigmahat <= 1e-8);
    }
    SECTION("ar1 rank sweep: density side stays tight, gap decreases") {
        const auto sym = Symbol::ar1(0.5);
        const auto cov = covariance_from_symbol(sym, 31);
        double prev_gap = 1e300;
        for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
            const auto report = wconv_report(cov, sym, 32, n, basis_vector(32, 0));
            CHECK(report.parseval_residual_sigma <= 1e-6);
            CHECK(report.weak_gap <= prev_gap + 1e-12);
            prev_gap = report.weak_gap;
        }
    }
}

TEST_CASE("test bank shape and determinism") {
    const auto bank = make_test_bank(16, 20, 42);
    REQUIRE(bank.size() == 20);
    CHECK(bank[0].id == "e0");
    CHECK(bank[8].id == "box");
    CHECK(bank[9].id == "alt");
    CHECK(bank[10].id == "gauss");
    CHECK(bank[11].id == "rnd0");
    for (const auto& f : bank) CHECK_NOTHROW(f.validate());
    const auto again = make_test_bank(16, 20, 42);
    for (std::size_t i = 0; i < bank.size(); ++i)
        CHECK(bank[i].coefficients == again[i].coefficients);
    const auto other = make_test_bank(16, 20, 43);
    CHECK(bank[11].coefficients != other[11].coefficients);
}
