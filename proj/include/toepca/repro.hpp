#pragma once

// Self-check suite behind the `repro` subcommand: a fixed family/window/rank
// matrix exercising every analytic guarantee the library makes, with one
// result line per criterion. Artifacts are written with deterministic content
// so two runs of the suite can be compared byte for byte; that comparison is
// itself the final criterion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "toepca/converge.hpp"
#include "toepca/covariance.hpp"
#include "toepca/io.hpp"
#include "toepca/linalg.hpp"
#include "toepca/pca.hpp"
#include "toepca/realize.hpp"
#include "toepca/rng.hpp"
#include "toepca/sample.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca::repro {

inline constexpr std::uint64_t kDefaultSeed = 0xA11CE5u;

struct CriterionResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct Report {
    std::vector<CriterionResult> criteria;
    bool all_passed() const {
        for (const auto& c : criteria)
            if (!c.passed) return false;
        return true;
    }
};

struct Family {
    std::string name;
    Symbol symbol;
};

/// The fixed evaluation matrix: white noise, three AR(1) widths, two
/// band-limited widths, one two-line spectrum.
inline std::vector<Family> acceptance_families() {
    return {
        {"white", Symbol::white()},
        {"ar1_0.3", Symbol::ar1(0.3)},
        {"ar1_0.5", Symbol::ar1(0.5)},
        {"ar1_0.9", Symbol::ar1(0.9)},
        {"bandlimited_pi8", Symbol::bandlimited(M_PI / 8)},
        {"bandlimited_pi4", Symbol::bandlimited(M_PI / 4)},
        {"twoline", Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}})},
    };
}

namespace detail {

struct FamilyData {
    Family family;
    CovarianceSequence cov;
    std::vector<std::size_t> windows;
    std::vector<Matrix> dense;            // per window
    std::vector<SpectrumResult> spectra;  // per window
};

inline std::vector<FamilyData> prepare(const std::vector<std::size_t>& windows) {
    std::vector<FamilyData> out;
    const std::size_t max_window = *std::max_element(windows.begin(), windows.end());
    for (const auto& fam : acceptance_families()) {
        FamilyData data;
        data.family = fam;
        data.cov = covariance_from_symbol(fam.symbol, max_window - 1);
        data.windows = windows;
        for (std::size_t n : windows) {
            data.dense.push_back(truncate(data.cov, n).dense());
            data.spectra.push_back(eigendecompose(data.dense.back()));
        }
        out.push_back(std::move(data));
    }
    return out;
}

/// Random rank-n candidate map M = X Y with Gaussian factors.
inline Matrix random_rank_n(std::size_t dim, std::size_t rank, std::uint64_t seed,
                            std::uint64_t stream) {
    NormalStream gen(seed, stream);
    Matrix x(dim, rank), y(rank, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < rank; ++k) x(i, k) = gen.next();
    for (std::size_t k = 0; k < rank; ++k)
        for (std::size_t j = 0; j < dim; ++j) y(k, j) = gen.next();
    return x * y;
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

// ------------------------------------------------------------- criterion 1/2

/// Reduction error equals the independently evaluated trace form, no random
/// rank-n competitor beats it, and the optimal map leaves its residual
/// uncorrelated with the approximation.
inline void check_optimality(const std::vector<detail::FamilyData>& data,
                             const std::vector<std::size_t>& windows, std::uint64_t seed,
                             const std::string& outdir, CriterionResult& optimality,
                             CriterionResult& orthogonality) {
    std::string table = "family,N,n,error,trace_error,competitor_min,orthogonality_residual\n";
    double worst_error_dev = 0.0;
    double worst_margin = 1e300;
    double worst_orth = 0.0;
    std::uint64_t stream = 1;
    for (const auto& fd : data) {
        for (std::size_t wi = 0; wi < windows.size(); ++wi) {
            const std::size_t window = windows[wi];
            const Matrix& sigma = fd.dense[wi];
            const auto& spec = fd.spectra[wi];
            const double tr = trace(sigma);
            for (std::size_t n = 1; n < window; ++n) {
                const auto approx = optimal_approximator(spec, n);
                const double trace_error = approximation_error_of(sigma, approx.projector);
                const double dev = std::abs(approx.error - trace_error) / tr;
                worst_error_dev = std::max(worst_error_dev, dev);
                if (dev > 1e-9) optimality.passed = false;

                double competitor_min = 1e300;
                for (int c = 0; c < 100; ++c) {
                    const Matrix m = detail::random_rank_n(window, n, seed, stream++);
                    competitor_min =
                        std::min(competitor_min, approximation_error_of(sigma, m));
                }
                const double margin = competitor_min - approx.error;
                worst_margin = std::min(worst_margin, margin);
                if (margin < -1e-10 * std::max(1.0, tr)) optimality.passed = false;

                const Matrix ms = approx.projector * sigma;
                const double orth =
                    frobenius_distance(ms, ms * transpose(approx.projector)) /
                    frobenius_norm(sigma);
                worst_orth = std::max(worst_orth, orth);
                if (orth > 1e-9) orthogonality.passed = false;

                table += fd.family.name + "," + std::to_string(window) + "," +
                         std::to_string(n) + "," + detail::fmt(approx.error) + "," +
                         detail::fmt(trace_error) + "," + detail::fmt(competitor_min) + "," +
                         detail::fmt(orth) + "\n";
            }
        }
    }
    spit(outdir + "/optimality.csv", table);
    optimality.detail = "max |error - trace form| / tr = " + detail::fmt(worst_error_dev) +
                        ", min competitor margin = " + detail::fmt(worst_margin);
    orthogonality.detail = "max ||M S - M S M^T||_F / ||S||_F = " + detail::fmt(worst_orth);
}

// --------------------------------------------------------------- criterion 3

/// Each leading eigenvalue is nondecreasing in the window length, and for
/// AR(1) symbols the top eigenvalue stays below the density supremum.
inline CriterionResult check_eigenvalue_growth(const std::string& outdir) {
    CriterionResult result{"eigenvalue-growth-in-window", true, ""};
    const std::vector<std::size_t> windows = {8, 16, 32, 64, 128};
    std::string table = "family,N,k,lambda\n";
    double worst_drop = 0.0;
    double worst_sup_excess = -1e300;
    for (const auto& fam : acceptance_families()) {
        const auto cov = covariance_from_symbol(fam.symbol, windows.back() - 1);
        std::vector<std::vector<double>> tops;
        for (std::size_t n : windows) {
            const auto spec = eigendecompose(truncate(cov, n).dense());
            std::vector<double> top(spec.eigenvalues.begin(), spec.eigenvalues.begin() + 8);
            for (std::size_t k = 0; k < top.size(); ++k)
                table += fam.name + "," + std::to_string(n) + "," + std::to_string(k + 1) +
                         "," + detail::fmt(top[k]) + "\n";
            tops.push_back(std::move(top));
        }
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t i = 0; i + 1 < tops.size(); ++i) {
                const double drop = tops[i][k] - tops[i + 1][k];
                const double tol = 1e-10 * std::max(tops[i + 1][k], 1.0);
                worst_drop = std::max(worst_drop, drop);
                if (drop > tol) result.passed = false;
            }
        if (fam.symbol.family == SymbolFamily::ar1) {
            const double sup =
                fam.symbol.scale * (1.0 + fam.symbol.pole) / (1.0 - fam.symbol.pole);
            const double excess = tops.back()[0] - sup;
            worst_sup_excess = std::max(worst_sup_excess, excess);
            if (excess > 1e-8) result.passed = false;
        }
    }
    spit(outdir + "/weyl_tracks.csv", table);
    result.detail = "max eigenvalue drop = " + detail::fmt(worst_drop) +
                    ", max excess over density supremum = " + detail::fmt(worst_sup_excess);
    return result;
}

// --------------------------------------------------------------- criterion 4

/// Gap curves are nonnegative, nonincreasing in the rank, and vanish at full
/// rank, for a 20-element test bank per family and window.
inline CriterionResult check_gap_decay(const std::vector<detail::FamilyData>& data,
                                       std::uint64_t seed, const std::string& outdir) {
    CriterionResult result{"gap-decay-in-rank", true, ""};
    std::string table = "family,N,psi_id,n,gap\n";
    double worst_negative = 0.0;
    double worst_increase = 0.0;
    double worst_final = 0.0;
    for (const auto& fd : data) {
        for (std::size_t wi = 0; wi < fd.windows.size(); ++wi) {
            const std::size_t window = fd.windows[wi];
            const auto bank = make_test_bank(window, 20, seed);
            for (const auto& psi : bank) {
                ConvergenceCurve curve;
                try {
                    curve = convergence_sweep(fd.spectra[wi], psi);
                } catch (const AccuracyError& e) {
                    result.passed = false;
                    result.detail = e.what();
                    continue;
                }
                const double ref = std::max(curve.reference_qf, 1.0);
                for (std::size_t i = 0; i < curve.entries.size(); ++i) {
                    const double gap = curve.entries[i].second;
                    worst_negative = std::min(worst_negative, gap / ref);
                    if (gap < -1e-9 * ref) result.passed = false;
                    if (i > 0) {
                        const double up = (gap - curve.entries[i - 1].second) / ref;
                        worst_increase = std::max(worst_increase, up);
                        if (up > 1e-9) result.passed = false;
                    }
                    table += fd.family.name + "," + std::to_string(window) + "," + psi.id +
                             "," + std::to_string(curve.entries[i].first) + "," +
                             detail::fmt(gap) + "\n";
                }
                worst_final = std::max(worst_final, curve.entries.back().second / ref);
                if (curve.entries.back().second > 1e-9 * ref) result.passed = false;
            }
        }
    }
    spit(outdir + "/gap_curves.csv", table);
    if (result.detail.empty())
        result.detail = "min gap/ref = " + detail::fmt(worst_negative) +
                        ", max rank-increase = " + detail::fmt(worst_increase) +
                        ", max full-rank gap/ref = " + detail::fmt(worst_final);
    return result;
}

// --------------------------------------------------------------- criterion 5

/// Time-domain quadratic forms match their frequency-domain counterparts:
/// quadrature-limited for density symbols, exact sums for line spectra.
inline CriterionResult check_time_frequency_agreement(std::uint64_t seed,
                                                      const std::string& outdir) {
    CriterionResult result{"time-frequency-agreement", true, ""};
    std::string table = "family,N,psi_id,time_qf,freq_qf,residual\n";
    double worst_density = 0.0;
    double worst_line = 0.0;
    for (const auto& fam : acceptance_families()) {
        const bool line = fam.symbol.is_line_spectral();
        for (std::size_t window : {std::size_t{8}, std::size_t{32}}) {
            const auto cov = covariance_from_symbol(fam.symbol, window - 1);
            const auto trunc = truncate(cov, window);
            for (const auto& psi : make_test_bank(window, 20, seed)) {
                const double time_qf = quadratic_form(trunc, psi);
                const double freq_qf = spectral_quadratic_form(fam.symbol, psi);
                const double residual =
                    std::abs(time_qf - freq_qf) /
                    std::max({std::abs(time_qf), std::abs(freq_qf), 1.0});
                table += fam.name + "," + std::to_string(window) + "," + psi.id + "," +
                         detail::fmt(time_qf) + "," + detail::fmt(freq_qf) + "," +
                         detail::fmt(residual) + "\n";
                if (line) {
                    worst_line = std::max(worst_line, residual);
                    if (residual > 1e-10) result.passed = false;
                } else {
                    worst_density = std::max(worst_density, residual);
                    if (residual > 1e-6) result.passed = false;
                }
            }
        }
    }
    spit(outdir + "/parseval.csv", table);
    result.detail = "max density residual = " + detail::fmt(worst_density) +
                    ", max line residual = " + detail::fmt(worst_line);
    return result;
}

// --------------------------------------------------------------- criterion 6

/// Line-spectral generators are recovered exactly: orthogonal dynamics,
/// observable readout, generator frequencies, and the generating covariance
/// far beyond the construction window.
inline CriterionResult check_line_recovery(const std::string& outdir) {
    CriterionResult result{"line-recovery", true, ""};
    struct Case {
        std::string name;
        Symbol symbol;
        std::size_t rank;
        std::size_t window;
    };
    const std::vector<Case> cases = {
        {"constant", Symbol::line_spectral({{0.0, 1.0}}), 1, 4},
        {"nyquist", Symbol::line_spectral({{M_PI, 0.7}}), 1, 4},
        {"cosine", Symbol::line_spectral({{2.0 * M_PI / 8.0, 1.0}}), 2, 8},
        {"twoline", Symbol::line_spectral({{M_PI / 5, 2.0}, {M_PI / 3, 1.0}}), 4, 16},
        {"dc_plus_line", Symbol::line_spectral({{0.0, 1.0}, {1.0, 0.5}}), 3, 12},
        {"threeline", Symbol::line_spectral({{0.5, 1.0}, {1.2, 0.7}, {2.5, 1.5}}), 6, 24},
        {"dc_line_nyquist", Symbol::line_spectral({{0.0, 0.5}, {1.1, 1.0}, {M_PI, 0.25}}), 4, 16},
    };
    nlohmann::json artifacts = nlohmann::json::array();
    double worst_freq = 0.0;
    double worst_cov = 0.0;
    double worst_unitarity = 0.0;
    for (const auto& c : cases) {
        const std::size_t horizon = 4 * c.window;
        const auto cov = covariance_from_symbol(c.symbol, horizon);
        const auto spec = eigendecompose(truncate(cov, c.window).dense());
        const auto approx = optimal_approximator(spec, c.rank);
        const auto model = stationary_extension(approx);
        const auto lines = line_spectrum(model);

        worst_unitarity = std::max(worst_unitarity, model.orthogonality_residual);
        if (model.orthogonality_residual > 1e-10) result.passed = false;
        if (model.observability_sv <= 1e-8 * norm2(model.readout)) result.passed = false;

        double freq_dev = 1e300;
        if (lines.lines.size() == c.symbol.lines.size()) {
            auto want = c.symbol.lines;
            std::sort(want.begin(), want.end(),
                      [](const SpectralLine& a, const SpectralLine& b) {
                          return a.theta < b.theta;
                      });
            freq_dev = 0.0;
            for (std::size_t i = 0; i < want.size(); ++i)
                freq_dev = std::max(freq_dev,
                                    std::abs(want[i].theta - lines.lines[i].theta));
        }
        worst_freq = std::max(worst_freq, freq_dev);
        if (!(freq_dev <= 1e-6)) result.passed = false;

        double cov_dev = 0.0;
        for (std::size_t tau = 0; tau <= horizon; ++tau)
            cov_dev = std::max(cov_dev, std::abs(extend_covariance(model, tau) -
                                                 cov.values[tau]));
        cov_dev /= cov.values[0];
        worst_cov = std::max(worst_cov, cov_dev);
        if (cov_dev > 1e-6) result.passed = false;

        nlohmann::json entry;
        entry["case"] = c.name;
        entry["rank"] = c.rank;
        entry["window"] = c.window;
        entry["unitarity_residual"] = model.orthogonality_residual;
        entry["observability_sv"] = model.observability_sv;
        entry["frequency_deviation"] = freq_dev;
        entry["covariance_deviation"] = cov_dev;
        nlohmann::json freq = nlohmann::json::array(), pow = nlohmann::json::array();
        for (const auto& l : lines.lines) {
            freq.push_back(l.theta);
            pow.push_back(l.power);
        }
        entry["frequencies"] = freq;
        entry["powers"] = pow;
        artifacts.push_back(entry);
    }
    spit(outdir + "/line_recovery.json", artifacts.dump(2) + "\n");
    result.detail = "max frequency dev = " + detail::fmt(worst_freq) +
                    ", max covariance dev = " + detail::fmt(worst_cov) +
                    ", max unitarity residual = " + detail::fmt(worst_unitarity);
    return result;
}

// --------------------------------------------------------------- criterion 7

/// Band-limited quarter-circle symbol at window 128 concentrates on about a
/// quarter of the window: threshold-0.5 effective rank lands on 32 +/- 3.
inline CriterionResult check_bandlimited_plunge(const std::string& outdir) {
    CriterionResult result{"bandlimited-plunge", true, ""};
    const auto cov = covariance_from_symbol(Symbol::bandlimited(M_PI / 4), 127);
    const auto spec = eigendecompose(truncate(cov, 128).dense());
    std::string table = "k,lambda\n";
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
        table += std::to_string(k + 1) + "," + detail::fmt(spec.eigenvalues[k]) + "\n";
    spit(outdir + "/bandlimited_spectrum_N128.csv", table);
    const std::size_t rank = effective_rank(spec, 0.5);
    result.passed = rank >= 29 && rank <= 35;
    result.detail = "effective rank at threshold 0.5 = " + std::to_string(rank) +
                    " (expected 32 +/- 3)";
    return result;
}

// --------------------------------------------------------------- criterion 8

/// Monte Carlo estimates agree with the analytic gaps within three standard
/// errors (one doubled-count retry allowed) and the sampled cross-covariance
/// of residual and approximation sits inside the 5-sigma envelope.
inline CriterionResult check_monte_carlo(std::uint64_t seed, const std::string& outdir) {
    CriterionResult result{"monte-carlo-consistency", true, ""};
    const std::vector<std::size_t> windows = {4, 8, 16};
    const std::size_t count = 100000;
    std::string table =
        "family,N,n,psi_id,gap,estimate,std_error,retried,orth_residual,orth_envelope\n";
    double worst_sigma = 0.0;
    double worst_orth_ratio = 0.0;
    std::uint64_t config = 0;
    for (const auto& fam : acceptance_families()) {
        const auto cov = covariance_from_symbol(fam.symbol, windows.back() - 1);
        for (std::size_t window : windows) {
            const Matrix sigma = truncate(cov, window).dense();
            const auto spec = eigendecompose(sigma);
            const std::uint64_t batch_seed = seed + 0x1000 * (++config);
            PathBatch batch = sample_paths(spec, count, batch_seed);
            PathBatch doubled;  // generated lazily on first retry
            const auto bank = make_test_bank(window, 20, seed);
            std::vector<TestFunction> tests = {bank[0]};  // e0
            for (const auto& f : bank)
                if (f.id == "rnd0") tests.push_back(f);
            for (std::size_t n = 1; n < window; ++n) {
                const auto approx = optimal_approximator(spec, n);
                for (const auto& psi : tests) {
                    const double gap = weak_gap(spec, sigma, n, psi);
                    // a pure round-off floor so vanished gaps with vanished
                    // standard errors do not divide out to noise
                    const double slack = 1e-12 * std::max(quadratic_form(sigma, psi), 1.0);
                    auto sigmas = [&](const McEstimate& e) {
                        const double excess = std::abs(e.estimate - gap) - slack;
                        if (excess <= 0.0) return 0.0;
                        return e.std_error > 0.0 ? excess / e.std_error : 1e300;
                    };
                    McEstimate est = mc_weak_error(batch, approx.projector, psi);
                    bool retried = false;
                    double dev_sigma = sigmas(est);
                    if (dev_sigma > 3.0) {
                        retried = true;
                        if (doubled.count == 0)
                            doubled = sample_paths(spec, 2 * count, batch_seed);
                        est = mc_weak_error(doubled, approx.projector, psi);
                        dev_sigma = sigmas(est);
                    }
                    worst_sigma = std::max(worst_sigma, dev_sigma);
                    if (dev_sigma > 3.0) result.passed = false;

                    table += fam.name + "," + std::to_string(window) + "," +
                             std::to_string(n) + "," + psi.id + "," + detail::fmt(gap) + "," +
                             detail::fmt(est.estimate) + "," + detail::fmt(est.std_error) +
                             "," + (retried ? "1" : "0");
                    if (&psi == &tests.front()) {
                        const double orth = mc_orthogonality(batch, approx.projector);
                        const double envelope =
                            5.0 * spec.eigenvalues.front() / std::sqrt(double(count));
                        worst_orth_ratio = std::max(worst_orth_ratio, orth / envelope);
                        if (orth > envelope) result.passed = false;
                        table += "," + detail::fmt(orth) + "," + detail::fmt(envelope) + "\n";
                    } else {
                        table += ",,\n";
                    }
                }
            }
        }
    }
    spit(outdir + "/monte_carlo.csv", table);
    result.detail = "max |estimate - gap| in standard errors = " + detail::fmt(worst_sigma) +
                    ", max orthogonality residual / envelope = " +
                    detail::fmt(worst_orth_ratio);
    return result;
}

// ----------------------------------------------------------------- orchestra

inline std::string summary_text(const Report& report) {
    std::string out;
    for (const auto& c : report.criteria)
        out += std::string(c.passed ? "PASS" : "FAIL") + " " + c.name + ": " + c.detail + "\n";
    return out;
}

/// One full pass over criteria 1-8, artifacts written under outdir.
inline Report run_once(const std::string& outdir, std::uint64_t seed = kDefaultSeed) {
    std::filesystem::create_directories(outdir);
    Report report;
    const std::vector<std::size_t> windows = {4, 8, 16, 32};
    const auto data = detail::prepare(windows);

    CriterionResult optimality{"rank-reduction-optimality", true, ""};
    CriterionResult orthogonality{"projection-orthogonality", true, ""};
    check_optimality(data, windows, seed, outdir, optimality, orthogonality);
    report.criteria.push_back(optimality);
    report.criteria.push_back(orthogonality);
    report.criteria.push_back(check_eigenvalue_growth(outdir));
    {
        const std::vector<std::size_t> gap_windows = {4, 8, 16, 32, 64};
        const auto gap_data = detail::prepare(gap_windows);
        report.criteria.push_back(check_gap_decay(gap_data, seed, outdir));
    }
    report.criteria.push_back(check_time_frequency_agreement(seed, outdir));
    report.criteria.push_back(check_line_recovery(outdir));
    report.criteria.push_back(check_bandlimited_plunge(outdir));
    report.criteria.push_back(check_monte_carlo(seed, outdir));
    spit(outdir + "/summary.txt", summary_text(report));
    return report;
}

/// Byte-for-byte comparison of two directory trees (regular files only).
inline bool trees_identical(const std::string& a, const std::string& b, std::string& mismatch) {
    namespace fs = std::filesystem;
    auto listing = [](const std::string& root) {
        std::vector<std::string> names;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file())
                names.push_back(fs::relative(e.path(), root).string());
        std::sort(names.begin(), names.end());
        return names;
    };
    const auto la = listing(a), lb = listing(b);
    if (la != lb) {
        mismatch = "file lists differ";
        return false;
    }
    for (const auto& name : la) {
        if (slurp(a + "/" + name) != slurp(b + "/" + name)) {
            mismatch = name;
            return false;
        }
    }
    return true;
}

/// The complete suite: criteria 1-8 twice into run1/ and run2/, then the
/// determinism criterion compares the two trees. The top-level summary
/// carries one line per criterion.
inline Report run(const std::string& outdir, std::uint64_t seed = kDefaultSeed) {
    std::filesystem::create_directories(outdir);
    Report report = run_once(outdir + "/run1", seed);
    run_once(outdir + "/run2", seed);

    CriterionResult determinism{"output-determinism", true, ""};
    std::string mismatch;
    determinism.passed = trees_identical(outdir + "/run1", outdir + "/run2", mismatch);
    determinism.detail = determinism.passed
                             ? "two runs produced byte-identical artifacts"
                             : "runs differ at " + mismatch;
    report.criteria.push_back(determinism);
    spit(outdir + "/summary.txt", summary_text(report));
    return report;
}

}  // namespace toepca::repro
