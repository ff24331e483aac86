#pragma once

// Experiment front-end shared by the command-line tool and the tests:
// a validated configuration, a symbol mini-language for flags, and the
// subcommand runners that write the CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 failed numeric assertion, 2 configuration error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toepca/converge.hpp"
#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/io.hpp"
#include "toepca/pca.hpp"
#include "toepca/realize.hpp"
#include "toepca/repro.hpp"
#include "toepca/sample.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"

namespace toepca::cli {

struct ExperimentConfig {
    std::optional<Symbol> symbol;
    std::optional<std::string> covariance_path;
    std::vector<std::size_t> windows;   // --N
    std::vector<std::size_t> ranks;     // --n
    bool rank_sweep = false;            // --n-sweep
    double threshold = 0.5;             // effective-rank threshold
    std::size_t psi_count = 20;         // test bank size
    std::size_t sample_count = 10000;
    std::uint64_t seed = 1729;
    std::string outdir = ".";
    bool timestamp = false;
    bool dump_reduced = false;
    QuadratureSpec quad;
    bool allow_large_tau = false;

    void validate() const {
        if (symbol.has_value() == covariance_path.has_value())
            throw ValidationError("config: exactly one of symbol / covariance source required");
        if (windows.empty())
            throw ValidationError("config: at least one window length (--N) required");
        for (std::size_t n : windows)
            if (n < 1) throw ValidationError("config: window lengths must be >= 1");
        if (rank_sweep && !ranks.empty())
            throw ValidationError("config: --n and --n-sweep are mutually exclusive");
        for (std::size_t r : ranks)
            for (std::size_t n : windows)
                if (r > n)
                    throw ValidationError("config: rank " + std::to_string(r) +
                                          " exceeds window " + std::to_string(n));
        if (psi_count < 1) throw ValidationError("config: psi bank must not be empty");
    }
};

/// Parse "family:key=value,..." symbol specs used on the command line, e.g.
/// "white", "ar1:rho=0.5", "bandlimited:W=0.7854,scale=2",
/// "lines:(0.7854,1),(1.0472,2)". Piecewise symbols come in as JSON files.
inline Symbol parse_symbol_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);

    // split on commas outside parentheses
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char ch : params) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);

    double scale = 1.0;
    std::vector<std::pair<std::string, std::string>> kv;
    std::vector<SpectralLine> lines;
    for (const auto& p : parts) {
        if (!p.empty() && p.front() == '(') {
            if (p.back() != ')')
                throw ValidationError("symbol spec: malformed line tuple '" + p + "'");
            const std::string inner = p.substr(1, p.size() - 2);
            const auto comma = inner.find(',');
            if (comma == std::string::npos)
                throw ValidationError("symbol spec: line tuple needs '(theta,power)'");
            lines.push_back({parse_double(inner.substr(0, comma), "symbol spec"),
                             parse_double(inner.substr(comma + 1), "symbol spec")});
            continue;
        }
        const auto eq = p.find('=');
        if (eq == std::string::npos)
            throw ValidationError("symbol spec: expected key=value, got '" + p + "'");
        kv.emplace_back(p.substr(0, eq), p.substr(eq + 1));
    }
    auto take = [&](const std::string& key) -> std::optional<double> {
        for (const auto& [k, v] : kv)
            if (k == key) return parse_double(v, "symbol spec");
        return std::nullopt;
    };
    if (auto s = take("scale")) scale = *s;

    if (family == "white") return Symbol::white(scale);
    if (family == "bandlimited") {
        const auto w = take("W") ? take("W") : take("w");
        if (!w) throw ValidationError("symbol spec: bandlimited needs W=<half bandwidth>");
        return Symbol::bandlimited(*w, scale);
    }
    if (family == "ar1") {
        const auto rho = take("rho");
        if (!rho) throw ValidationError("symbol spec: ar1 needs rho=<pole>");
        return Symbol::ar1(*rho, scale);
    }
    if (family == "lines") {
        if (lines.empty())
            throw ValidationError("symbol spec: lines needs at least one (theta,power) tuple");
        return Symbol::line_spectral(std::move(lines), scale);
    }
    throw ValidationError("symbol spec: unknown family '" + family +
                          "' (piecewise symbols load from JSON via --symbol-json)");
}

namespace detail {

inline CovarianceSequence resolve_covariance(const ExperimentConfig& cfg,
                                             std::size_t needed_tau_max) {
    if (cfg.symbol)
        return covariance_from_symbol(*cfg.symbol, needed_tau_max, cfg.quad,
                                      cfg.allow_large_tau);
    auto cov = load_covariance(*cfg.covariance_path);
    if (cov.tau_max() < needed_tau_max)
        throw ValidationError("config: covariance file stores lags up to " +
                              std::to_string(cov.tau_max()) + " but the experiment needs " +
                              std::to_string(needed_tau_max));
    return cov;
}

inline std::string stamp(const ExperimentConfig& cfg) {
    if (!cfg.timestamp) return "";
    const auto now = std::chrono::system_clock::now();
    return "# generated " +
           std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count()) +
           "\n";
}

inline std::vector<std::size_t> ranks_for(const ExperimentConfig& cfg, std::size_t window) {
    if (cfg.rank_sweep) {
        std::vector<std::size_t> out;
        for (std::size_t n = 1; n <= window; ++n) out.push_back(n);
        return out;
    }
    std::vector<std::size_t> out;
    for (std::size_t n : cfg.ranks)
        if (n <= window) out.push_back(n);
    return out;
}

inline std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.outdir);
    return cfg.outdir + "/" + name;
}

}  // namespace detail

inline void run_spectrum(const ExperimentConfig& cfg) {
    const std::size_t max_window = *std::max_element(cfg.windows.begin(), cfg.windows.end());
    const auto cov = detail::resolve_covariance(cfg, max_window - 1);
    std::vector<SpectrumResult> spectra;
    std::string ranks_csv = detail::stamp(cfg) + "N,threshold,effective_rank\n";
    for (std::size_t window : cfg.windows) {
        const auto spec = eigendecompose(truncate(cov, window).dense());
        std::string table = detail::stamp(cfg) + "k,lambda\n";
        for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
            table += std::to_string(k + 1) + "," + format_double(spec.eigenvalues[k]) + "\n";
        spit(detail::path_in(cfg, "spectrum_N" + std::to_string(window) + ".csv"), table);
        const std::size_t rank = effective_rank(spec, cfg.threshold);
        ranks_csv += std::to_string(window) + "," + format_double(cfg.threshold) + "," +
                     std::to_string(rank) + "\n";
        std::cout << "N=" << window << " effective_rank(threshold=" << cfg.threshold
                  << ")=" << rank << "\n";
        spectra.push_back(spec);
    }
    spit(detail::path_in(cfg, "effective_rank.csv"), ranks_csv);
    if (cfg.windows.size() > 1) {
        std::string track = detail::stamp(cfg) + "N,k,lambda\n";
        const std::size_t kmax = std::min<std::size_t>(
            8, *std::min_element(cfg.windows.begin(), cfg.windows.end()));
        for (std::size_t wi = 0; wi < cfg.windows.size(); ++wi)
            for (std::size_t k = 0; k < kmax; ++k)
                track += std::to_string(cfg.windows[wi]) + "," + std::to_string(k + 1) + "," +
                         format_double(spectra[wi].eigenvalues[k]) + "\n";
        spit(detail::path_in(cfg, "weyl_track.csv"), track);
    }
}

inline void run_approx(const ExperimentConfig& cfg) {
    const std::size_t max_window = *std::max_element(cfg.windows.begin(), cfg.windows.end());
    const auto cov = detail::resolve_covariance(cfg, max_window - 1);
    for (std::size_t window : cfg.windows) {
        const Matrix sigma = truncate(cov, window).dense();
        const auto spec = eigendecompose(sigma);
        for (std::size_t n : detail::ranks_for(cfg, window)) {
            const auto approx = optimal_approximator(spec, n);
            nlohmann::json j;
            j["schema"] = "toepca.approx/1";
            j["window"] = window;
            j["rank"] = n;
            j["error"] = approx.error;
            j["trace"] = trace(sigma);
            j["frobenius_gap"] = frobenius_distance(sigma, approx.reduced_covariance);
            j["degenerate_cut"] = approx.degenerate_cut;
            if (cfg.timestamp) j["generated"] = detail::stamp(cfg);
            const std::string tag = "N" + std::to_string(window) + "_n" + std::to_string(n);
            spit(detail::path_in(cfg, "approx_" + tag + ".json"), j.dump(2) + "\n");
            if (cfg.dump_reduced)
                spit(detail::path_in(cfg, "sigma_hat_" + tag + ".csv"),
                     detail::stamp(cfg) + matrix_to_csv(approx.reduced_covariance));
            std::cout << "N=" << window << " n=" << n << " error=" << format_double(approx.error)
                      << "\n";
        }
    }
}

inline void run_realize(const ExperimentConfig& cfg) {
    const std::size_t max_window = *std::max_element(cfg.windows.begin(), cfg.windows.end());
    const auto cov = detail::resolve_covariance(cfg, max_window - 1);
    for (std::size_t window : cfg.windows) {
        const auto spec = eigendecompose(truncate(cov, window).dense());
        for (std::size_t n : detail::ranks_for(cfg, window)) {
            if (n >= window) {
                if (cfg.rank_sweep) continue;  // extension needs window > rank
                throw ValidationError("realize: the extension needs window > rank; "
                                      "increase --N or lower --n");
            }
            const auto approx = optimal_approximator(spec, n);
            const std::size_t carried = carried_rank(spec, n);
            const auto model = stationary_extension(
                carried == n ? approx : optimal_approximator(spec, carried));
            const auto lines = line_spectrum(model);
            nlohmann::json j;
            j["schema"] = "toepca.realize/1";
            j["window"] = window;
            j["rank"] = n;
            j["carried_rank"] = carried;
            nlohmann::json freq = nlohmann::json::array(), pow = nlohmann::json::array();
            for (const auto& l : lines.lines) {
                freq.push_back(l.theta);
                pow.push_back(l.power);
            }
            j["frequencies"] = freq;
            j["powers"] = pow;
            j["orthogonality_residual"] = model.orthogonality_residual;
            j["observability_sv"] = model.observability_sv;
            j["stationarity_residual"] = model.stationarity_residual;
            j["shift_residual"] = model.shift_residual;
            j["toeplitz_defect"] = toeplitz_defect(approx.reduced_covariance);
            const std::string tag = "N" + std::to_string(window) + "_n" + std::to_string(n);
            spit(detail::path_in(cfg, "realize_" + tag + ".json"), j.dump(2) + "\n");
            std::string table = detail::stamp(cfg) + "tau,sigma_hat\n";
            for (std::size_t tau = 0; tau <= 4 * window; ++tau)
                table += std::to_string(tau) + "," +
                         format_double(extend_covariance(model, static_cast<long>(tau))) + "\n";
            spit(detail::path_in(cfg, "extended_cov_" + tag + ".csv"), table);
            std::cout << "N=" << window << " n=" << n << " lines=" << lines.lines.size()
                      << " toeplitz_defect="
                      << format_double(toeplitz_defect(approx.reduced_covariance)) << "\n";
        }
    }
}

inline void run_converge(const ExperimentConfig& cfg) {
    if (!cfg.symbol)
        throw ValidationError(
            "config: converge needs a symbol source for the frequency-domain forms");
    const std::size_t max_window = *std::max_element(cfg.windows.begin(), cfg.windows.end());
    const auto cov = detail::resolve_covariance(cfg, max_window - 1);
    for (std::size_t window : cfg.windows) {
        const Matrix sigma = truncate(cov, window).dense();
        const auto spec = eigendecompose(sigma);
        const auto bank = make_test_bank(window, cfg.psi_count, cfg.seed);
        std::vector<double> sigma_qf(bank.size()), sigma_qf_freq(bank.size());
        for (std::size_t b = 0; b < bank.size(); ++b) {
            sigma_qf[b] = quadratic_form(sigma, bank[b]);
            sigma_qf_freq[b] = spectral_quadratic_form(*cfg.symbol, bank[b], cfg.quad);
        }
        std::string table = detail::stamp(cfg) +
                            "n,psi_id,gap,sigma_qf,sigma_qf_freq,sigmahat_qf,sigmahat_qf_freq\n";
        for (std::size_t n : detail::ranks_for(cfg, window)) {
            const auto approx = optimal_approximator(spec, n);
            // at full rank the reduction is the window itself; otherwise
            // realize at the carried rank (zero modes hold no state)
            std::optional<LineSpectrum> lines;
            if (n < window) {
                const std::size_t carried = carried_rank(spec, n);
                lines = line_spectrum(stationary_extension(
                    carried == n ? approx : optimal_approximator(spec, carried)));
            }
            for (std::size_t b = 0; b < bank.size(); ++b) {
                const auto& psi = bank[b];
                const double gap = weak_gap(spec, sigma, n, psi);
                const double hat_qf = quadratic_form(approx.reduced_covariance, psi);
                const double hat_qf_freq =
                    lines ? spectral_quadratic_form(*lines, psi) : sigma_qf_freq[b];
                table += std::to_string(n) + "," + psi.id + "," + format_double(gap) + "," +
                         format_double(sigma_qf[b]) + "," + format_double(sigma_qf_freq[b]) +
                         "," + format_double(hat_qf) + "," + format_double(hat_qf_freq) + "\n";
            }
        }
        spit(detail::path_in(cfg, "converge_N" + std::to_string(window) + ".csv"), table);
        std::cout << "N=" << window << " wrote converge_N" << window << ".csv\n";
    }
}

inline void run_sample(const ExperimentConfig& cfg) {
    const std::size_t max_window = *std::max_element(cfg.windows.begin(), cfg.windows.end());
    const auto cov = detail::resolve_covariance(cfg, max_window - 1);
    for (std::size_t window : cfg.windows) {
        const Matrix sigma = truncate(cov, window).dense();
        const auto spec = eigendecompose(sigma);
        const auto batch = sample_paths(spec, cfg.sample_count, cfg.seed);
        std::string table = detail::stamp(cfg);
        for (std::size_t p = 0; p < batch.count; ++p) {
            for (std::size_t t = 0; t < batch.dim; ++t) {
                if (t) table += ",";
                table += format_double(batch(p, t));
            }
            table += "\n";
        }
        spit(detail::path_in(cfg, "paths_N" + std::to_string(window) + ".csv"), table);

        nlohmann::json j;
        j["schema"] = "toepca.sample/1";
        j["window"] = window;
        j["count"] = batch.count;
        j["seed"] = batch.seed;
        j["generator_id"] = batch.generator_id;
        double worst_var_dev = 0.0;
        for (std::size_t t = 0; t < window; ++t) {
            CompensatedSum acc;
            for (std::size_t p = 0; p < batch.count; ++p) {
                const double v = batch(p, t);
                acc.add(v * v);
            }
            worst_var_dev = std::max(
                worst_var_dev,
                std::abs(acc.value() / static_cast<double>(batch.count) - sigma(t, t)));
        }
        j["max_coordinate_variance_deviation"] = worst_var_dev;
        nlohmann::json per_rank = nlohmann::json::array();
        for (std::size_t n : detail::ranks_for(cfg, window)) {
            const auto approx = optimal_approximator(spec, n);
            TestFunction psi;
            psi.coefficients.assign(window, 0.0);
            psi.coefficients[0] = 1.0;
            psi.id = "e0";
            const auto est = mc_weak_error(batch, approx.projector, psi);
            nlohmann::json r;
            r["rank"] = n;
            r["psi_id"] = psi.id;
            r["analytic_gap"] = weak_gap(spec, sigma, n, psi);
            r["estimate"] = est.estimate;
            r["std_error"] = est.std_error;
            r["orthogonality_residual"] = mc_orthogonality(batch, approx.projector);
            per_rank.push_back(r);
        }
        j["weak_error"] = per_rank;
        spit(detail::path_in(cfg, "mc_report_N" + std::to_string(window) + ".json"),
             j.dump(2) + "\n");
        std::cout << "N=" << window << " sampled " << batch.count << " paths\n";
    }
}

/// Dispatch a subcommand; returns the process exit code.
inline int run(const std::string& subcommand, const ExperimentConfig& cfg) {
    try {
        if (subcommand == "repro") {
            const auto report = repro::run(cfg.outdir, cfg.seed);
            for (const auto& c : report.criteria)
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail
                          << "\n";
            return report.all_passed() ? 0 : 1;
        }
        cfg.validate();
        if (subcommand == "spectrum")
            run_spectrum(cfg);
        else if (subcommand == "approx")
            run_approx(cfg);
        else if (subcommand == "realize")
            run_realize(cfg);
        else if (subcommand == "converge")
            run_converge(cfg);
        else if (subcommand == "sample")
            run_sample(cfg);
        else
            throw ValidationError("unknown subcommand '" + subcommand + "'");
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace toepca::cli
