#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toepca/cli.hpp"
#include "toepca/io.hpp"

using namespace toepca;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("toepca_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("symbol spec parsing") {
    CHECK(cli::parse_symbol_spec("white").family == SymbolFamily::white);
    CHECK(cli::parse_symbol_spec("white:scale=2").scale == 2.0);
    const auto ar = cli::parse_symbol_spec("ar1:rho=0.5");
    CHECK(ar.family == SymbolFamily::ar1);
    CHECK(ar.pole == 0.5);
    const auto bl = cli::parse_symbol_spec("bandlimited:W=0.7854,scale=3");
    CHECK(bl.half_bandwidth == 0.7854);
    CHECK(bl.scale == 3.0);
    const auto lines = cli::parse_symbol_spec("lines:(0.7854,1),(1.0472,2)");
    REQUIRE(lines.lines.size() == 2);
    CHECK(lines.lines[0].theta == 0.7854);
    CHECK(lines.lines[1].power == 2.0);

    CHECK_THROWS_AS(cli::parse_symbol_spec("ar1"), ValidationError);
    CHECK_THROWS_AS(cli::parse_symbol_spec("ar1:rho=1.5"), ValidationError);
    CHECK_THROWS_AS(cli::parse_symbol_spec("gaussian:w=1"), ValidationError);
    CHECK_THROWS_AS(cli::parse_symbol_spec("lines:(0.5)"), ValidationError);
    CHECK_THROWS_AS(cli::parse_symbol_spec("white:junk"), ValidationError);
}

TEST_CASE("config validation failures exit with code 2") {
    cli::ExperimentConfig cfg;
    cfg.windows = {4};
    CHECK(cli::run("spectrum", cfg) == 2);  // no source

    cfg.symbol = Symbol::ar1(0.5);
    cfg.covariance_path = "also_given.csv";
    CHECK(cli::run("spectrum", cfg) == 2);  // two sources

    cfg.covariance_path.reset();
    cfg.windows.clear();
    CHECK(cli::run("spectrum", cfg) == 2);  // no windows

    cfg.windows = {4};
    cfg.ranks = {9};
    CHECK(cli::run("approx", cfg) == 2);  // rank exceeds window

    cfg.ranks.clear();
    CHECK(cli::run("bogus", cfg) == 2);  // unknown subcommand
}

TEST_CASE("spectrum subcommand writes tables and tracks") {
    TempDir dir("spectrum");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("bandlimited:W=0.7854");
    cfg.windows = {16, 32};
    cfg.outdir = dir.str();
    REQUIRE(cli::run("spectrum", cfg) == 0);

    const auto table = read_file(dir.path / "spectrum_N32.csv");
    CHECK(table.rfind("k,lambda\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 33);  // header + 32 rows
    CHECK(fs::exists(dir.path / "spectrum_N16.csv"));
    CHECK(fs::exists(dir.path / "weyl_track.csv"));
    CHECK(fs::exists(dir.path / "effective_rank.csv"));
}

TEST_CASE("approx subcommand reports the 2x2 closed form") {
    TempDir dir("approx");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("ar1:rho=0.5");
    cfg.windows = {2};
    cfg.ranks = {1};
    cfg.outdir = dir.str();
    REQUIRE(cli::run("approx", cfg) == 0);
    const auto j = nlohmann::json::parse(read_file(dir.path / "approx_N2_n1.json"));
    CHECK(j["schema"] == "toepca.approx/1");
    CHECK(std::abs(j["error"].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(j["trace"].get<double>() - 2.0) < 1e-12);
}

TEST_CASE("realize subcommand emits frequencies and the extended covariance") {
    TempDir dir("realize");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("lines:(0.7853981633974483,1)");
    cfg.windows = {8};
    cfg.ranks = {2};
    cfg.outdir = dir.str();
    REQUIRE(cli::run("realize", cfg) == 0);
    const auto j = nlohmann::json::parse(read_file(dir.path / "realize_N8_n2.json"));
    REQUIRE(j["frequencies"].size() == 1);
    CHECK(std::abs(j["frequencies"][0].get<double>() - M_PI / 4) < 1e-6);
    CHECK(j["orthogonality_residual"].get<double>() < 1e-10);
    const auto table = read_file(dir.path / "extended_cov_N8_n2.csv");
    CHECK(table.rfind("tau,sigma_hat\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 34);  // header + 0..32
}

TEST_CASE("converge subcommand zeroes the gap column beyond the process rank") {
    TempDir dir("converge");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("lines:(0.7853981633974483,1)");
    cfg.windows = {8};
    cfg.rank_sweep = true;
    cfg.psi_count = 5;
    cfg.outdir = dir.str();
    REQUIRE(cli::run("converge", cfg) == 0);
    std::istringstream table(read_file(dir.path / "converge_N8.csv"));
    std::string line;
    std::getline(table, line);
    CHECK(line == "n,psi_id,gap,sigma_qf,sigma_qf_freq,sigmahat_qf,sigmahat_qf_freq");
    std::size_t rows = 0;
    while (std::getline(table, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string n_str, psi_id, gap_str;
        std::getline(fields, n_str, ',');
        std::getline(fields, psi_id, ',');
        std::getline(fields, gap_str, ',');
        if (std::stoul(n_str) >= 2) CHECK(std::abs(std::stod(gap_str)) <= 1e-9);
    }
    CHECK(rows == 8 * 5);
    // covariance-only sources cannot produce the frequency columns
    cli::ExperimentConfig no_freq;
    no_freq.covariance_path = "unused.csv";
    no_freq.windows = {4};
    CHECK(cli::run("converge", no_freq) == 2);
}

TEST_CASE("sample subcommand writes paths and an MC report") {
    TempDir dir("sample");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("ar1:rho=0.5");
    cfg.windows = {4};
    cfg.ranks = {2};
    cfg.sample_count = 200;
    cfg.outdir = dir.str();
    REQUIRE(cli::run("sample", cfg) == 0);
    const auto paths = read_file(dir.path / "paths_N4.csv");
    CHECK(std::count(paths.begin(), paths.end(), '\n') == 200);
    const auto j = nlohmann::json::parse(read_file(dir.path / "mc_report_N4.json"));
    CHECK(j["generator_id"] == kGeneratorId);
    CHECK(j["count"] == 200);
    REQUIRE(j["weak_error"].size() == 1);
    CHECK(j["weak_error"][0]["rank"] == 2);
}

TEST_CASE("covariance CSV sources feed the pipeline") {
    TempDir dir("covsrc");
    CovarianceSequence cov;
    cov.values = {1.0, 0.5, 0.25, 0.125};
    const auto cov_path = dir.path / "cov.csv";
    save_covariance(cov_path.string(), cov);

    cli::ExperimentConfig cfg;
    cfg.covariance_path = cov_path.string();
    cfg.windows = {4};
    cfg.outdir = dir.str();
    REQUIRE(cli::run("spectrum", cfg) == 0);
    CHECK(fs::exists(dir.path / "spectrum_N4.csv"));

    cfg.windows = {8};  // more lags than the file stores
    CHECK(cli::run("spectrum", cfg) == 2);
}

TEST_CASE("identical configs produce byte-identical outputs") {
    TempDir dir1("det1");
    TempDir dir2("det2");
    for (const auto* out : {&dir1, &dir2}) {
        cli::ExperimentConfig cfg;
        cfg.symbol = cli::parse_symbol_spec("bandlimited:W=0.3926990816987241");
        cfg.windows = {16};
        cfg.rank_sweep = true;
        cfg.psi_count = 8;
        cfg.sample_count = 300;
        cfg.outdir = out->str();
        REQUIRE(cli::run("converge", cfg) == 0);
        REQUIRE(cli::run("sample", cfg) == 0);
        REQUIRE(cli::run("realize", cfg) == 0);
    }
    for (const auto* name :
         {"converge_N16.csv", "paths_N16.csv", "mc_report_N16.json", "realize_N16_n2.json",
          "extended_cov_N16_n4.csv"})
        CHECK(read_file(dir1.path / name) == read_file(dir2.path / name));
}

TEST_CASE("timestamp header is opt-in") {
    TempDir dir("stamp");
    cli::ExperimentConfig cfg;
    cfg.symbol = cli::parse_symbol_spec("white");
    cfg.windows = {4};
    cfg.outdir = dir.str();
    REQUIRE(cli::run("spectrum", cfg) == 0);
    CHECK(read_file(dir.path / "spectrum_N4.csv").rfind("k,lambda\n", 0) == 0);
    cfg.timestamp = true;
    REQUIRE(cli::run("spectrum", cfg) == 0);
    CHECK(read_file(dir.path / "spectrum_N4.csv").rfind("# generated ", 0) == 0);
}
