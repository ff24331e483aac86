#pragma once

// File formats: covariance CSV ("tau,sigma", lags ascending from 0), symbol
// JSON ({"family": ..., params, "scale": ...}), dense matrix CSV (one row per
// line). All floating-point output is shortest round-trip decimal.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/linalg.hpp"
#include "toepca/symbol.hpp"

namespace toepca {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": cannot parse number '" + s + "'");
    }
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
    if (!out) throw ValidationError("write failed: " + path);
}

// ---------------------------------------------------------------- covariance

inline std::string covariance_to_csv(const CovarianceSequence& cov) {
    std::string out = "tau,sigma\n";
    for (std::size_t tau = 0; tau < cov.values.size(); ++tau)
        out += std::to_string(tau) + "," + format_double(cov.values[tau]) + "\n";
    return out;
}

inline CovarianceSequence covariance_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    CovarianceSequence cov;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "tau,sigma")
                throw ValidationError("covariance CSV line 1: expected header 'tau,sigma'");
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("covariance CSV line " + std::to_string(line_no) +
                                  ": expected 'tau,sigma'");
        const std::string where = "covariance CSV line " + std::to_string(line_no);
        const double tau = parse_double(line.substr(0, comma), where);
        const double sigma = parse_double(line.substr(comma + 1), where);
        const std::size_t expected = cov.values.size();
        if (tau != static_cast<double>(expected))
            throw ValidationError(where + ": lag " + line.substr(0, comma) +
                                  " out of order, expected " + std::to_string(expected));
        if (!std::isfinite(sigma))
            throw ValidationError(where + ": non-finite value");
        cov.values.push_back(sigma);
    }
    cov.validate();
    return cov;
}

inline CovarianceSequence load_covariance(const std::string& path) {
    try {
        return covariance_from_csv(slurp(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline void save_covariance(const std::string& path, const CovarianceSequence& cov) {
    spit(path, covariance_to_csv(cov));
}

// -------------------------------------------------------------------- symbol

inline nlohmann::json symbol_to_json(const Symbol& s) {
    nlohmann::json j;
    j["family"] = family_name(s.family);
    j["scale"] = s.scale;
    switch (s.family) {
        case SymbolFamily::white:
            break;
        case SymbolFamily::bandlimited:
            j["half_bandwidth"] = s.half_bandwidth;
            break;
        case SymbolFamily::ar1:
            j["rho"] = s.pole;
            break;
        case SymbolFamily::lines: {
            nlohmann::json lines = nlohmann::json::array();
            for (const auto& l : s.lines) lines.push_back({{"theta", l.theta}, {"power", l.power}});
            j["lines"] = lines;
            break;
        }
        case SymbolFamily::piecewise:
            j["breakpoints"] = s.breakpoints;
            j["pieces"] = s.piece_coeffs;
            break;
    }
    return j;
}

inline Symbol symbol_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw ValidationError("symbol JSON: missing string field 'family'");
    const std::string family = j["family"].get<std::string>();
    const double scale = j.value("scale", 1.0);
    auto require = [&](const char* key) {
        if (!j.contains(key))
            throw ValidationError(std::string("symbol JSON: family '") + family +
                                  "' needs field '" + key + "'");
    };
    try {
        if (family == "white") return Symbol::white(scale);
        if (family == "bandlimited") {
            if (j.contains("half_bandwidth")) return Symbol::bandlimited(j["half_bandwidth"], scale);
            require("w");
            return Symbol::bandlimited(j["w"], scale);
        }
        if (family == "ar1") {
            require("rho");
            return Symbol::ar1(j["rho"], scale);
        }
        if (family == "lines") {
            require("lines");
            std::vector<SpectralLine> lines;
            for (const auto& l : j["lines"]) {
                if (l.is_array() && l.size() == 2)
                    lines.push_back({l[0].get<double>(), l[1].get<double>()});
                else if (l.is_object())
                    lines.push_back({l.at("theta").get<double>(), l.at("power").get<double>()});
                else
                    throw ValidationError("symbol JSON: malformed line entry");
            }
            return Symbol::line_spectral(std::move(lines), scale);
        }
        if (family == "piecewise") {
            require("breakpoints");
            require("pieces");
            return Symbol::piecewise(j["breakpoints"].get<std::vector<double>>(),
                                     j["pieces"].get<std::vector<std::vector<double>>>(), scale);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("symbol JSON: ") + e.what());
    }
    throw ValidationError("symbol JSON: unknown family '" + family + "'");
}

inline Symbol load_symbol(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    try {
        return symbol_from_json(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline void save_symbol(const std::string& path, const Symbol& s) {
    spit(path, symbol_to_json(s).dump(2) + "\n");
}

// -------------------------------------------------------------------- matrix

inline std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ",";
            out += format_double(m(i, j));
        }
        out += "\n";
    }
    return out;
}

}  // namespace toepca
