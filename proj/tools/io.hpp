#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bregquant/bregquant.hpp"

namespace bregquant::cli {

/// 12 significant digits, '.' decimal: below every acceptance tolerance, so
/// regenerated files diff clean.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CodebookRow {
    std::size_t index;
    double code;
    double cut_left;
    double cut_right;
    double mass;
    double cond_mean;
    double residual;
};

/// Per-cell statistics for the export: mass and conditional mean of each
/// cell, plus the distance from the code to its own fixed-point target
/// (the plain mean at r = 2, the weighted mean above).
inline std::vector<CodebookRow> codebook_rows(const BregmanFunction& fn, const Density1D& d,
                                              const Codebook1D& cb, const CellBoundaries& cuts,
                                              double r, const QuadratureConfig& q) {
    std::vector<CodebookRow> rows;
    rows.reserve(cb.codes.size());
    for (std::size_t i = 0; i < cb.codes.size(); ++i) {
        const double lo = cuts.cuts[i];
        const double hi = cuts.cuts[i + 1];
        const auto [mass, mom] = cell_moments(d, q, lo, hi);
        const double cond = mass > 0.0 ? mom / mass
                                       : std::numeric_limits<double>::quiet_NaN();
        double target = cond;
        if (r > 2.0) {
            const auto [wm, wmom] = weighted_cell_moments(d, q, fn, cb.codes[i], r, lo, hi);
            target = wm > 0.0 ? wmom / wm : std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back({i, cb.codes[i], lo, hi, mass, cond, std::abs(cb.codes[i] - target)});
    }
    return rows;
}

inline void write_codebook_csv(const std::string& path, const std::vector<CodebookRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "index,code,cut_left,cut_right,mass,cond_mean,residual\n";
    for (const auto& r : rows)
        out << r.index << ',' << num(r.code) << ',' << num(r.cut_left) << ',' << num(r.cut_right)
            << ',' << num(r.mass) << ',' << num(r.cond_mean) << ',' << num(r.residual) << '\n';
}

/// Reads the code column back out of a codebook export (or any CSV whose
/// header names a "code" column).
inline std::vector<double> read_codebook_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    std::size_t code_col = std::string::npos;
    {
        std::stringstream header(line);
        std::string field;
        for (std::size_t c = 0; std::getline(header, field, ','); ++c)
            if (field == "code") code_col = c;
    }
    if (code_col == std::string::npos) throw ConfigError(path + ": no 'code' column");
    std::vector<double> codes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string field;
        bool found = false;
        for (std::size_t c = 0; std::getline(row, field, ','); ++c)
            if (c == code_col) {
                try {
                    codes.push_back(std::stod(field));
                } catch (const std::exception&) {
                    throw ConfigError(path + ": bad number '" + field + "'");
                }
                found = true;
            }
        if (!found) throw ConfigError(path + ": short row");
    }
    if (codes.empty()) throw ConfigError(path + ": no data rows");
    return codes;
}

inline void write_reconstruction_csv(const std::string& path,
                                     const std::vector<CodebookRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "code,density\n";
    for (const auto& r : rows) {
        const double width = r.cut_right - r.cut_left;
        const double density = std::isfinite(width) && width > 0.0 ? r.mass / width : 0.0;
        out << num(r.code) << ',' << num(density) << '\n';
    }
}

inline void write_codes2d_csv(const std::string& path, const Codebook2D& cb,
                              const Assignment2D& a) {
    std::vector<std::size_t> count(cb.codes.size(), 0);
    for (std::size_t idx : a.index) ++count[idx];
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "index,x,y,count\n";
    for (std::size_t i = 0; i < cb.codes.size(); ++i)
        out << i << ',' << num(cb.codes[i][0]) << ',' << num(cb.codes[i][1]) << ',' << count[i]
            << '\n';
}

inline void write_assignments_csv(const std::string& path, const SampleSet2D& s,
                                  const Assignment2D& a) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "sample,x,y,code\n";
    for (std::size_t i = 0; i < s.points.size(); ++i)
        out << i << ',' << num(s.points[i][0]) << ',' << num(s.points[i][1]) << ','
            << a.index[i] << '\n';
}

inline nlohmann::json verification_json(const VerificationReport& v) {
    nlohmann::json j;
    j["stationarity_sup_residual"] = v.stationarity_sup_residual;
    j["pythagoras_gap"] = v.pythagoras_gap;
    j["trushkin"] = {{"unique_guaranteed", v.trushkin.unique_guaranteed},
                     {"verdict", to_string(v.trushkin)}};
    j["line_sums"] = v.line_sums;
    j["eigen_min"] = v.eigen_min;
    j["gershgorin"] = v.gershgorin;
    j["symmetry_defect"] = v.symmetry_defect;
    j["psi_max"] = v.psi_max;
    return j;
}

inline nlohmann::json trace_json(const RunTrace& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"distortion", s.distortion},
                         {"sup_step", s.sup_step},
                         {"sup_residual", s.sup_residual}});
    return {{"converged", t.converged}, {"iterations", t.iterations}, {"steps", steps}};
}

inline nlohmann::json trace2d_json(const RunTrace2D& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"distortion", s.distortion}, {"reseeded", s.reseeded}});
    return {{"converged", t.converged}, {"iterations", t.iterations}, {"steps", steps}};
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace bregquant::cli
