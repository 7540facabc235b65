// SPDX-License-Identifier: Apache-2.0
//
// CSV and JSON artifacts exchanged between pipeline stages. Every CSV starts
// with a "# format_version: N" line followed by a header row.

#ifndef MMTRACK_CSV_IO_HPP
#define MMTRACK_CSV_IO_HPP

#include "caf.hpp"
#include "iq_io.hpp"
#include "metrics.hpp"
#include "strokes.hpp"
#include "tracker.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mmtrack {

namespace detail {

inline std::string fmt_num(double v)
{
    if (std::isnan(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path), os_(path, std::ios::binary | std::ios::trunc)
    {
        if (!os_) throw IoError("cannot open " + path.string() + " for writing");
        os_ << "# format_version: " << kFormatVersion << '\n' << header << '\n';
    }

    template <typename... Cols>
    void row(const Cols&... cols)
    {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(cols), first = false), ...);
        os_ << '\n';
    }

    ~CsvWriter() noexcept(false)
    {
        os_.flush();
        if (!os_ && std::uncaught_exceptions() == 0) throw IoError("failed writing " + path_.string());
    }

private:
    static std::string cell(double v) { return fmt_num(v); }
    static std::string cell(const std::string& s) { return s; }

    std::filesystem::path path_;
    std::ofstream os_;
};

// Reads a versioned CSV; returns data rows split on commas, validating the
// header names.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                                      const std::vector<std::string>& expected_header)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("missing or unreadable file " + path.string());
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# format_version:";
            if (line.rfind(key, 0) == 0) {
                const int v = std::atoi(line.c_str() + key.size());
                if (v != kFormatVersion)
                    throw ParseError(path.string() + ":" + std::to_string(lineno) + ": unsupported format_version " + std::to_string(v));
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (!saw_header) {
            if (cells != expected_header) {
                std::string want;
                for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected header '" + want + "'");
            }
            saw_header = true;
            continue;
        }
        if (cells.size() != expected_header.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(expected_header.size()) + " columns, got " + std::to_string(cells.size()));
        rows.push_back(std::move(cells));
    }
    if (!saw_header) throw ParseError(path.string() + ": no header row");
    return rows;
}

inline double parse_num(const std::string& s, const std::filesystem::path& path, std::size_t row, const std::string& col)
{
    if (s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(path.string() + ": data row " + std::to_string(row + 1) + ", column '" + col + "': not a number: '" + s + "'");
    }
}

} // namespace detail

// ---- target track (truth.csv) ---------------------------------------------

inline void write_track_csv(const std::filesystem::path& path, const TargetTrack& t)
{
    detail::CsvWriter w(path, "time_s,x_m,y_m");
    for (std::size_t k = 0; k < t.size(); ++k) w.row(t.times_s[k], t.positions_m[k].x, t.positions_m[k].y);
}

inline TargetTrack read_track_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path, {"time_s", "x_m", "y_m"});
    TargetTrack t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.times_s.push_back(detail::parse_num(rows[i][0], path, i, "time_s"));
        t.positions_m.push_back({detail::parse_num(rows[i][1], path, i, "x_m"), detail::parse_num(rows[i][2], path, i, "y_m")});
    }
    if (t.size() == 0) throw ParseError(path.string() + ": track has no rows");
    return t;
}

// ---- CAF spectrogram ---------------------------------------------------------

inline void write_caf_csv(const std::filesystem::path& path, const CafMap& m)
{
    detail::CsvWriter w(path, "time_s,doppler_hz,magnitude_db");
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const auto r = m.row(k);
        for (std::size_t b = 0; b < m.cols(); ++b)
            w.row(m.sensing_times_s[k], m.doppler_bins_hz[b], 20.0 * std::log10(std::max(r[b], 1e-300)));
    }
}

// Rebuilds magnitudes (linear) from the long-format CSV.
inline CafMap read_caf_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path, {"time_s", "doppler_hz", "magnitude_db"});
    CafMap m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double t = detail::parse_num(rows[i][0], path, i, "time_s");
        const double f = detail::parse_num(rows[i][1], path, i, "doppler_hz");
        const double db = detail::parse_num(rows[i][2], path, i, "magnitude_db");
        if (m.sensing_times_s.empty() || m.sensing_times_s.back() != t) {
            m.sensing_times_s.push_back(t);
            m.best_delay_samples.push_back(0);
        }
        if (m.sensing_times_s.size() == 1) m.doppler_bins_hz.push_back(f);
        m.magnitudes.push_back(std::pow(10.0, db / 20.0));
    }
    if (m.rows() == 0 || m.magnitudes.size() != m.rows() * m.cols())
        throw ParseError(path.string() + ": spectrogram rows have inconsistent bin counts");
    return m;
}

// ---- Doppler track -----------------------------------------------------------

inline void write_doppler_csv(const std::filesystem::path& path, const DopplerTrack& t)
{
    detail::CsvWriter w(path, "time_s,doppler_hz");
    for (std::size_t k = 0; k < t.size(); ++k)
        w.row(t.sensing_times_s[k], t.doppler_hz[k] ? *t.doppler_hz[k] : std::numeric_limits<double>::quiet_NaN());
}

inline DopplerTrack read_doppler_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path, {"time_s", "doppler_hz"});
    DopplerTrack t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.sensing_times_s.push_back(detail::parse_num(rows[i][0], path, i, "time_s"));
        const double f = detail::parse_num(rows[i][1], path, i, "doppler_hz");
        t.doppler_hz.push_back(std::isnan(f) ? std::nullopt : std::optional<double>(f));
    }
    if (t.size() == 0) throw ParseError(path.string() + ": Doppler track has no rows");
    return t;
}

// ---- trajectory ----------------------------------------------------------------

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr)
{
    detail::CsvWriter w(path, "time_s,x_m,y_m,flag");
    for (std::size_t k = 0; k < tr.size(); ++k) w.row(tr.sensing_times_s[k], tr.points_m[k].x, tr.points_m[k].y, to_string(tr.flags[k]));
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
    const auto rows = detail::read_csv(path, {"time_s", "x_m", "y_m", "flag"});
    Trajectory tr;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        tr.sensing_times_s.push_back(detail::parse_num(rows[i][0], path, i, "time_s"));
        tr.points_m.push_back({detail::parse_num(rows[i][1], path, i, "x_m"), detail::parse_num(rows[i][2], path, i, "y_m")});
        try {
            tr.flags.push_back(parse_point_flag(rows[i][3]));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": data row " + std::to_string(i + 1) + ", column 'flag': " + e.what());
        }
    }
    if (tr.size() == 0) throw ParseError(path.string() + ": trajectory has no rows");
    return tr;
}

// ---- error statistics ------------------------------------------------------------

inline void write_cdf_csv(const std::filesystem::path& path, const ErrorStats& st)
{
    detail::CsvWriter w(path, "error_m,fraction");
    for (const auto& p : st.cdf) w.row(p.error_m, p.fraction);
}

inline nlohmann::json to_json(const ErrorStats& st)
{
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["count"] = st.per_point_errors_m.size();
    j["median_m"] = st.median_m;
    j["p90_m"] = st.p90_m;
    j["per_point_errors_m"] = st.per_point_errors_m;
    return j;
}

inline ErrorStats error_stats_from_json(const nlohmann::json& j)
{
    if (!j.contains("per_point_errors_m")) throw ParseError("error stats: missing field 'per_point_errors_m'");
    return error_stats_from(j.at("per_point_errors_m").get<std::vector<double>>());
}

// ---- stroke spec -------------------------------------------------------------------

inline nlohmann::json to_json(const StrokeSpec& s)
{
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["shape"] = to_string(s.shape);
    if (s.shape == StrokeShape::polyline) {
        j["points"] = nlohmann::json::array();
        for (const auto& p : s.points) j["points"].push_back({p.x, p.y});
    }
    j["scale_m"] = s.scale_m;
    j["speed_mps"] = s.speed_mps;
    j["pause_s"] = s.pause_s;
    j["center_m"] = {s.center_m.x, s.center_m.y};
    j["step_s"] = s.step_s;
    j["lead_s"] = s.lead_s;
    return j;
}

inline Vec2 vec2_from_json(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("field '" + what + "' must be a two-element numeric array");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline StrokeSpec stroke_from_json(const nlohmann::json& j, StrokeSpec s = {})
{
    if (!j.is_object()) throw ParseError("stroke must be a JSON object");
    try {
        if (j.contains("shape")) s.shape = parse_stroke_shape(j.at("shape").get<std::string>());
        if (j.contains("points")) {
            s.points.clear();
            for (const auto& p : j.at("points")) s.points.push_back(vec2_from_json(p, "points[]"));
        }
        if (j.contains("scale_m")) s.scale_m = j.at("scale_m").get<double>();
        if (j.contains("speed_mps")) s.speed_mps = j.at("speed_mps").get<double>();
        if (j.contains("pause_s")) s.pause_s = j.at("pause_s").get<double>();
        if (j.contains("center_m")) s.center_m = vec2_from_json(j.at("center_m"), "center_m");
        if (j.contains("step_s")) s.step_s = j.at("step_s").get<double>();
        if (j.contains("lead_s")) s.lead_s = j.at("lead_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("stroke: ") + e.what());
    }
    return s;
}

} // namespace mmtrack

#endif
