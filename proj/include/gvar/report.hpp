#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvar/backtest.hpp"
#include "gvar/calibration.hpp"
#include "gvar/errors.hpp"

namespace gvar {

inline constexpr const char* kReportSchema = "gvar-report/1";

namespace detail {

inline std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

inline nlohmann::json report_to_json(const BacktestReport& r) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["kind"] = "backtest";
    j["model"] = r.model_id;
    j["alpha"] = r.alpha;
    j["w"] = r.w;
    if (r.w0.has_value())
        j["w0"] = *r.w0;
    else
        j["w0"] = nullptr;
    j["n_forecasts"] = r.n_forecasts;
    j["m1"] = r.m1;
    j["viol_rate"] = r.viol_rate;
    j["lr_stat"] = r.lr_stat;
    j["p_value"] = r.p_value;
    j["mean_var_x100"] = r.mean_var_x100;
    j["mode"] = r.mode;
    j["calibration_span"] = r.calibration_span;
    j["refit_cadence"] = r.refit_cadence;
    j["seed"] = r.seed;
    j["running_rate"] = r.running_rate;
    return j;
}

inline BacktestReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != kReportSchema)
        throw DataError("report_from_json: unknown schema " + j.value("schema", std::string{"<missing>"}));
    BacktestReport r;
    r.model_id = j.at("model").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.w = j.at("w").get<int>();
    if (!j.at("w0").is_null()) r.w0 = j.at("w0").get<int>();
    r.n_forecasts = j.at("n_forecasts").get<std::size_t>();
    r.m1 = j.at("m1").get<std::size_t>();
    r.viol_rate = j.at("viol_rate").get<double>();
    r.lr_stat = j.at("lr_stat").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.mean_var_x100 = j.at("mean_var_x100").get<double>();
    r.mode = j.at("mode").get<std::string>();
    r.calibration_span = j.at("calibration_span").get<std::string>();
    r.refit_cadence = j.at("refit_cadence").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.running_rate = j.at("running_rate").get<std::vector<double>>();
    return r;
}

inline nlohmann::json calibration_to_json(const CalibrationResult& c) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["kind"] = "calibration";
    j["w0_star"] = c.w0_star;
    j["alpha_target"] = c.alpha_target;
    j["deviation"] = c.deviation;
    j["span_begin"] = c.span_begin;
    j["span_end"] = c.span_end;
    j["mode"] = to_string(c.mode);
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& [w0, rate] : c.grid) grid.push_back({{"w0", w0}, {"viol_rate", rate}});
    j["grid"] = grid;
    return j;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("write_json_file: cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write_json_file: failed writing " + path.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("read_json_file: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

/// Running violation-rate series as `n,rate` rows.
inline void write_running_rate_csv(const std::filesystem::path& path, std::span<const double> rates) {
    std::ofstream out(path);
    if (!out) throw DataError("write_running_rate_csv: cannot open " + path.string());
    out << "n,rate\n";
    for (std::size_t i = 0; i < rates.size(); ++i)
        out << (i + 1) << ',' << detail::fmt_g(rates[i]) << '\n';
    if (!out) throw DataError("write_running_rate_csv: failed writing " + path.string());
}

/// Calibration grid as `w0,viol_rate` rows.
inline void write_w0_grid_csv(const std::filesystem::path& path,
                              std::span<const std::pair<int, double>> grid) {
    std::ofstream out(path);
    if (!out) throw DataError("write_w0_grid_csv: cannot open " + path.string());
    out << "w0,viol_rate\n";
    for (const auto& [w0, rate] : grid) out << w0 << ',' << detail::fmt_g(rate) << '\n';
    if (!out) throw DataError("write_w0_grid_csv: failed writing " + path.string());
}

inline constexpr const char* kTableHeader = "model,alpha_x100,viol_pct,lr_uc,mean_var_x100";

/// Appends comparison-table rows (creating the file with a header first) in
/// the order given. The lr_uc column carries the p-value, matching the
/// published table layout.
inline void append_table_rows(const std::filesystem::path& path, std::span<const BacktestReport> reports) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("append_table_rows: cannot open " + path.string());
    if (fresh) out << kTableHeader << '\n';
    for (const BacktestReport& r : reports) {
        out << r.model_id << ',' << detail::fmt_g(100.0 * r.alpha) << ','
            << detail::fmt_g(100.0 * r.viol_rate) << ',' << detail::fmt_g(r.p_value) << ','
            << detail::fmt_g(r.mean_var_x100) << '\n';
    }
    if (!out) throw DataError("append_table_rows: failed writing " + path.string());
}

} // namespace gvar
