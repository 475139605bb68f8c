// gvar: G-VaR risk analytics pipeline (ingest / calibrate / forecast /
// backtest / compare / pde-check).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gvar/backtest.hpp"
#include "gvar/benchmarks.hpp"
#include "gvar/calibration.hpp"
#include "gvar/data/csv.hpp"
#include "gvar/errors.hpp"
#include "gvar/forecast.hpp"
#include "gvar/pde.hpp"
#include "gvar/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitCalibration = 4;

struct CommonOpts {
    std::string data_path;
    std::vector<std::string> models = {"g_var"};
    std::vector<double> alphas = {0.01};
    int w = 250;
    int w0 = 0;
    bool calibrate = false;
    std::string w0_grid;
    std::string span = "full";
    std::string mode = "raw";
    double tail_frac = 0.10;
    int refit_cadence = 25;
    std::uint64_t seed = 12345;
    std::string out_dir = ".";
    std::string format = "json";
};

std::vector<int> parse_w0_grid(const std::string& s) {
    std::vector<int> grid;
    std::string tok;
    for (char c : s + ",") {
        if (c == ',') {
            if (!tok.empty()) grid.push_back(std::stoi(tok));
            tok.clear();
        } else {
            tok += c;
        }
    }
    return grid;
}

/// "full" or "split[:fraction]" -> calibration fraction (1.0 = full sample).
double parse_span(const std::string& s) {
    if (s == "full") return 1.0;
    if (s.rfind("split", 0) == 0) {
        double f = 0.5;
        if (s.size() > 5 && s[5] == ':') f = std::stod(s.substr(6));
        if (!(f > 0.0 && f < 1.0))
            throw gvar::ConfigError("span: split fraction must lie in (0,1)");
        return f;
    }
    throw gvar::ConfigError("span: expected 'full' or 'split[:fraction]', got '" + s + "'");
}

std::string alpha_tag(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", alpha);
    return buf;
}

struct Dataset {
    gvar::PriceSeries prices;
    gvar::ReturnSeries returns;
    gvar::IngestStats stats;
};

Dataset load_dataset(const std::string& path) {
    Dataset d;
    d.prices = gvar::load_prices(path, &d.stats);
    d.returns = gvar::log_returns(d.prices);
    return d;
}

gvar::ModelSpec make_model_spec(const std::string& model, const CommonOpts& opts, int w0) {
    gvar::ModelSpec spec;
    spec.model = gvar::parse_model_id(model);
    spec.w = opts.w;
    spec.w0 = w0;
    spec.mode = gvar::parse_g_var_mode(opts.mode);
    spec.tail_frac = opts.tail_frac;
    spec.refit_cadence = opts.refit_cadence;
    spec.seed = opts.seed;
    return spec;
}

/// Calibration + evaluation origin ranges for the configured span mode.
struct SpanPlan {
    std::size_t calib_begin, calib_end; // origin indices
    std::size_t eval_begin, eval_end;
    std::string label;
};

SpanPlan plan_span(std::size_t n, int w, double fraction, const std::string& label) {
    const std::size_t first = static_cast<std::size_t>(w) - 1;
    const std::size_t last = n - 1; // one past the final origin
    SpanPlan plan;
    plan.label = label;
    if (fraction >= 1.0) {
        plan.calib_begin = first;
        plan.calib_end = last;
        plan.eval_begin = first;
        plan.eval_end = last;
    } else {
        const auto split = first + static_cast<std::size_t>(
                               std::llround(fraction * static_cast<double>(last - first)));
        plan.calib_begin = first;
        plan.calib_end = split;
        plan.eval_begin = split;
        plan.eval_end = last;
    }
    return plan;
}

/// One backtest cell: optional calibration, rolling forecasts over the
/// evaluation span, report assembly.
struct CellResult {
    gvar::BacktestReport report;
    std::optional<gvar::CalibrationResult> calibration;
};

CellResult run_cell(const Dataset& data, const std::string& model, double alpha,
                    const CommonOpts& opts) {
    const auto& r = data.returns.values;
    const double span_fraction = parse_span(opts.span);
    const SpanPlan plan = plan_span(r.size(), opts.w, span_fraction, opts.span);

    CellResult cell;
    int w0 = opts.w0;
    const gvar::ModelId id = gvar::parse_model_id(model);
    if (id == gvar::ModelId::g_var && opts.calibrate) {
        gvar::CalibrationConfig cfg;
        cfg.w = opts.w;
        cfg.alpha = alpha;
        cfg.candidates = opts.w0_grid.empty() ? std::vector<int>{} : parse_w0_grid(opts.w0_grid);
        cfg.span_begin = plan.calib_begin;
        cfg.span_end = plan.calib_end;
        cfg.mode = gvar::parse_g_var_mode(opts.mode);
        cell.calibration = gvar::calibrate_w0(r, cfg);
        w0 = cell.calibration->w0_star;
    }

    const gvar::ModelSpec spec = make_model_spec(model, opts, w0);
    std::vector<gvar::VarForecast> forecasts = gvar::rolling_forecast(r, spec, alpha);
    // keep only the evaluation span
    std::erase_if(forecasts, [&](const gvar::VarForecast& f) {
        return f.t_index < plan.eval_begin || f.t_index >= plan.eval_end;
    });

    gvar::ReportMeta meta;
    meta.model = id;
    meta.w = opts.w;
    if (id == gvar::ModelId::g_var) meta.w0 = w0;
    meta.mode = spec.mode;
    meta.calibration_span = plan.label;
    meta.refit_cadence = id == gvar::ModelId::g_var || id == gvar::ModelId::hs ? 0 : opts.refit_cadence;
    meta.seed = opts.seed;
    cell.report = gvar::summarize(r, forecasts, alpha, meta);
    return cell;
}

void write_cell_outputs(const CellResult& cell, const CommonOpts& opts, bool suffixed) {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    const std::string suffix =
        suffixed ? "_" + cell.report.model_id + "_a" + alpha_tag(cell.report.alpha) : "";
    if (opts.format != "csv")
        gvar::write_json_file(dir / ("report" + suffix + ".json"), gvar::report_to_json(cell.report));
    gvar::write_running_rate_csv(dir / ("running_rate" + suffix + ".csv"), cell.report.running_rate);
    if (cell.calibration)
        gvar::write_w0_grid_csv(dir / ("w0_grid" + suffix + ".csv"), cell.calibration->grid);
}

void print_report_line(const gvar::BacktestReport& r) {
    std::printf("%-13s a=%-6g %%Viol=%-7.4f LR_uc(p)=%-7.4f 100VaR=%-8.4f n=%zu m1=%zu\n",
                r.model_id.c_str(), 100.0 * r.alpha, 100.0 * r.viol_rate, r.p_value,
                r.mean_var_x100, r.n_forecasts, r.m1);
    // converging-period summary of the running rate (the average/std
    // diagnostic uses the span beyond the first 3000 forecasts)
    const gvar::RateSummary tail = gvar::running_rate_summary(r.running_rate, 3000);
    if (tail.count > 0)
        std::printf("%-13s running %%Viol over n>3000: mean=%.4f stddev=%.2e (%zu points)\n", "",
                    100.0 * tail.mean, tail.stddev, tail.count);
}

// ---------------------------------------------------------------------------

int cmd_ingest(const CommonOpts& opts) {
    const Dataset d = load_dataset(opts.data_path);
    double mean = 0.0;
    for (double v : d.returns.values) mean += v;
    mean /= static_cast<double>(d.returns.size());
    double ss = 0.0;
    for (double v : d.returns.values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(d.returns.size() - 1));
    std::printf("ingest: %s\n", opts.data_path.c_str());
    std::printf("rows_read=%zu rows_dropped=%zu duplicates_replaced=%zu\n", d.stats.rows_read,
                d.stats.rows_dropped, d.stats.duplicates_replaced);
    std::printf("prices: n=%zu first=%s last=%s\n", d.prices.size(), d.prices.dates.front().c_str(),
                d.prices.dates.back().c_str());
    std::printf("returns: n=%zu mean=%.6f stddev=%.6f\n", d.returns.size(), mean, sd);
    return 0;
}

int cmd_calibrate(const CommonOpts& opts) {
    const Dataset d = load_dataset(opts.data_path);
    const double span_fraction = parse_span(opts.span);
    const SpanPlan plan = plan_span(d.returns.size(), opts.w, span_fraction, opts.span);
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    const bool suffixed = opts.alphas.size() > 1;
    for (double alpha : opts.alphas) {
        gvar::CalibrationConfig cfg;
        cfg.w = opts.w;
        cfg.alpha = alpha;
        cfg.candidates = opts.w0_grid.empty() ? std::vector<int>{} : parse_w0_grid(opts.w0_grid);
        cfg.span_begin = plan.calib_begin;
        cfg.span_end = plan.calib_end;
        cfg.mode = gvar::parse_g_var_mode(opts.mode);
        const gvar::CalibrationResult res = gvar::calibrate_w0(d.returns.values, cfg);
        json j = gvar::calibration_to_json(res);
        j["w"] = opts.w;
        j["span"] = plan.label;
        j["data"] = opts.data_path;
        const std::string suffix = suffixed ? "_a" + alpha_tag(alpha) : "";
        if (opts.format != "csv") gvar::write_json_file(dir / ("calibration" + suffix + ".json"), j);
        gvar::write_w0_grid_csv(dir / ("w0_grid" + suffix + ".csv"), res.grid);
        std::printf("calibrate: alpha=%g W=%d -> W0=%d (|rate-alpha|=%.3e over %zu origins)\n", alpha,
                    opts.w, res.w0_star, res.deviation, res.span_end - res.span_begin);
    }
    return 0;
}

int cmd_forecast(const CommonOpts& opts, long long origin) {
    const Dataset d = load_dataset(opts.data_path);
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    std::vector<gvar::VarForecast> forecasts;
    const std::string model = opts.models.front();
    for (double alpha : opts.alphas) {
        const gvar::ModelSpec spec = make_model_spec(model, opts, opts.w0);
        if (origin >= 0) {
            const auto t = static_cast<std::size_t>(origin);
            if (spec.model == gvar::ModelId::g_var) {
                forecasts.push_back(
                    gvar::g_var_forecast(d.returns.values, t, opts.w, opts.w0, alpha, spec.mode));
            } else {
                auto all = gvar::rolling_forecast(d.returns.values, spec, alpha);
                std::erase_if(all, [&](const auto& f) { return f.t_index != t; });
                if (all.empty()) throw gvar::ConfigError("forecast: origin outside forecastable range");
                forecasts.push_back(all.front());
            }
        } else {
            auto all = gvar::rolling_forecast(d.returns.values, spec, alpha);
            forecasts.insert(forecasts.end(), all.begin(), all.end());
        }
    }
    std::ofstream out(dir / "forecasts.csv");
    if (!out) throw gvar::DataError("forecast: cannot open output file");
    out << "t_index,origin_date,model,alpha,var_value\n";
    out.precision(12);
    for (const auto& f : forecasts)
        out << f.t_index << ',' << d.returns.dates[f.t_index] << ',' << gvar::to_string(f.model) << ','
            << f.alpha << ',' << f.var_value << '\n';
    std::printf("forecast: wrote %zu rows to %s\n", forecasts.size(),
                (dir / "forecasts.csv").string().c_str());
    return 0;
}

int cmd_backtest(const CommonOpts& opts) {
    const Dataset d = load_dataset(opts.data_path);
    (void)d;
    const bool suffixed = opts.models.size() * opts.alphas.size() > 1;
    // reports sorted by (model id, alpha) at this surface
    std::vector<std::pair<std::string, double>> cells;
    for (const auto& model : opts.models)
        for (double alpha : opts.alphas) cells.emplace_back(model, alpha);
    std::sort(cells.begin(), cells.end());

    std::vector<gvar::BacktestReport> reports;
    for (const auto& [model, alpha] : cells) {
        CellResult cell = run_cell(d, model, alpha, opts);
        write_cell_outputs(cell, opts, suffixed);
        print_report_line(cell.report);
        reports.push_back(std::move(cell.report));
    }
    const fs::path table = fs::path(opts.out_dir) / "table.csv";
    fs::remove(table);
    gvar::append_table_rows(table, reports);
    return 0;
}

int cmd_compare(const CommonOpts& opts) {
    const Dataset d = load_dataset(opts.data_path);
    std::vector<gvar::BacktestReport> reports;
    std::printf("%-14s %6s %8s %8s %10s\n", "model", "100a", "%Viol", "LR_uc", "100VaR");
    // declaration order: models then alphas exactly as requested
    for (const auto& model : opts.models) {
        for (double alpha : opts.alphas) {
            CellResult cell = run_cell(d, model, alpha, opts);
            std::printf("%-14s %6g %8.2f %8.2f %10.2f\n", model.c_str(), 100.0 * alpha,
                        100.0 * cell.report.viol_rate, cell.report.p_value, cell.report.mean_var_x100);
            reports.push_back(std::move(cell.report));
        }
    }
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    const fs::path table = dir / "table.csv";
    fs::remove(table);
    gvar::append_table_rows(table, reports);
    if (opts.format != "csv") {
        json j;
        j["schema"] = gvar::kReportSchema;
        j["kind"] = "compare";
        json rows = json::array();
        for (const auto& r : reports) {
            json row = gvar::report_to_json(r);
            row.erase("running_rate"); // the table view stays compact
            rows.push_back(std::move(row));
        }
        j["rows"] = rows;
        gvar::write_json_file(dir / "compare.json", j);
    }
    return 0;
}

int cmd_pde_check(double sigma_lo, double sigma_hi, double dx, double t_end, double tol,
                  const std::string& out_dir, const std::string& format) {
    const gvar::GNormalParams p(sigma_lo, sigma_hi);
    const gvar::GridSpec grid = gvar::default_grid(p, t_end, dx);
    const gvar::PdeErrorReport rep = gvar::verify_closed_form(p, grid);
    std::printf("pde-check: sigma=[%g,%g] dx=%g t_end=%g max_abs_error=%.6e at x=%.4f (tol %.1e)\n",
                sigma_lo, sigma_hi, dx, t_end, rep.max_abs_error, rep.worst_x, tol);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json j;
        j["schema"] = gvar::kReportSchema;
        j["kind"] = "pde_check";
        j["sigma_lo"] = sigma_lo;
        j["sigma_hi"] = sigma_hi;
        j["dx"] = dx;
        j["t_end"] = t_end;
        j["max_abs_error"] = rep.max_abs_error;
        j["worst_x"] = rep.worst_x;
        j["tolerance"] = tol;
        j["pass"] = rep.max_abs_error <= tol;
        if (format != "csv") gvar::write_json_file(fs::path(out_dir) / "pde_check.json", j);
    }
    if (rep.max_abs_error > tol) {
        std::fprintf(stderr, "error[verification]: pde-check error %.3e exceeds tolerance %.3e\n",
                     rep.max_abs_error, tol);
        return 1;
    }
    return 0;
}

void add_common_options(CLI::App* cmd, CommonOpts& opts, bool with_models) {
    cmd->add_option("--data", opts.data_path, "input CSV with header date,close")->required();
    if (with_models)
        cmd->add_option("--model", opts.models,
                        "model id (repeatable): g_var hs garch_n garch_t garch_st garch_st_evt");
    cmd->add_option("--alpha", opts.alphas, "risk level (repeatable)");
    cmd->add_option("--w", opts.w, "historical window W");
    cmd->add_option("--w0", opts.w0, "estimation sub-window W0 (g_var)");
    cmd->add_flag("--calibrate", opts.calibrate, "search W0 instead of fixing it");
    cmd->add_option("--w0-grid", opts.w0_grid, "comma-separated W0 candidates");
    cmd->add_option("--span", opts.span, "calibration span: full | split[:fraction]");
    cmd->add_option("--mode", opts.mode, "g_var mode: raw | ar1");
    cmd->add_option("--tail-frac", opts.tail_frac, "EVT tail fraction");
    cmd->add_option("--refit-cadence", opts.refit_cadence, "GARCH refit spacing (origins)");
    cmd->add_option("--seed", opts.seed, "seed for every stochastic step");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--format", opts.format, "report format: json | csv");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"G-VaR risk analytics under volatility uncertainty"};
    app.require_subcommand(1);

    CommonOpts opts;
    long long origin = -1;
    double pde_sigma_lo = 0.5, pde_sigma_hi = 1.0, pde_dx = 0.01, pde_t_end = 1.0, pde_tol = 5e-3;
    std::string pde_out, pde_format = "json";

    CLI::App* ingest = app.add_subcommand("ingest", "validate a price file and print a summary");
    ingest->add_option("--data", opts.data_path)->required();

    CLI::App* calibrate = app.add_subcommand("calibrate", "search the adaptive window W0");
    add_common_options(calibrate, opts, false);

    CLI::App* forecast = app.add_subcommand("forecast", "write one-step-ahead VaR forecasts");
    add_common_options(forecast, opts, true);
    forecast->add_option("--origin", origin, "single forecast origin (return index); default rolling");

    CLI::App* backtest = app.add_subcommand("backtest", "rolling forecasts plus coverage report");
    add_common_options(backtest, opts, true);

    CLI::App* compare = app.add_subcommand("compare", "multi-model comparison table");
    add_common_options(compare, opts, true);

    CLI::App* pde = app.add_subcommand("pde-check", "verify the closed form against the PDE solver");
    pde->add_option("--sigma-lo", pde_sigma_lo, "lower volatility");
    pde->add_option("--sigma-hi", pde_sigma_hi, "upper volatility");
    pde->add_option("--dx", pde_dx, "spatial step");
    pde->add_option("--t-end", pde_t_end, "terminal time");
    pde->add_option("--tol", pde_tol, "max-abs-error tolerance");
    pde->add_option("--out", pde_out, "output directory for pde_check.json");
    pde->add_option("--format", pde_format, "json | csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        std::fprintf(stderr, "error[usage]: %s\n", e.what());
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(opts);
        if (calibrate->parsed()) return cmd_calibrate(opts);
        if (forecast->parsed()) return cmd_forecast(opts, origin);
        if (backtest->parsed()) return cmd_backtest(opts);
        if (compare->parsed()) return cmd_compare(opts);
        if (pde->parsed())
            return cmd_pde_check(pde_sigma_lo, pde_sigma_hi, pde_dx, pde_t_end, pde_tol, pde_out,
                                 pde_format);
    } catch (const gvar::CalibrationError& e) {
        std::fprintf(stderr, "error[calibration]: %s\n", e.what());
        return kExitCalibration;
    } catch (const gvar::DataError& e) {
        std::fprintf(stderr, "error[data]: %s\n", e.what());
        return kExitData;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error[data]: %s\n", e.what());
        return kExitData;
    } catch (const gvar::ConfigError& e) {
        std::fprintf(stderr, "error[config]: %s\n", e.what());
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error[config]: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error[config]: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return 1;
    }
    return kExitUsage;
}
