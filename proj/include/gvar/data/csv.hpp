#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gvar/errors.hpp"

namespace gvar {

/// Daily closing levels keyed by ISO-8601 dates, strictly increasing.
struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> closes;

    std::size_t size() const { return dates.size(); }
    bool operator==(const PriceSeries&) const = default;
};

/// Log-returns times 100, aligned to the later date of each pair.
struct ReturnSeries {
    std::vector<std::string> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

struct IngestStats {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::size_t duplicates_replaced = 0;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) != 0)) ++b;
    while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) != 0)) --e;
    return s.substr(b, e - b);
}

inline bool valid_iso_date(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (std::isdigit(static_cast<unsigned char>(d[i])) == 0) return false;
    const int month = std::stoi(d.substr(5, 2));
    const int day = std::stoi(d.substr(8, 2));
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

} // namespace detail

/// Reads a `date,close` CSV into a sorted, validated PriceSeries. Rows with
/// unparseable dates or non-positive closes are dropped (counted); duplicate
/// dates keep the last occurrence in the file.
inline PriceSeries load_prices(const std::filesystem::path& path, IngestStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw DataError("load_prices: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw DataError("load_prices: empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::strip(line) != "date,close")
        throw DataError("load_prices: expected header 'date,close' in " + path.string());

    IngestStats local;
    std::vector<std::pair<std::string, double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::strip(line).empty()) continue;
        ++local.rows_read;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            ++local.rows_dropped;
            continue;
        }
        const std::string date = detail::strip(line.substr(0, comma));
        const std::string close_str = detail::strip(line.substr(comma + 1));
        double close = 0.0;
        try {
            std::size_t used = 0;
            close = std::stod(close_str, &used);
            if (used != close_str.size()) throw std::invalid_argument("trailing garbage");
        } catch (const std::exception&) {
            ++local.rows_dropped;
            continue;
        }
        if (!detail::valid_iso_date(date) || !(close > 0.0) || !std::isfinite(close)) {
            ++local.rows_dropped;
            continue;
        }
        rows.emplace_back(date, close);
    }
    if (rows.empty())
        throw DataError("load_prices: no usable rows in " + path.string() + " (" +
                        std::to_string(local.rows_dropped) + " dropped of " +
                        std::to_string(local.rows_read) + ")");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    PriceSeries series;
    series.dates.reserve(rows.size());
    series.closes.reserve(rows.size());
    for (const auto& [date, close] : rows) {
        if (!series.dates.empty() && series.dates.back() == date) {
            series.closes.back() = close; // keep last occurrence
            ++local.duplicates_replaced;
            continue;
        }
        series.dates.push_back(date);
        series.closes.push_back(close);
    }
    if (stats != nullptr) *stats = local;
    return series;
}

/// Writes a PriceSeries back out in the ingestion format.
inline void write_prices(const std::filesystem::path& path, const PriceSeries& series) {
    std::ofstream out(path);
    if (!out)
        throw DataError("write_prices: cannot open " + path.string() + " for writing");
    out << "date,close\n";
    out.precision(17);
    for (std::size_t i = 0; i < series.size(); ++i)
        out << series.dates[i] << ',' << series.closes[i] << '\n';
    if (!out)
        throw DataError("write_prices: failed writing " + path.string());
}

/// r_t = 100 (ln Z_t - ln Z_{t-1}).
inline ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2)
        throw std::out_of_range("log_returns: need at least two prices");
    ReturnSeries r;
    r.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    r.values.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i)
        r.values.push_back(100.0 * (std::log(prices.closes[i]) - std::log(prices.closes[i - 1])));
    return r;
}

} // namespace gvar
