#pragma once

#include "symbourse/common.hpp"
#include "symbourse/market_data.hpp"

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

// Kind of the symbourse::Error thrown by `f`, if any.
inline std::optional<symbourse::ErrorKind> error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const symbourse::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

inline std::string error_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const symbourse::Error& e) {
        return e.what();
    }
    return {};
}

// Consecutive calendar days from 2000-01-03.
inline symbourse::Date day(int i) { return symbourse::Date(2000, 1, 3).plus_days(i); }

// Series of `closes` with the given volumes (default 1000); open/high/low
// hug the close.
inline symbourse::market::QuoteSeries series(const std::vector<double>& closes,
                                             std::vector<std::int64_t> volumes = {},
                                             const std::string& ticker = "T") {
    if (volumes.empty()) volumes.assign(closes.size(), 1000);
    std::vector<symbourse::market::QuoteRow> rows;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        rows.push_back({day(static_cast<int>(i)), ticker, closes[i], closes[i], closes[i], closes[i], volumes[i], 1.0});
    }
    symbourse::market::Taxonomy tax;
    tax.add("S3", "S2", "S1");
    auto ds = symbourse::market::Dataset::build(rows, {{ticker, ticker, symbourse::market::Market::RM, "S3", 1000000}},
                                                tax);
    return ds.series(ticker);
}

inline std::istringstream stream(const std::string& text) { return std::istringstream(text); }

}  // namespace testing
