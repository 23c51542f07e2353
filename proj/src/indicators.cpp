#include "symbourse/indicators.hpp"

#include <algorithm>
#include <cmath>

namespace symbourse::indicators {

namespace {

Error insufficient(std::string_view what, const market::QuoteSeries& s, std::size_t need, std::size_t have) {
    return Error(ErrorKind::InsufficientHistory, std::string(what) + ": insufficient history for " + s.ticker +
                                                     " (need " + std::to_string(need) + " trading days, have " +
                                                     std::to_string(have) + ")");
}

void check_window(int n) {
    if (n < 1) {
        throw Error(ErrorKind::InvalidArgument, "window must be at least 1 trading day");
    }
}

// Index of the last bar at or before `at` after checking `need` bars exist.
std::size_t end_index(std::string_view what, const market::QuoteSeries& s, Date at, std::size_t need) {
    const std::size_t have = history_length(s, at);
    if (have == 0) {
        throw Error(ErrorKind::InsufficientHistory,
                    std::string(what) + ": " + at.iso() + " is before the first quote of " + s.ticker);
    }
    if (have < need) {
        throw insufficient(what, s, need, have);
    }
    return have - 1;
}

}  // namespace

const std::vector<std::string>& standard_names() {
    static const std::vector<std::string> names{"perfmois", "perf2sem", "volat20", "volat10", "capim10", "capitmds"};
    return names;
}

bool is_indicator_name(std::string_view name) {
    const auto& n = standard_names();
    return name == "sd_ret" || std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<double> IndicatorVector::values(bool with_sd_ret) const {
    std::vector<double> v{perfmois, perf2sem, volat20, volat10, capim10, capitmds};
    if (with_sd_ret) {
        v.push_back(sd_ret.value_or(0.0));
    }
    return v;
}

double IndicatorVector::value(std::string_view name) const {
    if (name == "perfmois") return perfmois;
    if (name == "perf2sem") return perf2sem;
    if (name == "volat20") return volat20;
    if (name == "volat10") return volat10;
    if (name == "capim10") return capim10;
    if (name == "capitmds") return capitmds;
    if (name == "sd_ret") {
        if (!sd_ret) {
            throw Error(ErrorKind::InvalidArgument, "sd_ret not computed for " + ticker);
        }
        return *sd_ret;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown indicator '" + std::string(name) + "'");
}

std::size_t history_length(const market::QuoteSeries& series, Date at) {
    const auto it = std::upper_bound(series.bars.begin(), series.bars.end(), at,
                                     [](Date d, const market::Bar& b) { return d < b.date; });
    return static_cast<std::size_t>(it - series.bars.begin());
}

std::size_t index_at(const market::QuoteSeries& series, Date at) {
    return end_index("index", series, at, 1);
}

double performance(const market::QuoteSeries& series, Date at, int n) {
    check_window(n);
    const std::size_t t = end_index("performance", series, at, static_cast<std::size_t>(n) + 1);
    const double base = series.bars[t - n].close;
    return 100.0 * (series.bars[t].close - base) / base;
}

double capitalization(const market::QuoteSeries& series, Date at, std::int64_t shares_outstanding) {
    if (shares_outstanding <= 0) {
        throw Error(ErrorKind::InvalidArgument, "shares_outstanding must be positive");
    }
    const std::size_t t = end_index("capitalization", series, at, 1);
    return series.bars[t].close * static_cast<double>(shares_outstanding) / 1e9;
}

double avg_traded_capital(const market::QuoteSeries& series, Date at, int n) {
    check_window(n);
    const std::size_t t = end_index("avg_traded_capital", series, at, static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t k = t + 1 - n; k <= t; ++k) {
        sum += series.bars[k].volume * series.bars[k].close;
    }
    return sum / n;
}

double capital_volatility(const market::QuoteSeries& series, Date at, int n, std::int64_t shares_outstanding) {
    check_window(n);
    if (shares_outstanding <= 0) {
        throw Error(ErrorKind::InvalidArgument, "shares_outstanding must be positive");
    }
    const std::size_t t = end_index("capital_volatility", series, at, static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t k = t + 1 - n; k <= t; ++k) {
        sum += series.bars[k].volume;
    }
    return 1000.0 * sum / (static_cast<double>(n) * static_cast<double>(shares_outstanding));
}

double price_volatility(const market::QuoteSeries& series, Date at, int n) {
    check_window(n);
    const std::size_t t = end_index("price_volatility", series, at, static_cast<std::size_t>(n) + 1);
    std::vector<double> ret(n);
    for (int k = 0; k < n; ++k) {
        const std::size_t d = t - n + 1 + k;
        ret[k] = (series.bars[d].close - series.bars[d - 1].close) / series.bars[d - 1].close;
    }
    double mean = 0.0;
    for (double r : ret) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : ret) var += (r - mean) * (r - mean);
    var /= n;
    return 100.0 * std::sqrt(var);
}

double evaluate(const IndicatorSpec& spec, const market::QuoteSeries& series, Date at,
                std::int64_t shares_outstanding) {
    const auto window = [&] {
        if (!spec.window_days) {
            throw Error(ErrorKind::InvalidArgument, "indicator requires a window");
        }
        return *spec.window_days;
    };
    switch (spec.kind) {
        case IndicatorKind::Performance: return performance(series, at, window());
        case IndicatorKind::CapitalVolatility: return capital_volatility(series, at, window(), shares_outstanding);
        case IndicatorKind::AvgTradedCapital: return avg_traded_capital(series, at, window());
        case IndicatorKind::Capitalization: return capitalization(series, at, shares_outstanding);
        case IndicatorKind::PriceVolatility: return price_volatility(series, at, window());
    }
    throw Error(ErrorKind::Internal, "unhandled indicator kind");
}

IndicatorVector indicator_vector(const market::Dataset& dataset, std::string_view ticker, Date at) {
    const auto& series = dataset.series(ticker);
    const auto shares = dataset.instrument(ticker).shares_outstanding;
    IndicatorVector v;
    v.ticker = std::string(ticker);
    const auto attach = [&](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(name) + ": " + e.what());
        }
    };
    v.perfmois = attach("perfmois", [&] { return performance(series, at, kMonthDays); });
    v.perf2sem = attach("perf2sem", [&] { return performance(series, at, kTwoWeeksDays); });
    v.volat20 = attach("volat20", [&] { return capital_volatility(series, at, kMonthDays, shares); });
    v.volat10 = attach("volat10", [&] { return capital_volatility(series, at, kTwoWeeksDays, shares); });
    v.capim10 = attach("capim10", [&] { return avg_traded_capital(series, at, kTwoWeeksDays); });
    v.capitmds = attach("capitmds", [&] { return capitalization(series, at, shares); });
    v.sd_ret = attach("sd_ret", [&] { return price_volatility(series, at, kMonthDays); });
    return v;
}

std::string indicators_csv(const std::vector<IndicatorVector>& rows, bool with_sd_ret) {
    std::string out = "ticker";
    for (const auto& n : standard_names()) {
        out += "," + n;
    }
    if (with_sd_ret) {
        out += ",sd_ret";
    }
    out += "\n";
    for (const auto& r : rows) {
        out += csv_field(r.ticker);
        for (double v : r.values(with_sd_ret)) {
            out += "," + format_double(v);
        }
        out += "\n";
    }
    return out;
}

}  // namespace symbourse::indicators
