#pragma once

#include "symbourse/market_data.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symbourse::indicators {

// "1 mois" and "2 semaines" expressed in the ticker's own trading days.
inline constexpr int kMonthDays = 20;
inline constexpr int kTwoWeeksDays = 10;
// Days needed before `at` for a full indicator vector (a 20-day performance
// needs 21 closes).
inline constexpr int kRequiredHistory = kMonthDays + 1;

enum class IndicatorKind { Performance, CapitalVolatility, AvgTradedCapital, Capitalization, PriceVolatility };

struct IndicatorSpec {
    IndicatorKind kind = IndicatorKind::Performance;
    std::optional<int> window_days;  // absent for capitalization
};

struct IndicatorVector {
    std::string ticker;
    double perfmois = 0.0;  // %
    double perf2sem = 0.0;  // %
    double volat20 = 0.0;   // per-mille of shares outstanding per day
    double volat10 = 0.0;
    double capim10 = 0.0;   // EUR
    double capitmds = 0.0;  // EUR billions
    std::optional<double> sd_ret;  // %, 20-day population sd of daily returns

    // Values in the order of `standard_names()`.
    std::vector<double> values(bool with_sd_ret = false) const;
    double value(std::string_view name) const;
};

// perfmois, perf2sem, volat20, volat10, capim10, capitmds.
const std::vector<std::string>& standard_names();
bool is_indicator_name(std::string_view name);

// Index of the last bar dated at or before `at`.
std::size_t index_at(const market::QuoteSeries& series, Date at);
// Number of trading days of `series` at or before `at`.
std::size_t history_length(const market::QuoteSeries& series, Date at);

double performance(const market::QuoteSeries& series, Date at, int n);
double capitalization(const market::QuoteSeries& series, Date at, std::int64_t shares_outstanding);
double avg_traded_capital(const market::QuoteSeries& series, Date at, int n);
double capital_volatility(const market::QuoteSeries& series, Date at, int n, std::int64_t shares_outstanding);
double price_volatility(const market::QuoteSeries& series, Date at, int n);

double evaluate(const IndicatorSpec& spec, const market::QuoteSeries& series, Date at,
                std::int64_t shares_outstanding);

IndicatorVector indicator_vector(const market::Dataset& dataset, std::string_view ticker, Date at);

// `ticker,perfmois,perf2sem,volat20,volat10,capim10,capitmds[,sd_ret]`.
std::string indicators_csv(const std::vector<IndicatorVector>& rows, bool with_sd_ret);

}  // namespace symbourse::indicators
