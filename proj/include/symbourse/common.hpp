#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symbourse {

enum class ErrorKind {
    InvalidArgument,
    Io,
    Parse,
    Validation,
    InsufficientHistory,
    Query,
    Internal,
};

// Every failure in the core library is reported through this type; the C API
// maps `kind()` onto its status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Calendar day, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    explicit Date(std::chrono::sys_days days) : serial_(days.time_since_epoch().count()) {}
    Date(int year, unsigned month, unsigned day);

    // Strict ISO-8601 `YYYY-MM-DD`.
    static Date parse(std::string_view text);

    std::chrono::sys_days days() const { return std::chrono::sys_days{std::chrono::days{serial_}}; }
    std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days()}; }
    std::string iso() const;
    // ISO-8601 week label, e.g. `2000-W09`.
    std::string iso_week() const;
    // Monday = 0 ... Sunday = 6.
    unsigned weekday_index() const;

    Date plus_days(int n) const { return Date{days() + std::chrono::days{n}}; }

    std::int64_t serial() const { return serial_; }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::int64_t serial_ = 0;
};

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// CSV helpers shared by every reader/writer. Fields may be double-quoted.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view text);
std::string join_csv(std::span<const std::string> fields);

// Shortest text that parses back to the same double.
std::string format_double(double value);
// printf("%.*f") with a fixed number of decimals.
std::string format_fixed(double value, int decimals);

// Full-string numeric parse; throws Error(Parse) with `what` in the message.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace symbourse
