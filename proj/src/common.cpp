#include "symbourse/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace symbourse {

using namespace std::chrono;

Date::Date(int y, unsigned m, unsigned d) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw Error(ErrorKind::Parse, "invalid calendar date");
    }
    serial_ = sys_days{ymd}.time_since_epoch().count();
}

Date Date::parse(std::string_view text) {
    const auto bad = [&] {
        return Error(ErrorKind::Parse, "invalid ISO-8601 date '" + std::string(text) + "'");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw bad();
    }
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const char* s = text.data();
    if (std::from_chars(s, s + 4, y).ptr != s + 4 || std::from_chars(s + 5, s + 7, m).ptr != s + 7 ||
        std::from_chars(s + 8, s + 10, d).ptr != s + 10) {
        throw bad();
    }
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw bad();
    }
    return Date{sys_days{ymd}};
}

std::string Date::iso() const {
    const auto v = ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(v.year()),
                  static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
    return buf;
}

unsigned Date::weekday_index() const {
    return weekday{days()}.iso_encoding() - 1;
}

std::string Date::iso_week() const {
    // The ISO week belongs to the year containing its Thursday.
    const sys_days thursday = days() + std::chrono::days{3 - static_cast<int>(weekday_index())};
    const year y = year_month_day{thursday}.year();
    const sys_days jan1{y / January / 1};
    const auto week = (thursday - jan1).count() / 7 + 1;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-W%02d", static_cast<int>(y), static_cast<int>(week));
    return buf;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::Parse, "unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string join_csv(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        out += csv_field(fields[i]);
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    if (value == 0.0) {
        value = 0.0;  // drop negative zero
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::Parse, "invalid number '" + t + "' for " + std::string(what));
    }
    return value;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    std::int64_t value = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw Error(ErrorKind::Parse, "invalid integer '" + t + "' for " + std::string(what));
    }
    return value;
}

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

}  // namespace symbourse
