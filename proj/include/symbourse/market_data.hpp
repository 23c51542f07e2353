#pragma once

#include "symbourse/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symbourse::market {

// The four Paris market segments.
enum class Market { RM, RME, SM, NM };

inline constexpr Market kAllMarkets[] = {Market::RM, Market::RME, Market::SM, Market::NM};

std::string_view to_string(Market market);
Market parse_market(std::string_view token);

enum class SectorLevel { L1 = 1, L2 = 2, L3 = 3 };

std::string_view to_string(SectorLevel level);

struct QuoteRow {
    Date date;
    std::string ticker;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::int64_t volume = 0;
    // Split factor applied to every earlier row of the same ticker.
    double adjustment = 1.0;

    friend bool operator==(const QuoteRow&, const QuoteRow&) = default;
};

// Split-adjusted daily bar. Volume is fractional once a split is undone.
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

struct QuoteSeries {
    std::string ticker;
    std::vector<QuoteRow> raw;  // as ingested, sorted by date
    std::vector<Bar> bars;      // adjusted, same length and order as `raw`

    friend bool operator==(const QuoteSeries&, const QuoteSeries&) = default;
};

struct Instrument {
    std::string ticker;
    std::string name;
    Market market = Market::RM;
    std::string sector_l3;
    std::int64_t shares_outstanding = 0;

    friend bool operator==(const Instrument&, const Instrument&) = default;
};

// Three-level sector tree: l3 -> l2 -> l1.
class Taxonomy {
public:
    void add(const std::string& l3, const std::string& l2, const std::string& l1);

    bool contains_l3(std::string_view l3) const;
    // Parent of `l3` at `level` (L3 returns `l3` itself).
    const std::string& rollup(std::string_view l3, SectorLevel level) const;
    // Parent of an l2 code.
    const std::string& l1_of_l2(std::string_view l2) const;

    // Sorted distinct codes at a level.
    std::vector<std::string> codes(SectorLevel level) const;
    std::size_t count(SectorLevel level) const { return codes(level).size(); }
    // Level at which a code is defined, searching l3, then l2, then l1.
    std::optional<SectorLevel> level_of(std::string_view code) const;
    bool empty() const { return l3_to_l2_.empty(); }

    const std::map<std::string, std::string, std::less<>>& l3_to_l2() const { return l3_to_l2_; }

    friend bool operator==(const Taxonomy&, const Taxonomy&) = default;

private:
    std::map<std::string, std::string, std::less<>> l3_to_l2_;
    std::map<std::string, std::string, std::less<>> l2_to_l1_;
};

struct Position {
    std::string ticker;
    std::int64_t quantity = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

struct Portfolio {
    std::vector<Position> positions;

    bool contains(std::string_view ticker) const;
    friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

// Joined, validated, immutable market data.
class Dataset {
public:
    static Dataset build(std::vector<QuoteRow> quotes, std::vector<Instrument> instruments, Taxonomy taxonomy);

    const std::map<std::string, QuoteSeries, std::less<>>& series() const { return series_; }
    const QuoteSeries& series(std::string_view ticker) const;
    bool has_series(std::string_view ticker) const { return series_.find(ticker) != series_.end(); }

    const std::map<std::string, Instrument, std::less<>>& instruments() const { return instruments_; }
    const Instrument& instrument(std::string_view ticker) const;

    const Taxonomy& taxonomy() const { return taxonomy_; }
    std::span<const Date> calendar() const { return calendar_; }

    // Throws if a position names a ticker without an instrument.
    void check_portfolio(const Portfolio& portfolio) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::map<std::string, QuoteSeries, std::less<>> series_;
    std::map<std::string, Instrument, std::less<>> instruments_;
    Taxonomy taxonomy_;
    std::vector<Date> calendar_;
};

std::vector<QuoteRow> parse_quotes(std::istream& in);
std::vector<Instrument> parse_instruments(std::istream& in);
Taxonomy parse_taxonomy(std::istream& in);
Portfolio parse_portfolio(std::istream& in);

// Writers emit the canonical headers; raw (unadjusted) quotes are written.
void write_quotes(const Dataset& dataset, std::ostream& out);
void write_instruments(const Dataset& dataset, std::ostream& out);
void write_taxonomy(const Taxonomy& taxonomy, std::ostream& out);
void write_portfolio(const Portfolio& portfolio, std::ostream& out);

struct SourcePaths {
    std::filesystem::path quotes;
    std::filesystem::path instruments;
    std::filesystem::path taxonomy;
};

Dataset load_dataset(const SourcePaths& paths);
Portfolio load_portfolio(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

// JSON manifest: the three source paths with a SHA-256 per file.
std::string dataset_manifest_json(const SourcePaths& paths);
// Single digest over the three source files, used in run manifests.
std::string dataset_checksum(const SourcePaths& paths);

}  // namespace symbourse::market
