#pragma once

#include "symbourse/market_data.hpp"
#include "symbourse/symbolic.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

// Deterministic synthetic market data shaped like the reference sample:
// four markets, a 22/12/3 sector tree, 104 trading days.
namespace symbourse::sample {

struct Options {
    std::uint64_t seed = 19991101;
    std::size_t stocks = 250;
    std::size_t days = 104;
    std::size_t thin = 2;    // tickers listed only for the last few days
    std::size_t splits = 3;  // tickers with a 2-for-1 split mid-sample
    std::size_t portfolio = 15;
};

struct SampleData {
    std::vector<market::QuoteRow> quotes;
    std::vector<market::Instrument> instruments;
    market::Taxonomy taxonomy;
    market::Portfolio portfolio;
};

market::Taxonomy reference_taxonomy();
SampleData generate(const Options& options = {});
market::Dataset build(const SampleData& data);

// Writes quotes.csv, instruments.csv, taxonomy.csv and portfolio.csv.
market::SourcePaths write(const SampleData& data, const std::filesystem::path& dir);

// Objects drawn around `groups` centres on the six indicators. Centres sit on
// a grid spaced `separation` within-group standard deviations apart, in an
// independent random order per variable; noise is uniform.
struct Planted {
    symbolic::SymbolicTable table;
    std::vector<std::size_t> group;  // true group of each object
};

Planted planted_indicators(std::size_t objects, std::size_t groups, double separation, std::uint64_t seed);

}  // namespace symbourse::sample
