#include "symbourse/market_data.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <set>
#include <sstream>

namespace symbourse::market {

namespace {

Error line_error(std::size_t line, const std::string& message) {
    return Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + message);
}

// Reads the header, checks it against the accepted variants and returns the
// index of the matching variant.
std::size_t expect_header(std::istream& in, std::initializer_list<std::string_view> variants) {
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            break;
        }
    }
    const std::string header = trim(line);
    std::size_t index = 0;
    for (auto v : variants) {
        if (header == v) {
            return index;
        }
        ++index;
    }
    throw Error(ErrorKind::Parse, "unexpected header '" + header + "', expected '" +
                                      std::string(*variants.begin()) + "'");
}

// Iterates non-blank body lines with their 1-based line numbers. The header is
// line 1.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t expected_fields, Fn&& fn) {
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const Error& e) {
            throw line_error(line_no, e.what());
        }
        if (fields.size() != expected_fields) {
            throw line_error(line_no, "expected " + std::to_string(expected_fields) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        for (auto& f : fields) {
            f = trim(f);
        }
        try {
            fn(line_no, fields);
        } catch (const Error& e) {
            const std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) {
                throw;
            }
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + msg);
        }
    }
}

}  // namespace

std::string_view to_string(Market market) {
    switch (market) {
        case Market::RM: return "RM";
        case Market::RME: return "RME";
        case Market::SM: return "SM";
        case Market::NM: return "NM";
    }
    return "?";
}

Market parse_market(std::string_view token) {
    for (auto m : kAllMarkets) {
        if (to_string(m) == token) {
            return m;
        }
    }
    throw Error(ErrorKind::Validation, "unknown market '" + std::string(token) + "'");
}

std::string_view to_string(SectorLevel level) {
    switch (level) {
        case SectorLevel::L1: return "sector_l1";
        case SectorLevel::L2: return "sector_l2";
        case SectorLevel::L3: return "sector_l3";
    }
    return "?";
}

// --- Taxonomy -------------------------------------------------------------

void Taxonomy::add(const std::string& l3, const std::string& l2, const std::string& l1) {
    if (l3.empty() || l2.empty() || l1.empty()) {
        throw Error(ErrorKind::Validation, "empty sector code");
    }
    if (auto it = l3_to_l2_.find(l3); it != l3_to_l2_.end() && it->second != l2) {
        throw Error(ErrorKind::Validation,
                    "sector '" + l3 + "' has two level-2 parents: '" + it->second + "' and '" + l2 + "'");
    }
    if (auto it = l2_to_l1_.find(l2); it != l2_to_l1_.end() && it->second != l1) {
        throw Error(ErrorKind::Validation,
                    "sector '" + l2 + "' has two level-1 parents: '" + it->second + "' and '" + l1 + "'");
    }
    l3_to_l2_[l3] = l2;
    l2_to_l1_[l2] = l1;
}

bool Taxonomy::contains_l3(std::string_view l3) const {
    return l3_to_l2_.find(l3) != l3_to_l2_.end();
}

const std::string& Taxonomy::rollup(std::string_view l3, SectorLevel level) const {
    const auto it = l3_to_l2_.find(l3);
    if (it == l3_to_l2_.end()) {
        throw Error(ErrorKind::Validation, "unknown level-3 sector '" + std::string(l3) + "'");
    }
    switch (level) {
        case SectorLevel::L3: return it->first;
        case SectorLevel::L2: return it->second;
        case SectorLevel::L1: return l1_of_l2(it->second);
    }
    return it->first;
}

const std::string& Taxonomy::l1_of_l2(std::string_view l2) const {
    const auto it = l2_to_l1_.find(l2);
    if (it == l2_to_l1_.end()) {
        throw Error(ErrorKind::Validation, "unknown level-2 sector '" + std::string(l2) + "'");
    }
    return it->second;
}

std::vector<std::string> Taxonomy::codes(SectorLevel level) const {
    std::set<std::string> out;
    for (const auto& [l3, l2] : l3_to_l2_) {
        out.insert(rollup(l3, level));
    }
    return {out.begin(), out.end()};
}

std::optional<SectorLevel> Taxonomy::level_of(std::string_view code) const {
    for (auto level : {SectorLevel::L3, SectorLevel::L2, SectorLevel::L1}) {
        const auto c = codes(level);
        if (std::binary_search(c.begin(), c.end(), code)) {
            return level;
        }
    }
    return std::nullopt;
}

bool Portfolio::contains(std::string_view ticker) const {
    return std::any_of(positions.begin(), positions.end(), [&](const Position& p) { return p.ticker == ticker; });
}

// --- Parsers --------------------------------------------------------------

std::vector<QuoteRow> parse_quotes(std::istream& in) {
    const std::size_t variant =
        expect_header(in, {"date,ticker,open,high,low,close,volume", "date,ticker,open,high,low,close,volume,adjustment"});
    const std::size_t nfields = variant == 0 ? 7 : 8;
    std::vector<QuoteRow> rows;
    std::map<std::pair<std::string, std::int64_t>, std::size_t> seen;
    for_each_row(in, nfields, [&](std::size_t line_no, const std::vector<std::string>& f) {
        QuoteRow row;
        row.date = Date::parse(f[0]);
        row.ticker = f[1];
        if (row.ticker.empty()) {
            throw Error(ErrorKind::Validation, "empty ticker");
        }
        row.open = parse_double(f[2], "open");
        row.high = parse_double(f[3], "high");
        row.low = parse_double(f[4], "low");
        row.close = parse_double(f[5], "close");
        row.volume = parse_int(f[6], "volume");
        if (nfields == 8 && !f[7].empty()) {
            row.adjustment = parse_double(f[7], "adjustment");
        }
        if (row.open <= 0 || row.high <= 0 || row.low <= 0 || row.close <= 0) {
            throw Error(ErrorKind::Validation, "prices must be positive");
        }
        if (!(row.low <= std::min(row.open, row.close) && std::max(row.open, row.close) <= row.high)) {
            throw Error(ErrorKind::Validation, "OHLC inconsistency (need low <= open,close <= high)");
        }
        if (row.volume < 0) {
            throw Error(ErrorKind::Validation, "negative volume");
        }
        if (row.adjustment <= 0) {
            throw Error(ErrorKind::Validation, "adjustment must be positive");
        }
        const auto key = std::make_pair(row.ticker, row.date.serial());
        if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
            throw Error(ErrorKind::Validation, "duplicate quote for " + row.ticker + " on " + row.date.iso() +
                                                   " (first seen on line " + std::to_string(it->second) + ")");
        }
        rows.push_back(std::move(row));
    });
    return rows;
}

std::vector<Instrument> parse_instruments(std::istream& in) {
    expect_header(in, {"ticker,name,market,sector_l3,shares_outstanding"});
    std::vector<Instrument> out;
    std::set<std::string> seen;
    for_each_row(in, 5, [&](std::size_t, const std::vector<std::string>& f) {
        Instrument inst;
        inst.ticker = f[0];
        if (inst.ticker.empty()) {
            throw Error(ErrorKind::Validation, "empty ticker");
        }
        inst.name = f[1];
        inst.market = parse_market(f[2]);
        inst.sector_l3 = f[3];
        inst.shares_outstanding = parse_int(f[4], "shares_outstanding");
        if (inst.shares_outstanding <= 0) {
            throw Error(ErrorKind::Validation, "shares_outstanding must be positive");
        }
        if (!seen.insert(inst.ticker).second) {
            throw Error(ErrorKind::Validation, "duplicate ticker '" + inst.ticker + "'");
        }
        out.push_back(std::move(inst));
    });
    return out;
}

Taxonomy parse_taxonomy(std::istream& in) {
    expect_header(in, {"sector_l3,sector_l2,sector_l1"});
    Taxonomy tax;
    for_each_row(in, 3, [&](std::size_t, const std::vector<std::string>& f) { tax.add(f[0], f[1], f[2]); });
    return tax;
}

Portfolio parse_portfolio(std::istream& in) {
    expect_header(in, {"ticker,quantity"});
    Portfolio p;
    for_each_row(in, 2, [&](std::size_t, const std::vector<std::string>& f) {
        Position pos{f[0], parse_int(f[1], "quantity")};
        if (pos.ticker.empty()) {
            throw Error(ErrorKind::Validation, "empty ticker");
        }
        if (pos.quantity <= 0) {
            throw Error(ErrorKind::Validation, "quantity must be positive");
        }
        if (p.contains(pos.ticker)) {
            throw Error(ErrorKind::Validation, "duplicate ticker '" + pos.ticker + "' in portfolio");
        }
        p.positions.push_back(std::move(pos));
    });
    if (p.positions.empty()) {
        throw Error(ErrorKind::Validation, "empty portfolio");
    }
    return p;
}

// --- Dataset --------------------------------------------------------------

Dataset Dataset::build(std::vector<QuoteRow> quotes, std::vector<Instrument> instruments, Taxonomy taxonomy) {
    if (quotes.empty()) {
        throw Error(ErrorKind::Validation, "empty dataset: no quotes");
    }
    Dataset ds;
    ds.taxonomy_ = std::move(taxonomy);
    for (auto& inst : instruments) {
        if (!ds.taxonomy_.contains_l3(inst.sector_l3)) {
            throw Error(ErrorKind::Validation,
                        "instrument " + inst.ticker + ": sector '" + inst.sector_l3 + "' missing from taxonomy");
        }
        const std::string key = inst.ticker;
        if (!ds.instruments_.emplace(key, std::move(inst)).second) {
            throw Error(ErrorKind::Validation, "duplicate ticker '" + key + "'");
        }
    }

    std::set<std::string> missing;
    for (const auto& q : quotes) {
        if (ds.instruments_.find(q.ticker) == ds.instruments_.end()) {
            missing.insert(q.ticker);
        }
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) {
            names += (names.empty() ? "" : ", ") + m;
        }
        throw Error(ErrorKind::Validation, "quote tickers missing from instruments: " + names);
    }

    std::set<Date> calendar;
    for (auto& q : quotes) {
        calendar.insert(q.date);
        auto& s = ds.series_[q.ticker];
        s.ticker = q.ticker;
        s.raw.push_back(std::move(q));
    }
    for (auto& [ticker, s] : ds.series_) {
        std::sort(s.raw.begin(), s.raw.end(), [](const QuoteRow& a, const QuoteRow& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < s.raw.size(); ++i) {
            if (s.raw[i].date == s.raw[i - 1].date) {
                throw Error(ErrorKind::Validation, "duplicate quote for " + ticker + " on " + s.raw[i].date.iso());
            }
        }
        // A factor on day d rescales every earlier day, so walk backward
        // accumulating the product of later factors.
        s.bars.resize(s.raw.size());
        double factor = 1.0;
        for (std::size_t k = s.raw.size(); k-- > 0;) {
            const auto& r = s.raw[k];
            s.bars[k] = Bar{r.date, r.open * factor, r.high * factor, r.low * factor, r.close * factor,
                            static_cast<double>(r.volume) / factor};
            factor *= r.adjustment;
        }
    }
    ds.calendar_.assign(calendar.begin(), calendar.end());
    return ds;
}

const QuoteSeries& Dataset::series(std::string_view ticker) const {
    const auto it = series_.find(ticker);
    if (it == series_.end()) {
        throw Error(ErrorKind::Validation, "no quotes for ticker '" + std::string(ticker) + "'");
    }
    return it->second;
}

const Instrument& Dataset::instrument(std::string_view ticker) const {
    const auto it = instruments_.find(ticker);
    if (it == instruments_.end()) {
        throw Error(ErrorKind::Validation, "unknown ticker '" + std::string(ticker) + "'");
    }
    return it->second;
}

void Dataset::check_portfolio(const Portfolio& portfolio) const {
    for (const auto& p : portfolio.positions) {
        if (instruments_.find(p.ticker) == instruments_.end()) {
            throw Error(ErrorKind::Validation, "portfolio ticker '" + p.ticker + "' not found in instruments");
        }
    }
}

// --- Writers --------------------------------------------------------------

void write_quotes(const Dataset& dataset, std::ostream& out) {
    out << "date,ticker,open,high,low,close,volume,adjustment\n";
    for (const auto& [ticker, s] : dataset.series()) {
        for (const auto& r : s.raw) {
            out << r.date.iso() << ',' << csv_field(r.ticker) << ',' << format_double(r.open) << ','
                << format_double(r.high) << ',' << format_double(r.low) << ',' << format_double(r.close) << ','
                << r.volume << ',' << format_double(r.adjustment) << '\n';
        }
    }
}

void write_instruments(const Dataset& dataset, std::ostream& out) {
    out << "ticker,name,market,sector_l3,shares_outstanding\n";
    for (const auto& [ticker, i] : dataset.instruments()) {
        out << csv_field(i.ticker) << ',' << csv_field(i.name) << ',' << to_string(i.market) << ','
            << csv_field(i.sector_l3) << ',' << i.shares_outstanding << '\n';
    }
}

void write_taxonomy(const Taxonomy& taxonomy, std::ostream& out) {
    out << "sector_l3,sector_l2,sector_l1\n";
    for (const auto& [l3, l2] : taxonomy.l3_to_l2()) {
        out << csv_field(l3) << ',' << csv_field(l2) << ',' << csv_field(taxonomy.l1_of_l2(l2)) << '\n';
    }
}

void write_portfolio(const Portfolio& portfolio, std::ostream& out) {
    out << "ticker,quantity\n";
    for (const auto& p : portfolio.positions) {
        out << csv_field(p.ticker) << ',' << p.quantity << '\n';
    }
}

// --- Files ----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <typename Parser>
auto parse_file(const std::filesystem::path& path, Parser&& parser) {
    std::istringstream in(read_file(path));
    try {
        return parser(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.filename().string() + ": " + e.what());
    }
}

}  // namespace

Dataset load_dataset(const SourcePaths& paths) {
    auto quotes = parse_file(paths.quotes, [](std::istream& in) { return parse_quotes(in); });
    auto instruments = parse_file(paths.instruments, [](std::istream& in) { return parse_instruments(in); });
    auto taxonomy = parse_file(paths.taxonomy, [](std::istream& in) { return parse_taxonomy(in); });
    return Dataset::build(std::move(quotes), std::move(instruments), std::move(taxonomy));
}

Portfolio load_portfolio(const std::filesystem::path& path) {
    return parse_file(path, [](std::istream& in) { return parse_portfolio(in); });
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Internal, "SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string dataset_manifest_json(const SourcePaths& paths) {
    nlohmann::ordered_json j;
    const auto entry = [](const std::filesystem::path& p) {
        return nlohmann::ordered_json{{"path", p.string()}, {"sha256", sha256_hex(read_file(p))}};
    };
    j["quotes"] = entry(paths.quotes);
    j["instruments"] = entry(paths.instruments);
    j["taxonomy"] = entry(paths.taxonomy);
    return j.dump(2) + "\n";
}

std::string dataset_checksum(const SourcePaths& paths) {
    return sha256_hex(sha256_hex(read_file(paths.quotes)) + sha256_hex(read_file(paths.instruments)) +
                      sha256_hex(read_file(paths.taxonomy)));
}

}  // namespace symbourse::market
