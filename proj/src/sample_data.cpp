#include "symbourse/sample_data.hpp"

#include "symbourse/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace symbourse::sample {

namespace {

using market::Market;

struct Branch {
    const char* l1;
    const char* l2;
    std::vector<const char*> l3;
};

const std::vector<Branch>& tree() {
    static const std::vector<Branch> t{
        {"INDUSTRIE", "ENERGIE", {"PETROLE", "ELECTRICITE"}},
        {"INDUSTRIE", "MATERIAUX", {"CHIMIE", "METALLURGIE"}},
        {"INDUSTRIE", "CONSTRUCTION", {"BATIMENT", "MATERIAUX_CONSTRUCTION"}},
        {"INDUSTRIE", "EQUIPEMENT", {"AUTOMOBILE", "AERONAUTIQUE"}},
        {"SERVICES", "TECHNOLOGIE", {"INFORMATIQUE", "ELECTRONIQUE"}},
        {"SERVICES", "TELECOMS", {"TELECOM"}},
        {"SERVICES", "MEDIAS", {"AUDIOVISUEL", "EDITION"}},
        {"SERVICES", "DISTRIBUTION", {"COMMERCE", "LOISIRS"}},
        {"SERVICES", "SANTE", {"PHARMACIE", "BIOTECHNOLOGIE"}},
        {"FINANCE", "BANQUES", {"BANQUE"}},
        {"FINANCE", "ASSURANCES", {"ASSURANCE", "REASSURANCE"}},
        {"FINANCE", "IMMOBILIER", {"FONCIERES", "SOCIETES_INVESTISSEMENT"}},
    };
    return t;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

market::Taxonomy reference_taxonomy() {
    market::Taxonomy tax;
    for (const auto& b : tree()) {
        for (const char* l3 : b.l3) tax.add(l3, b.l2, b.l1);
    }
    return tax;
}

SampleData generate(const Options& options) {
    if (options.stocks == 0 || options.days < 2) {
        throw Error(ErrorKind::InvalidArgument, "sample needs at least one stock and two days");
    }
    if (options.thin + options.splits > options.stocks || options.portfolio > options.stocks) {
        throw Error(ErrorKind::InvalidArgument, "sample options exceed the number of stocks");
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SampleData data;
    data.taxonomy = reference_taxonomy();
    const auto l3_codes = data.taxonomy.codes(market::SectorLevel::L3);

    std::vector<Date> calendar;
    for (Date d(1999, 11, 1); calendar.size() < options.days; d = d.plus_days(1)) {
        if (d.weekday_index() < 5) calendar.push_back(d);
    }

    // Market shares roughly follow the Paris Bourse of the time.
    const Market markets[] = {Market::RM, Market::RME, Market::SM, Market::NM};
    const double market_weight[] = {0.40, 0.16, 0.24, 0.20};
    std::vector<double> sector_drift(l3_codes.size());
    for (auto& d : sector_drift) d = 0.002 * gauss(rng);

    for (std::size_t s = 0; s < options.stocks; ++s) {
        char ticker[32];
        std::snprintf(ticker, sizeof ticker, "SB%03zu", s + 1);
        market::Instrument inst;
        inst.ticker = ticker;
        inst.name = "Societe " + std::to_string(s + 1);
        double u = unit(rng);
        std::size_t m = 0;
        while (m + 1 < 4 && u > market_weight[m]) u -= market_weight[m++];
        inst.market = markets[m];
        const std::size_t sector = s % l3_codes.size();
        inst.sector_l3 = l3_codes[sector];
        const double small_cap = inst.market == Market::NM || inst.market == Market::SM ? 0.1 : 1.0;
        inst.shares_outstanding =
            static_cast<std::int64_t>(std::exp(15.5 + 1.5 * gauss(rng)) * small_cap) + 100000;
        data.instruments.push_back(inst);

        const bool thin = s >= options.stocks - options.thin;
        const bool split = !thin && s >= options.stocks - options.thin - options.splits;
        const std::size_t first = thin ? options.days - std::min<std::size_t>(options.days - 1, 15) : 0;
        const std::size_t split_day = options.days / 2;
        const double vol = (inst.market == Market::NM ? 0.04 : 0.02) * (0.6 + unit(rng));
        double close = std::exp(3.5 + 0.8 * gauss(rng));
        const double turnover = 0.001 + 0.004 * unit(rng);
        for (std::size_t t = first; t < options.days; ++t) {
            // Thinly traded second-market names skip some sessions.
            if (inst.market == Market::SM && t > first && unit(rng) < 0.04) continue;
            const double open = std::max(0.5, close * std::exp(0.3 * vol * gauss(rng)));
            close = std::max(0.5, close * std::exp(sector_drift[sector] + vol * gauss(rng)));
            market::QuoteRow row;
            row.date = calendar[t];
            row.ticker = inst.ticker;
            row.open = round2(open);
            row.close = round2(close);
            row.high = round2(std::max(row.open, row.close) * (1.0 + 0.5 * vol * unit(rng)));
            row.low = round2(std::min(row.open, row.close) * (1.0 - 0.5 * vol * unit(rng)));
            row.low = std::max(0.01, std::min({row.low, row.open, row.close}));
            row.high = std::max({row.high, row.open, row.close});
            row.volume = static_cast<std::int64_t>(static_cast<double>(inst.shares_outstanding) * turnover *
                                                   std::exp(0.5 * gauss(rng)));
            if (split && t < split_day) {
                // Pre-split quotes are twice the post-split price level.
                row.open *= 2.0;
                row.high *= 2.0;
                row.low *= 2.0;
                row.close *= 2.0;
                row.volume /= 2;
            }
            if (split && t == split_day) row.adjustment = 0.5;
            data.quotes.push_back(row);
        }
    }

    // Portfolio: evenly spaced tickers among those with full history.
    const std::size_t pool = options.stocks - options.thin;
    for (std::size_t i = 0; i < options.portfolio && pool > 0; ++i) {
        const std::size_t s = i * pool / options.portfolio;
        data.portfolio.positions.push_back(
            {data.instruments[s].ticker, static_cast<std::int64_t>(100 * (1 + (s * 7) % 10))});
    }
    return data;
}

market::Dataset build(const SampleData& data) {
    return market::Dataset::build(data.quotes, data.instruments, data.taxonomy);
}

market::SourcePaths write(const SampleData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto dataset = build(data);
    market::SourcePaths paths{dir / "quotes.csv", dir / "instruments.csv", dir / "taxonomy.csv"};
    const auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::Io, "cannot write '" + p.string() + "'");
        return f;
    };
    {
        auto f = open(paths.quotes);
        market::write_quotes(dataset, f);
    }
    {
        auto f = open(paths.instruments);
        market::write_instruments(dataset, f);
    }
    {
        auto f = open(paths.taxonomy);
        market::write_taxonomy(data.taxonomy, f);
    }
    {
        auto f = open(dir / "portfolio.csv");
        market::write_portfolio(data.portfolio, f);
    }
    return paths;
}

Planted planted_indicators(std::size_t objects, std::size_t groups, double separation, std::uint64_t seed) {
    if (groups == 0 || objects < groups) {
        throw Error(ErrorKind::InvalidArgument, "need at least one object per group");
    }
    struct Scale {
        double base;
        double sd;
    };
    // perfmois, perf2sem, volat20, volat10, capim10, capitmds
    const Scale scales[] = {{-30.0, 2.0}, {-20.0, 1.5}, {0.5, 0.05}, {0.5, 0.08}, {2e6, 4e5}, {0.2, 0.1}};
    const auto& names = indicators::standard_names();
    const std::size_t p = names.size();

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> level(p, std::vector<std::size_t>(groups));
    for (auto& l : level) {
        std::iota(l.begin(), l.end(), 0);
        std::shuffle(l.begin(), l.end(), rng);
    }
    // Uniform noise of standard deviation sd spans +-sqrt(3) sd.
    std::uniform_real_distribution<double> noise(-std::sqrt(3.0), std::sqrt(3.0));

    Planted out;
    out.table.group_key = "action";
    for (std::size_t j = 0; j < p; ++j) {
        out.table.variables.push_back({names[j], symbolic::VariableKind::Single, ""});
    }
    for (std::size_t i = 0; i < objects; ++i) {
        const std::size_t g = i * groups / objects;
        char label[32];
        std::snprintf(label, sizeof label, "P%03zu", i + 1);
        out.table.labels.push_back(label);
        out.table.member_counts.push_back(1);
        std::vector<symbolic::SymbolicValue> row;
        for (std::size_t j = 0; j < p; ++j) {
            const double centre = scales[j].base + scales[j].sd * separation * static_cast<double>(level[j][g]);
            row.emplace_back(centre + scales[j].sd * noise(rng));
        }
        out.table.cells.push_back(std::move(row));
        out.group.push_back(g);
    }
    return out;
}

}  // namespace symbourse::sample
