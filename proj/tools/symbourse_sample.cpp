// Writes the deterministic synthetic sample (quotes, instruments, taxonomy,
// portfolio) and optionally a planted-cluster indicator table.

#include "symbourse/sample_data.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic market data", "symbourse_sample"};
    std::string dir = "sample";
    symbourse::sample::Options options;
    bool planted = false;
    app.add_option("--out-dir", dir, "destination directory")->capture_default_str();
    app.add_option("--seed", options.seed, "random seed")->capture_default_str();
    app.add_option("--stocks", options.stocks, "number of stocks")->capture_default_str();
    app.add_option("--days", options.days, "number of trading days")->capture_default_str();
    app.add_flag("--planted", planted, "also write planted.csv (250 objects, 8 groups)");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto data = symbourse::sample::generate(options);
        const auto paths = symbourse::sample::write(data, dir);
        std::printf("wrote %s, %s, %s and portfolio.csv\n", paths.quotes.string().c_str(),
                    paths.instruments.string().c_str(), paths.taxonomy.string().c_str());
        if (planted) {
            const auto p = symbourse::sample::planted_indicators(250, 8, 6.0, options.seed);
            std::ofstream f(std::filesystem::path(dir) / "planted.csv", std::ios::binary | std::ios::trunc);
            f << symbourse::symbolic::write_table(p.table);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "symbourse_sample: %s\n", e.what());
        return 1;
    }
    return 0;
}
