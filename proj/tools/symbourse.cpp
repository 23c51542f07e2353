// Command-line front end. Everything goes through the C interface.

#include "symbourse/symbourse.h"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Failure {
    std::string stage;
    std::string message;
};

void check(sb_status status, const char* stage) {
    if (status != SB_OK) throw Failure{stage, sb_last_error()};
}

struct DatasetDeleter {
    void operator()(sb_dataset* d) const { sb_dataset_free(d); }
};
struct TableDeleter {
    void operator()(sb_table* t) const { sb_table_free(t); }
};
struct ResultDeleter {
    void operator()(sb_result* r) const { sb_result_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { sb_string_free(s); }
};
using DatasetPtr = std::unique_ptr<sb_dataset, DatasetDeleter>;
using TablePtr = std::unique_ptr<sb_table, TableDeleter>;
using ResultPtr = std::unique_ptr<sb_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Options {
    std::string quotes, instruments, taxonomy, portfolio;
    std::string date, level = "global-market", granularity = "action", scope;
    std::string variables = "fundamental,medium-long";
    std::string method = "div";
    std::string axes = "1,2";
    std::string dissimilarity = "computed";
    std::string out_dir, input, output;
    std::string report, assignments, svg, csv, text;
    int k = 8;
    bool no_normalize = false;
    bool dry_run = false;
    bool sd_ret = false;
};

void add_data_flags(CLI::App* cmd, Options& o, bool required) {
    auto* q = cmd->add_option("--quotes", o.quotes, "quote CSV");
    auto* i = cmd->add_option("--instruments", o.instruments, "instrument CSV");
    auto* t = cmd->add_option("--taxonomy", o.taxonomy, "sector taxonomy CSV");
    if (required) {
        q->required();
        i->required();
        t->required();
    }
}

void add_query_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--level", o.level, "global-market | market | portfolio | sector | action")
        ->capture_default_str();
    cmd->add_option("--granularity", o.granularity, "market | sector-l1 | sector-l2 | sector-l3 | action | week")
        ->capture_default_str();
    cmd->add_option("--scope", o.scope, "market code, sector code or ticker");
    cmd->add_option("--portfolio", o.portfolio, "portfolio CSV (level=portfolio)");
    cmd->add_option("--date", o.date, "analysis date YYYY-MM-DD (default: last trading day)");
    cmd->add_option("--variables", o.variables, "variable sets or names, comma separated")->capture_default_str();
}

void add_output_flag(CLI::App* cmd, Options& o) {
    cmd->add_option("--out-dir", o.out_dir, "output directory (default: $SYMBOURSE_OUT or .)");
}

std::string out_dir(const Options& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("SYMBOURSE_OUT"); env != nullptr && *env != '\0') return env;
    return ".";
}

bool have_dataset(const Options& o) { return !o.quotes.empty() || !o.instruments.empty() || !o.taxonomy.empty(); }

DatasetPtr load(const Options& o) {
    if (o.quotes.empty() || o.instruments.empty() || o.taxonomy.empty()) {
        throw Failure{"load", "--quotes, --instruments and --taxonomy are all required"};
    }
    sb_dataset* d = nullptr;
    check(sb_dataset_load(o.quotes.c_str(), o.instruments.c_str(), o.taxonomy.c_str(), &d), "load");
    return DatasetPtr(d);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

sb_query query_of(const Options& o, const char* method) {
    sb_query q;
    sb_query_init(&q);
    q.level = o.level.c_str();
    q.granularity = o.granularity.c_str();
    q.scope = opt(o.scope);
    q.portfolio_path = opt(o.portfolio);
    q.variables = o.variables.c_str();
    q.method = method;
    q.date = opt(o.date);
    q.dissimilarity = o.dissimilarity.c_str();
    q.k = o.k;
    q.normalize = o.no_normalize ? 0 : 1;
    const auto comma = o.axes.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument("axes");
        std::size_t used = 0;
        q.axis_x = std::stoi(o.axes.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("axes");
        q.axis_y = std::stoi(o.axes.substr(comma + 1), &used);
        if (used != o.axes.size() - comma - 1) throw std::invalid_argument("axes");
    } catch (const std::exception&) {
        throw Failure{"arguments", "--axes expects two axis numbers such as 1,2"};
    }
    return q;
}

void write_text(const std::string& path, const char* content) {
    if (path.empty() || path == "-") {
        std::fputs(content, stdout);
        return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << content)) throw Failure{"write", "cannot write '" + path + "'"};
}

void print_warnings(const sb_result* r) {
    for (std::size_t i = 0; i < sb_result_warning_count(r); ++i) {
        std::fprintf(stderr, "warning: %s\n", sb_result_warning(r, i));
    }
}

// Runs a method either on --input (table or indicator CSV) or on a dataset query.
ResultPtr run_method(const Options& o, const char* method) {
    const sb_query q = query_of(o, method);
    sb_result* r = nullptr;
    if (!o.input.empty()) {
        sb_table* t = nullptr;
        check(sb_table_read_file(o.input.c_str(), &t), "read table");
        TablePtr table(t);
        check(sb_run_table(table.get(), &q, &r), method);
    } else {
        auto dataset = load(o);
        check(sb_run_query(dataset.get(), &q, &r), method);
    }
    ResultPtr result(r);
    print_warnings(result.get());
    return result;
}

// Explicit per-artifact destinations; everything else goes to the out dir.
void emit(const sb_result* r, const Options& o, const std::vector<std::pair<std::string, std::string>>& routes) {
    bool routed = false;
    for (const auto& [name_prefix, path] : routes) {
        if (path.empty()) continue;
        for (std::size_t i = 0; i < sb_result_artifact_count(r); ++i) {
            const std::string name = sb_result_artifact_name(r, i);
            if (name.rfind(name_prefix, 0) == 0) {
                write_text(path, sb_result_artifact_content(r, i));
                routed = true;
            }
        }
    }
    if (!routed || !o.out_dir.empty()) {
        const std::string dir = out_dir(o);
        check(sb_result_write(r, dir.c_str()), "write");
        std::fprintf(stderr, "wrote %zu artifact(s) to %s\n", sb_result_artifact_count(r), dir.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbolic data analysis of stock-market data", "symbourse"};
    app.set_version_flag("--version", sb_version());
    app.require_subcommand(1);
    Options o;

    auto* ingest = app.add_subcommand("ingest", "validate the three source files and write dataset_manifest.json");
    add_data_flags(ingest, o, true);
    add_output_flag(ingest, o);

    auto* describe = app.add_subcommand("describe", "summarise a dataset");
    add_data_flags(describe, o, true);
    describe->add_option("--date", o.date, "analysis date");

    auto* indicators = app.add_subcommand("indicators", "per-stock indicators at a date");
    add_data_flags(indicators, o, true);
    indicators->add_option("--date", o.date, "analysis date");
    indicators->add_flag("--sd-ret", o.sd_ret, "add the standard deviation of daily returns");
    indicators->add_option("--output", o.output, "output file (default: stdout)");

    auto* aggregate = app.add_subcommand("aggregate", "build a symbolic table");
    add_data_flags(aggregate, o, true);
    add_query_flags(aggregate, o);
    aggregate->add_option("--output", o.output, "output file (default: stdout)");

    auto* div = app.add_subcommand("div", "divisive monothetic clustering");
    add_data_flags(div, o, false);
    add_query_flags(div, o);
    div->add_option("--input", o.input, "symbolic table or indicator CSV");
    div->add_option("--k", o.k, "number of classes")->capture_default_str();
    div->add_flag("--no-normalize", o.no_normalize, "skip inverse standard deviation scaling");
    div->add_option("--report", o.report, "text report path");
    div->add_option("--assignments", o.assignments, "label,class CSV path");
    add_output_flag(div, o);

    auto* pca = app.add_subcommand("pca", "principal components of interval data");
    add_data_flags(pca, o, false);
    add_query_flags(pca, o);
    pca->add_option("--input", o.input, "symbolic table or indicator CSV");
    pca->add_option("--axes", o.axes, "factor plane, 1-based")->capture_default_str();
    pca->add_option("--svg", o.svg, "factor plane SVG path");
    pca->add_option("--csv", o.csv, "rectangle CSV path");
    add_output_flag(pca, o);

    auto* pyramid = app.add_subcommand("pyramid", "pyramidal classification");
    add_data_flags(pyramid, o, false);
    add_query_flags(pyramid, o);
    pyramid->add_option("--input", o.input, "symbolic table or indicator CSV");
    pyramid->add_option("--dissimilarity", o.dissimilarity, "dissimilarity CSV, or computed")->capture_default_str();
    pyramid->add_option("--svg", o.svg, "pyramid SVG path");
    pyramid->add_option("--text", o.text, "palier listing path");
    add_output_flag(pyramid, o);

    auto* analyze = app.add_subcommand("analyze", "run a full level x granularity query");
    add_data_flags(analyze, o, true);
    add_query_flags(analyze, o);
    analyze->add_option("--method", o.method, "div | pca | pyramid | describe")->capture_default_str();
    analyze->add_option("--k", o.k, "DIV: number of classes")->capture_default_str();
    analyze->add_option("--axes", o.axes, "PCA: factor plane, 1-based")->capture_default_str();
    analyze->add_option("--dissimilarity", o.dissimilarity, "PYR: dissimilarity CSV, or computed")
        ->capture_default_str();
    analyze->add_flag("--no-normalize", o.no_normalize, "DIV: skip inverse standard deviation scaling");
    analyze->add_flag("--dry-run", o.dry_run, "print the plan without running it");
    add_output_flag(analyze, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) {
            auto dataset = load(o);
            char* manifest = nullptr;
            check(sb_dataset_manifest(dataset.get(), &manifest), "ingest");
            StringPtr m(manifest);
            const auto path = std::filesystem::path(out_dir(o)) / "dataset_manifest.json";
            write_text(path.string(), m.get());
            std::printf("%zu instruments loaded; manifest written to %s\n", sb_dataset_ticker_count(dataset.get()),
                        path.string().c_str());
        } else if (describe->parsed()) {
            auto dataset = load(o);
            char* text = nullptr;
            check(sb_dataset_describe(dataset.get(), opt(o.date), &text), "describe");
            StringPtr t(text);
            std::fputs(t.get(), stdout);
        } else if (indicators->parsed()) {
            auto dataset = load(o);
            char* text = nullptr;
            check(sb_dataset_indicators_csv(dataset.get(), opt(o.date), o.sd_ret ? 1 : 0, &text), "indicators");
            StringPtr t(text);
            write_text(o.output, t.get());
        } else if (aggregate->parsed()) {
            auto dataset = load(o);
            const sb_query q = query_of(o, "describe");
            sb_table* t = nullptr;
            check(sb_query_table(dataset.get(), &q, &t), "aggregate");
            TablePtr table(t);
            char* text = nullptr;
            check(sb_table_to_csv(table.get(), &text), "aggregate");
            StringPtr csv(text);
            write_text(o.output, csv.get());
        } else if (div->parsed()) {
            auto r = run_method(o, "div");
            emit(r.get(), o, {{"div_report", o.report}, {"div_assignments", o.assignments}});
        } else if (pca->parsed()) {
            auto r = run_method(o, "pca");
            emit(r.get(), o, {{"pca_plane", o.svg}, {"pca_rectangles", o.csv}});
        } else if (pyramid->parsed()) {
            ResultPtr r;
            const bool from_matrix = o.dissimilarity != "computed" && o.input.empty() && !have_dataset(o);
            if (from_matrix) {
                std::ifstream f(o.dissimilarity, std::ios::binary);
                if (!f) throw Failure{"read dissimilarity", "cannot open '" + o.dissimilarity + "'"};
                const std::string text{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
                sb_result* raw = nullptr;
                check(sb_run_dissimilarity(text.c_str(), &raw), "pyramid");
                r.reset(raw);
            } else {
                r = run_method(o, "pyramid");
            }
            emit(r.get(), o, {{"pyramid.svg", o.svg}, {"pyramid.txt", o.text}});
        } else if (analyze->parsed()) {
            auto dataset = load(o);
            const sb_query q = query_of(o, o.method.c_str());
            if (o.dry_run) {
                char* text = nullptr;
                check(sb_query_plan(dataset.get(), &q, &text), "plan");
                StringPtr t(text);
                std::fputs(t.get(), stdout);
                return 0;
            }
            sb_result* raw = nullptr;
            check(sb_run_query(dataset.get(), &q, &raw), o.method.c_str());
            ResultPtr r(raw);
            print_warnings(r.get());
            emit(r.get(), o, {});
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "symbourse: %s: %s\n", f.stage.c_str(), f.message.c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "symbourse: %s\n", e.what());
        return 1;
    }
    return 0;
}
