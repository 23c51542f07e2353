#include "symbourse/symbourse.h"

#include "symbourse/pipeline.hpp"

#include <cstdlib>
#include <cstring>
#include <new>

using namespace symbourse;

struct sb_dataset {
    market::SourcePaths paths;
    market::Dataset dataset;
    std::string checksum;
};

struct sb_table {
    symbolic::SymbolicTable table;
};

struct sb_result {
    pipeline::RunResult result;
};

namespace {

thread_local std::string last_error;

sb_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return SB_ERR_INVALID_ARGUMENT;
        case ErrorKind::Io: return SB_ERR_IO;
        case ErrorKind::Parse: return SB_ERR_PARSE;
        case ErrorKind::Validation: return SB_ERR_VALIDATION;
        case ErrorKind::InsufficientHistory: return SB_ERR_INSUFFICIENT_HISTORY;
        case ErrorKind::Query: return SB_ERR_QUERY;
        case ErrorKind::Internal: return SB_ERR_INTERNAL;
    }
    return SB_ERR_INTERNAL;
}

template <class F>
sb_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return SB_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SB_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return SB_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw Error(ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

bool set(const char* s) { return s != nullptr && *s != '\0'; }

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::optional<Date> date_arg(const char* date) {
    if (!set(date)) return std::nullopt;
    return Date::parse(date);
}

pipeline::MethodParams params_of(const sb_query& q) {
    pipeline::MethodParams p;
    if (set(q.method)) p.method = pipeline::parse_method(q.method);
    if (q.k < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
    if (q.axis_x < 1 || q.axis_y < 1) throw Error(ErrorKind::InvalidArgument, "axes are 1-based");
    p.k = static_cast<std::size_t>(q.k);
    p.axes = {static_cast<std::size_t>(q.axis_x), static_cast<std::size_t>(q.axis_y)};
    p.normalize = q.normalize != 0;
    p.dissimilarity = set(q.dissimilarity) ? q.dissimilarity : "computed";
    return p;
}

pipeline::Plan plan_of(const sb_dataset* dataset, const sb_query* query) {
    require(dataset, "dataset");
    require(query, "query");
    pipeline::Query q;
    if (set(query->level)) q.level = pipeline::parse_level(query->level);
    if (set(query->granularity)) q.granularity = pipeline::parse_granularity(query->granularity);
    if (set(query->scope)) q.scope = query->scope;
    if (set(query->variables)) q.variables = query->variables;
    if (set(query->portfolio_path)) q.portfolio = market::load_portfolio(query->portfolio_path);
    q.date = date_arg(query->date);
    q.params = params_of(*query);
    return pipeline::resolve_query(q, dataset->dataset);
}

}  // namespace

extern "C" {

const char* sb_version(void) { return pipeline::kToolVersion.data(); }

const char* sb_last_error(void) { return last_error.c_str(); }

const char* sb_status_name(sb_status status) {
    switch (status) {
        case SB_OK: return "ok";
        case SB_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SB_ERR_IO: return "i/o error";
        case SB_ERR_PARSE: return "parse error";
        case SB_ERR_VALIDATION: return "validation error";
        case SB_ERR_INSUFFICIENT_HISTORY: return "insufficient history";
        case SB_ERR_QUERY: return "query error";
        case SB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void sb_string_free(char* s) { std::free(s); }

sb_status sb_dataset_load(const char* quotes_path, const char* instruments_path, const char* taxonomy_path,
                          sb_dataset** out) {
    return guarded([&] {
        require(quotes_path, "quotes path");
        require(instruments_path, "instruments path");
        require(taxonomy_path, "taxonomy path");
        require(out, "out");
        *out = nullptr;
        market::SourcePaths paths{quotes_path, instruments_path, taxonomy_path};
        auto dataset = market::load_dataset(paths);
        auto checksum = market::dataset_checksum(paths);
        *out = new sb_dataset{std::move(paths), std::move(dataset), std::move(checksum)};
    });
}

void sb_dataset_free(sb_dataset* dataset) { delete dataset; }

sb_status sb_dataset_describe(const sb_dataset* dataset, const char* date, char** out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out, "out");
        *out = dup(pipeline::describe_dataset(dataset->dataset, date_arg(date)));
    });
}

sb_status sb_dataset_manifest(const sb_dataset* dataset, char** out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out, "out");
        *out = dup(market::dataset_manifest_json(dataset->paths));
    });
}

sb_status sb_dataset_indicators_csv(const sb_dataset* dataset, const char* date, int with_sd_ret, char** out) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out, "out");
        *out = dup(pipeline::indicators_csv(dataset->dataset, date_arg(date), with_sd_ret != 0));
    });
}

size_t sb_dataset_ticker_count(const sb_dataset* dataset) {
    return dataset == nullptr ? 0 : dataset->dataset.instruments().size();
}

void sb_query_init(sb_query* query) {
    if (query == nullptr) return;
    *query = sb_query{};
    query->level = "global-market";
    query->granularity = "action";
    query->variables = "fundamental,medium-long";
    query->method = "div";
    query->dissimilarity = "computed";
    query->k = 8;
    query->axis_x = 1;
    query->axis_y = 2;
    query->normalize = 1;
}

sb_status sb_query_plan(const sb_dataset* dataset, const sb_query* query, char** out) {
    return guarded([&] {
        require(out, "out");
        *out = dup(plan_of(dataset, query).describe());
    });
}

sb_status sb_query_table(const sb_dataset* dataset, const sb_query* query, sb_table** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        const auto plan = plan_of(dataset, query);
        *out = new sb_table{pipeline::build_table(plan, dataset->dataset)};
    });
}

sb_status sb_run_query(const sb_dataset* dataset, const sb_query* query, sb_result** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        const auto plan = plan_of(dataset, query);
        *out = new sb_result{pipeline::run(plan, dataset->dataset, dataset->checksum)};
    });
}

sb_status sb_table_parse(const char* text, sb_table** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        *out = new sb_table{symbolic::read_table(text)};
    });
}

sb_status sb_table_read_file(const char* path, sb_table** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new sb_table{symbolic::read_table(market::read_file(path))};
    });
}

sb_status sb_table_to_csv(const sb_table* table, char** out) {
    return guarded([&] {
        require(table, "table");
        require(out, "out");
        *out = dup(symbolic::write_table(table->table));
    });
}

size_t sb_table_object_count(const sb_table* table) { return table == nullptr ? 0 : table->table.object_count(); }

void sb_table_free(sb_table* table) { delete table; }

sb_status sb_run_table(const sb_table* table, const sb_query* query, sb_result** out) {
    return guarded([&] {
        require(table, "table");
        require(query, "query");
        require(out, "out");
        *out = nullptr;
        const auto params = params_of(*query);
        const auto vars = pipeline::resolve_table_variables(set(query->variables) ? query->variables : "", table->table);
        *out = new sb_result{pipeline::run_table(table->table, params, vars)};
    });
}

sb_status sb_run_dissimilarity(const char* csv_text, sb_result** out) {
    return guarded([&] {
        require(csv_text, "csv text");
        require(out, "out");
        *out = nullptr;
        auto result = pipeline::run_dissimilarity_csv(csv_text);
        *out = new sb_result{std::move(result)};
    });
}

size_t sb_result_artifact_count(const sb_result* result) {
    return result == nullptr ? 0 : result->result.artifacts.size();
}

const char* sb_result_artifact_name(const sb_result* result, size_t index) {
    if (result == nullptr || index >= result->result.artifacts.size()) return nullptr;
    return result->result.artifacts[index].name.c_str();
}

const char* sb_result_artifact_content(const sb_result* result, size_t index) {
    if (result == nullptr || index >= result->result.artifacts.size()) return nullptr;
    return result->result.artifacts[index].content.c_str();
}

const char* sb_result_find(const sb_result* result, const char* name) {
    if (result == nullptr || name == nullptr) return nullptr;
    const auto* a = result->result.find(name);
    return a == nullptr ? nullptr : a->content.c_str();
}

size_t sb_result_warning_count(const sb_result* result) {
    return result == nullptr ? 0 : result->result.warnings.size();
}

const char* sb_result_warning(const sb_result* result, size_t index) {
    if (result == nullptr || index >= result->result.warnings.size()) return nullptr;
    return result->result.warnings[index].c_str();
}

sb_status sb_result_write(const sb_result* result, const char* out_dir) {
    return guarded([&] {
        require(result, "result");
        require(out_dir, "output directory");
        pipeline::write_artifacts(result->result, out_dir);
    });
}

void sb_result_free(sb_result* result) { delete result; }

}  // extern "C"
