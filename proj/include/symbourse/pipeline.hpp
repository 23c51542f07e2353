#pragma once

#include "symbourse/common.hpp"
#include "symbourse/market_data.hpp"
#include "symbourse/symbolic.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symbourse::pipeline {

inline constexpr std::string_view kToolName = "symbourse";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Level { GlobalMarket, Market, Portfolio, Sector, Action };
enum class Granularity { Market, SectorL1, SectorL2, SectorL3, Action, Week };
enum class Method { Div, Pca, Pyramid, Describe };

inline constexpr Level kAllLevels[] = {Level::GlobalMarket, Level::Market, Level::Portfolio, Level::Sector,
                                       Level::Action};
inline constexpr Granularity kAllGranularities[] = {Granularity::Market,   Granularity::SectorL1,
                                                    Granularity::SectorL2, Granularity::SectorL3,
                                                    Granularity::Action,   Granularity::Week};

std::string_view to_string(Level level);
std::string_view to_string(Granularity granularity);
std::string_view to_string(Method method);
Level parse_level(std::string_view text);
// Accepts `sector` as an alias of `sector-l3`.
Granularity parse_granularity(std::string_view text);
Method parse_method(std::string_view text);

// Filled cells of the analysis-level x granularity matrix.
bool is_defined_cell(Level level, Granularity granularity);

struct MethodParams {
    Method method = Method::Div;
    std::size_t k = 8;
    std::pair<std::size_t, std::size_t> axes{1, 2};  // 1-based
    bool normalize = true;
    // Pyramid input: empty or "computed" derives it from the table; anything
    // else is a path to a dissimilarity CSV.
    std::string dissimilarity = "computed";
};

struct Query {
    Level level = Level::GlobalMarket;
    Granularity granularity = Granularity::Action;
    std::string variables = "fundamental,medium-long";
    std::string scope;
    std::optional<market::Portfolio> portfolio;
    std::optional<Date> date;
    MethodParams params;
};

// Built-in sets: fundamental, medium-long, short, all. Anything else is taken
// as an explicit variable name. Week granularity maps window indicators onto
// their daily counterparts (perf1d, volat1d, capit1d).
std::vector<std::string> resolve_variables(std::string_view spec, Granularity granularity);
bool is_categorical_variable(std::string_view name);
// Variable selection on an existing table: set names expand to the members
// the table carries, other tokens are kept verbatim. Empty spec keeps all.
std::vector<std::string> resolve_table_variables(std::string_view spec, const symbolic::SymbolicTable& table);

struct Plan {
    Query query;
    Date date;
    std::vector<std::string> tickers;  // in scope and usable
    std::vector<std::string> skipped;  // in scope, not enough history
    symbolic::GroupKey group_key = symbolic::GroupKey::Action;
    std::vector<std::string> variables;
    std::vector<std::string> warnings;

    std::string describe() const;
};

Plan resolve_query(const Query& query, const market::Dataset& dataset);

symbolic::IndividualTable individuals(const Plan& plan, const market::Dataset& dataset);
symbolic::SymbolicTable build_table(const Plan& plan, const market::Dataset& dataset);

struct Artifact {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<Artifact> artifacts;  // the manifest is last
    std::vector<std::string> warnings;

    const Artifact* find(std::string_view name) const;
};

// Method stage only. `variables` restricts the table; empty uses all columns.
RunResult run_method(const symbolic::SymbolicTable& table, const MethodParams& params,
                     std::span<const std::string> variables, std::string_view date_range = {});
// Pyramid from a precomputed dissimilarity matrix.
RunResult run_pyramid_matrix(const Matrix& dissimilarity, std::vector<std::string> labels);
// Pyramid from dissimilarity CSV text, with a manifest keyed by its checksum.
RunResult run_dissimilarity_csv(std::string_view csv_text);

// Full pipeline: scope -> indicators -> aggregation -> method -> manifest.
RunResult run(const Plan& plan, const market::Dataset& dataset, std::string_view dataset_checksum);
// Method on an existing table, with a manifest keyed by the table checksum.
RunResult run_table(const symbolic::SymbolicTable& table, const MethodParams& params,
                    std::span<const std::string> variables);

// Writes every artifact, the manifest last; nothing is written if the
// directory cannot be created.
void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir);

std::string describe_dataset(const market::Dataset& dataset, std::optional<Date> at = std::nullopt);

std::string indicators_csv(const market::Dataset& dataset, std::optional<Date> at, bool with_sd_ret);

}  // namespace symbourse::pipeline
