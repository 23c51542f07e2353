#include "symbourse/pipeline.hpp"

#include "symbourse/div.hpp"
#include "symbourse/indicators.hpp"
#include "symbourse/ipca.hpp"
#include "symbourse/pyramid.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace symbourse::pipeline {

namespace {

using market::SectorLevel;
using symbolic::GroupKey;

const std::vector<std::string> kCategorical{"market", "sector_l1", "sector_l2", "sector_l3"};
const std::vector<std::string> kDailyNumeric{"perf1d", "volat1d", "capit1d", "capitmds"};

const std::map<std::string, std::string>& units() {
    static const std::map<std::string, std::string> u{
        {"perfmois", "%"},       {"perf2sem", "%"},   {"volat20", "permille"}, {"volat10", "permille"},
        {"capim10", "EUR"},      {"capitmds", "EUR_bn"}, {"sd_ret", "%"},      {"perf1d", "%"},
        {"volat1d", "permille"}, {"capit1d", "EUR"}};
    return u;
}

std::string daily_counterpart(const std::string& name) {
    if (name == "perfmois" || name == "perf2sem" || name == "sd_ret") return "perf1d";
    if (name == "volat20" || name == "volat10") return "volat1d";
    if (name == "capim10") return "capit1d";
    return name;
}

GroupKey group_key_for(Granularity g) {
    switch (g) {
        case Granularity::Market: return GroupKey::Market;
        case Granularity::SectorL1: return GroupKey::SectorL1;
        case Granularity::SectorL2: return GroupKey::SectorL2;
        case Granularity::SectorL3: return GroupKey::SectorL3;
        case Granularity::Action: return GroupKey::Action;
        case Granularity::Week: return GroupKey::Week;
    }
    return GroupKey::Action;
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

Artifact manifest_artifact(nlohmann::ordered_json manifest, const std::vector<Artifact>& artifacts) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& a : artifacts) {
        list.push_back({{"name", a.name}, {"sha256", market::sha256_hex(a.content)}});
    }
    manifest["artifacts"] = std::move(list);
    return {"manifest.json", manifest.dump(2) + "\n"};
}

nlohmann::ordered_json params_json(const MethodParams& p) {
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(p.method));
    switch (p.method) {
        case Method::Div:
            j["k"] = p.k;
            j["normalize"] = p.normalize;
            break;
        case Method::Pca: j["axes"] = {p.axes.first, p.axes.second}; break;
        case Method::Pyramid: j["dissimilarity"] = p.dissimilarity.empty() ? "computed" : p.dissimilarity; break;
        case Method::Describe: break;
    }
    return j;
}

std::string describe_table(const symbolic::SymbolicTable& table, std::string_view date_range) {
    std::string out = "objects: " + std::to_string(table.object_count()) + " (group_key=" + table.group_key + ")\n";
    std::size_t members = 0;
    for (auto m : table.member_counts) members += m;
    out += "members: " + std::to_string(members) + "\n";
    if (!date_range.empty()) {
        out += "dates: " + std::string(date_range) + "\n";
    }
    out += "variables:\n";
    for (std::size_t j = 0; j < table.variables.size(); ++j) {
        const auto& v = table.variables[j];
        out += "  " + v.name + " (" + std::string(symbolic::to_string(v.kind)) +
               (v.unit.empty() ? "" : ", " + v.unit) + "): ";
        if (v.kind == symbolic::VariableKind::Modal) {
            std::set<std::string> cats;
            for (const auto& row : table.cells) {
                for (const auto& [c, p] : std::get<symbolic::Modal>(row[j])) cats.insert(c);
            }
            out += std::to_string(cats.size()) + " categories {" +
                   join(std::vector<std::string>(cats.begin(), cats.end()), ",") + "}\n";
        } else {
            double lo = 0.0, hi = 0.0, width = 0.0;
            for (std::size_t i = 0; i < table.cells.size(); ++i) {
                const auto iv = symbolic::as_interval(table.cells[i][j]);
                if (i == 0 || iv.lo < lo) lo = iv.lo;
                if (i == 0 || iv.hi > hi) hi = iv.hi;
                width += iv.hi - iv.lo;
            }
            out += "range [" + format_fixed(lo, 6) + ", " + format_fixed(hi, 6) + "], mean width " +
                   format_fixed(table.cells.empty() ? 0.0 : width / static_cast<double>(table.cells.size()), 6) + "\n";
        }
    }
    out += "labels: " + join(table.labels, ",") + "\n";
    return out;
}

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
        case Level::GlobalMarket: return "global-market";
        case Level::Market: return "market";
        case Level::Portfolio: return "portfolio";
        case Level::Sector: return "sector";
        case Level::Action: return "action";
    }
    return "?";
}

std::string_view to_string(Granularity granularity) {
    switch (granularity) {
        case Granularity::Market: return "market";
        case Granularity::SectorL1: return "sector-l1";
        case Granularity::SectorL2: return "sector-l2";
        case Granularity::SectorL3: return "sector-l3";
        case Granularity::Action: return "action";
        case Granularity::Week: return "week";
    }
    return "?";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Div: return "div";
        case Method::Pca: return "pca";
        case Method::Pyramid: return "pyramid";
        case Method::Describe: return "describe";
    }
    return "?";
}

Level parse_level(std::string_view text) {
    for (auto l : kAllLevels) {
        if (to_string(l) == text) return l;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown level '" + std::string(text) +
                                                "' (expected global-market, market, portfolio, sector or action)");
}

Granularity parse_granularity(std::string_view text) {
    if (text == "sector") return Granularity::SectorL3;
    for (auto g : kAllGranularities) {
        if (to_string(g) == text) return g;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown granularity '" + std::string(text) +
                                                "' (expected market, sector-l1, sector-l2, sector-l3, action or week)");
}

Method parse_method(std::string_view text) {
    for (auto m : {Method::Div, Method::Pca, Method::Pyramid, Method::Describe}) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

bool is_defined_cell(Level level, Granularity g) {
    switch (level) {
        case Level::GlobalMarket: return true;
        case Level::Market: return g != Granularity::Market;
        case Level::Portfolio: return true;
        case Level::Sector: return g == Granularity::Action || g == Granularity::Week;
        case Level::Action: return g == Granularity::Week;
    }
    return false;
}

bool is_categorical_variable(std::string_view name) {
    return std::find(kCategorical.begin(), kCategorical.end(), name) != kCategorical.end();
}

std::vector<std::string> resolve_variables(std::string_view spec, Granularity granularity) {
    static const std::map<std::string, std::vector<std::string>> kSets{
        {"fundamental", {"capitmds", "capim10", "market", "sector_l3"}},
        {"medium-long", {"perfmois", "volat20"}},
        {"short", {"perf2sem", "volat10"}},
        {"all", {"perfmois", "perf2sem", "volat20", "volat10", "capim10", "capitmds", "market", "sector_l3"}},
    };
    std::vector<std::string> names;
    for (const auto& raw : split(spec, ',')) {
        const std::string token = trim(raw);
        if (token.empty()) continue;
        if (auto it = kSets.find(token); it != kSets.end()) {
            names.insert(names.end(), it->second.begin(), it->second.end());
        } else {
            names.push_back(token);
        }
    }
    std::vector<std::string> out;
    for (auto name : names) {
        if (granularity == Granularity::Week) {
            name = daily_counterpart(name);
            const bool known = is_categorical_variable(name) ||
                               std::find(kDailyNumeric.begin(), kDailyNumeric.end(), name) != kDailyNumeric.end();
            if (!known) {
                throw Error(ErrorKind::InvalidArgument, "unknown variable '" + name + "' for week granularity");
            }
        } else if (!is_categorical_variable(name) && !indicators::is_indicator_name(name)) {
            throw Error(ErrorKind::InvalidArgument, "unknown variable '" + name + "'");
        }
        if (std::find(out.begin(), out.end(), name) == out.end()) {
            out.push_back(name);
        }
    }
    if (out.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty variable set");
    }
    return out;
}

std::vector<std::string> resolve_table_variables(std::string_view spec, const symbolic::SymbolicTable& table) {
    const Granularity g = table.group_key == "week" ? Granularity::Week : Granularity::Action;
    std::vector<std::string> out;
    for (const auto& raw : split(spec, ',')) {
        const std::string token = trim(raw);
        if (token.empty()) continue;
        std::vector<std::string> names{token};
        if (token == "fundamental" || token == "medium-long" || token == "short" || token == "all") {
            names.clear();
            for (const auto& n : resolve_variables(token, g)) {
                if (table.variable_index(n)) names.push_back(n);
            }
        }
        for (const auto& n : names) {
            if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
        }
    }
    if (!trim(spec).empty() && out.empty()) {
        throw Error(ErrorKind::InvalidArgument, "none of the variables '" + std::string(spec) + "' is in the table");
    }
    return out;
}

Plan resolve_query(const Query& query, const market::Dataset& dataset) {
    if (!is_defined_cell(query.level, query.granularity)) {
        throw Error(ErrorKind::Query, "no analysis is defined for level '" + std::string(to_string(query.level)) +
                                          "' at granularity '" + std::string(to_string(query.granularity)) + "'");
    }
    const auto& params = query.params;
    if (params.method == Method::Div && params.k < 1) {
        throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
    }
    if (params.method == Method::Pca &&
        (params.axes.first < 1 || params.axes.second < 1 || params.axes.first == params.axes.second)) {
        throw Error(ErrorKind::InvalidArgument, "axes must be two distinct 1-based axis numbers");
    }

    Plan plan;
    plan.query = query;
    plan.date = query.date.value_or(dataset.calendar().back());
    plan.group_key = group_key_for(query.granularity);
    plan.variables = resolve_variables(query.variables, query.granularity);

    // Scope filter.
    std::vector<std::string> scope;
    const auto& tax = dataset.taxonomy();
    switch (query.level) {
        case Level::GlobalMarket:
            if (!query.scope.empty()) {
                throw Error(ErrorKind::Query, "global-market analysis takes no scope");
            }
            for (const auto& [t, _] : dataset.instruments()) scope.push_back(t);
            break;
        case Level::Market: {
            if (query.scope.empty()) throw Error(ErrorKind::Query, "market analysis needs --scope <market code>");
            const auto m = market::parse_market(query.scope);
            for (const auto& [t, inst] : dataset.instruments()) {
                if (inst.market == m) scope.push_back(t);
            }
            break;
        }
        case Level::Portfolio:
            if (!query.portfolio) throw Error(ErrorKind::Query, "portfolio analysis needs --portfolio <file>");
            dataset.check_portfolio(*query.portfolio);
            for (const auto& p : query.portfolio->positions) scope.push_back(p.ticker);
            std::sort(scope.begin(), scope.end());
            break;
        case Level::Sector: {
            if (query.scope.empty()) throw Error(ErrorKind::Query, "sector analysis needs --scope <sector code>");
            const auto level = tax.level_of(query.scope);
            if (!level) throw Error(ErrorKind::Query, "unknown sector '" + query.scope + "'");
            for (const auto& [t, inst] : dataset.instruments()) {
                if (tax.rollup(inst.sector_l3, *level) == query.scope) scope.push_back(t);
            }
            break;
        }
        case Level::Action:
            if (query.scope.empty()) throw Error(ErrorKind::Query, "action analysis needs --scope <ticker>");
            dataset.instrument(query.scope);
            scope.push_back(query.scope);
            break;
    }

    const std::size_t need = query.granularity == Granularity::Week ? 2 : indicators::kRequiredHistory;
    for (const auto& t : scope) {
        const std::size_t have = dataset.has_series(t) ? indicators::history_length(dataset.series(t), plan.date) : 0;
        (have >= need ? plan.tickers : plan.skipped).push_back(t);
    }
    if (!plan.skipped.empty()) {
        plan.warnings.push_back("skipped " + std::to_string(plan.skipped.size()) +
                                " ticker(s) with insufficient history: " + join(plan.skipped));
    }
    if (plan.tickers.empty()) {
        throw Error(ErrorKind::Query, "empty scope: no ticker with enough history for level '" +
                                          std::string(to_string(query.level)) + "'" +
                                          (query.scope.empty() ? "" : " scope '" + query.scope + "'"));
    }
    if (params.method == Method::Div || params.method == Method::Pca) {
        std::vector<std::string> categorical;
        for (const auto& v : plan.variables) {
            if (is_categorical_variable(v)) categorical.push_back(v);
        }
        if (!categorical.empty()) {
            plan.warnings.push_back("categorical variable(s) " + join(categorical) + " excluded from the numeric matrix");
        }
    }
    return plan;
}

std::string Plan::describe() const {
    std::string out = "plan:\n";
    out += "  1. scope: level=" + std::string(to_string(query.level));
    if (!query.scope.empty()) out += " scope=" + query.scope;
    if (query.portfolio) out += " portfolio=" + std::to_string(query.portfolio->positions.size()) + " positions";
    out += " -> " + std::to_string(tickers.size()) + " ticker(s)";
    if (!skipped.empty()) out += ", " + std::to_string(skipped.size()) + " skipped";
    out += "\n";
    if (query.granularity == Granularity::Week) {
        out += "  2. daily observations up to " + date.iso() + " (" + join(variables) + ")\n";
    } else {
        out += "  2. indicators at " + date.iso() + " (" + join(variables) + ")\n";
    }
    out += "  3. aggregate by " + std::string(symbolic::to_string(group_key)) + "\n";
    const auto& p = query.params;
    switch (p.method) {
        case Method::Div:
            out += std::string("  4. normalise: ") + (p.normalize ? "inverse standard deviation" : "none") + "\n";
            out += "  5. method: div K=" + std::to_string(p.k) + "\n";
            out += "  6. outputs: table.csv, div_report.txt, div_assignments.csv, manifest.json\n";
            break;
        case Method::Pca:
            out += "  4. normalise: standardised interval midpoints\n";
            out += "  5. method: pca axes " + std::to_string(p.axes.first) + "," + std::to_string(p.axes.second) + "\n";
            out += "  6. outputs: table.csv, pca_model.txt, pca_rectangles.csv, pca_plane_" +
                   std::to_string(p.axes.first) + "_" + std::to_string(p.axes.second) + ".svg, manifest.json\n";
            break;
        case Method::Pyramid:
            out += "  4. dissimilarity: " + std::string(p.dissimilarity.empty() ? "computed" : p.dissimilarity) + "\n";
            out += "  5. method: pyramid\n";
            out += "  6. outputs: table.csv, dissimilarity.csv, pyramid.txt, pyramid.svg, manifest.json\n";
            break;
        case Method::Describe:
            out += "  4. method: describe\n";
            out += "  5. outputs: table.csv, describe.txt, manifest.json\n";
            break;
    }
    for (const auto& w : warnings) out += "warning: " + w + "\n";
    return out;
}

symbolic::IndividualTable individuals(const Plan& plan, const market::Dataset& dataset) {
    symbolic::IndividualTable t;
    t.units = units();
    t.categorical_names = kCategorical;
    const bool weekly = plan.query.granularity == Granularity::Week;
    if (weekly) {
        t.numeric_names = kDailyNumeric;
        t.categorical_names.push_back("week");
    } else {
        t.numeric_names = indicators::standard_names();
        t.numeric_names.push_back("sd_ret");
    }
    const auto& tax = dataset.taxonomy();
    for (const auto& ticker : plan.tickers) {
        const auto& inst = dataset.instrument(ticker);
        std::vector<std::string> cats{std::string(market::to_string(inst.market)),
                                      tax.rollup(inst.sector_l3, SectorLevel::L1),
                                      tax.rollup(inst.sector_l3, SectorLevel::L2), inst.sector_l3};
        if (!weekly) {
            const auto v = indicators::indicator_vector(dataset, ticker, plan.date);
            t.rows.push_back({ticker, v.values(true), cats});
            continue;
        }
        const auto& bars = dataset.series(ticker).bars;
        const std::size_t end = indicators::history_length(dataset.series(ticker), plan.date);
        const double shares = static_cast<double>(inst.shares_outstanding);
        for (std::size_t k = 1; k < end; ++k) {
            const auto& b = bars[k];
            auto row_cats = cats;
            row_cats.push_back(b.date.iso_week());
            t.rows.push_back({ticker + "@" + b.date.iso(),
                              {100.0 * (b.close / bars[k - 1].close - 1.0), 1000.0 * b.volume / shares,
                               b.volume * b.close, b.close * shares / 1e9},
                              std::move(row_cats)});
        }
    }
    return t;
}

symbolic::SymbolicTable build_table(const Plan& plan, const market::Dataset& dataset) {
    return symbolic::aggregate(individuals(plan, dataset), plan.group_key, plan.variables);
}

const Artifact* RunResult::find(std::string_view name) const {
    for (const auto& a : artifacts) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

RunResult run_pyramid_matrix(const Matrix& dissimilarity, std::vector<std::string> labels) {
    RunResult r;
    const auto pyr = pyramid::pyr_cluster(dissimilarity, std::move(labels));
    compatible_order(pyr);
    r.artifacts.push_back({"pyramid.txt", pyramid::render_text(pyr)});
    r.artifacts.push_back({"pyramid.svg", pyramid::render_svg(pyr)});
    return r;
}

RunResult run_method(const symbolic::SymbolicTable& table, const MethodParams& params,
                     std::span<const std::string> variables, std::string_view date_range) {
    table.validate();
    const symbolic::SymbolicTable sel = variables.empty() ? table : symbolic::select_variables(table, variables);
    std::vector<std::string> numeric;
    std::vector<std::string> modal;
    for (const auto& v : sel.variables) {
        (v.kind == symbolic::VariableKind::Modal ? modal : numeric).push_back(v.name);
    }

    RunResult r;
    const auto need_numeric = [&] {
        if (!modal.empty()) {
            r.warnings.push_back("categorical variable(s) " + join(modal) + " excluded from the numeric matrix");
        }
        if (numeric.empty()) {
            throw Error(ErrorKind::InvalidArgument, "no numeric variable selected");
        }
    };

    switch (params.method) {
        case Method::Div: {
            need_numeric();
            Matrix m(sel.object_count(), numeric.size());
            for (std::size_t i = 0; i < sel.object_count(); ++i) {
                for (std::size_t k = 0; k < numeric.size(); ++k) {
                    m(i, k) = symbolic::as_interval(sel.cells[i][*sel.variable_index(numeric[k])]).mid();
                }
            }
            const auto tree = div::div_cluster(m, params.k, params.normalize, sel.labels, numeric);
            if (tree.stopped_early()) {
                r.warnings.push_back("no splittable class left: stopped at K=" + std::to_string(tree.k) +
                                     " instead of " + std::to_string(tree.requested_k));
            }
            r.artifacts.push_back({"div_report.txt", div::render_division_tree(tree)});
            r.artifacts.push_back({"div_assignments.csv", div::assignments_csv(tree)});
            break;
        }
        case Method::Pca: {
            need_numeric();
            const auto model = ipca::centers_pca(sel, numeric);
            const std::size_t a = params.axes.first;
            const std::size_t b = params.axes.second;
            if (a < 1 || b < 1 || a == b || a > model.dimension() || b > model.dimension()) {
                throw Error(ErrorKind::InvalidArgument, "axes " + std::to_string(a) + "," + std::to_string(b) +
                                                            " invalid for a model with " +
                                                            std::to_string(model.dimension()) + " axes");
            }
            const std::vector<std::size_t> axes{a - 1, b - 1};
            const auto rects = ipca::project_table(model, sel, axes);
            std::string summary = "axis,eigenvalue,explained_percent\n";
            for (std::size_t k = 0; k < model.dimension(); ++k) {
                summary += std::to_string(k + 1) + "," + format_fixed(model.eigenvalues[k], 6) + "," +
                           format_fixed(model.explained[k], 6) + "\n";
            }
            r.artifacts.push_back({"pca_model.txt", summary});
            r.artifacts.push_back({"pca_rectangles.csv", ipca::rectangles_csv(rects)});
            r.artifacts.push_back({"pca_plane_" + std::to_string(a) + "_" + std::to_string(b) + ".svg",
                                   ipca::render_factor_plot(model, rects, {a - 1, b - 1})});
            break;
        }
        case Method::Pyramid: {
            if (!params.dissimilarity.empty() && params.dissimilarity != "computed") {
                std::vector<std::string> labels;
                const Matrix d = symbolic::read_matrix_csv(market::read_file(params.dissimilarity), labels);
                return run_pyramid_matrix(d, std::move(labels));
            }
            const Matrix d = symbolic::dissimilarity_matrix(sel);
            r = run_pyramid_matrix(d, sel.labels);
            r.artifacts.insert(r.artifacts.begin(), {"dissimilarity.csv", symbolic::write_matrix_csv(d, sel.labels)});
            break;
        }
        case Method::Describe:
            r.artifacts.push_back({"describe.txt", describe_table(sel, date_range)});
            break;
    }
    return r;
}

RunResult run(const Plan& plan, const market::Dataset& dataset, std::string_view dataset_checksum) {
    const auto table = build_table(plan, dataset);
    const auto cal = dataset.calendar();
    const std::string range = cal.front().iso() + " .. " + plan.date.iso();
    RunResult method = run_method(table, plan.query.params, plan.variables, range);

    RunResult out;
    out.warnings = plan.warnings;
    for (auto& w : method.warnings) {
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    }
    out.artifacts.push_back({"table.csv", symbolic::write_table(table)});
    for (auto& a : method.artifacts) out.artifacts.push_back(std::move(a));

    nlohmann::ordered_json manifest;
    manifest["tool"] = std::string(kToolName);
    manifest["version"] = std::string(kToolVersion);
    nlohmann::ordered_json q;
    q["level"] = std::string(to_string(plan.query.level));
    q["granularity"] = std::string(to_string(plan.query.granularity));
    q["scope"] = plan.query.scope;
    if (plan.query.portfolio) {
        nlohmann::ordered_json pos = nlohmann::ordered_json::array();
        for (const auto& p : plan.query.portfolio->positions) pos.push_back({p.ticker, p.quantity});
        q["portfolio"] = pos;
    }
    q["variables"] = plan.query.variables;
    q["resolved_variables"] = plan.variables;
    q["date"] = plan.date.iso();
    q.update(params_json(plan.query.params));
    manifest["query"] = q;
    manifest["dataset_sha256"] = std::string(dataset_checksum);
    manifest["objects"] = table.object_count();
    manifest["warnings"] = out.warnings;
    out.artifacts.push_back(manifest_artifact(manifest, out.artifacts));
    return out;
}

RunResult run_table(const symbolic::SymbolicTable& table, const MethodParams& params,
                    std::span<const std::string> variables) {
    RunResult out = run_method(table, params, variables);
    nlohmann::ordered_json manifest;
    manifest["tool"] = std::string(kToolName);
    manifest["version"] = std::string(kToolVersion);
    nlohmann::ordered_json q = params_json(params);
    q["variables"] = std::vector<std::string>(variables.begin(), variables.end());
    manifest["query"] = q;
    manifest["input_sha256"] = market::sha256_hex(symbolic::write_table(table));
    manifest["objects"] = table.object_count();
    manifest["warnings"] = out.warnings;
    out.artifacts.push_back(manifest_artifact(manifest, out.artifacts));
    return out;
}

RunResult run_dissimilarity_csv(std::string_view csv_text) {
    std::vector<std::string> labels;
    const Matrix d = symbolic::read_matrix_csv(csv_text, labels);
    const std::size_t n = labels.size();
    RunResult out = run_pyramid_matrix(d, std::move(labels));
    nlohmann::ordered_json manifest;
    manifest["tool"] = std::string(kToolName);
    manifest["version"] = std::string(kToolVersion);
    manifest["query"] = {{"method", "pyramid"}, {"dissimilarity", "csv"}};
    manifest["input_sha256"] = market::sha256_hex(csv_text);
    manifest["objects"] = n;
    manifest["warnings"] = out.warnings;
    out.artifacts.push_back(manifest_artifact(manifest, out.artifacts));
    return out;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "cannot create output directory '" + out_dir.string() + "': " + ec.message());
    }
    const auto write = [&](const Artifact& a) {
        const auto path = out_dir / a.name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << a.content) || !f.flush()) {
            throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
        }
    };
    const Artifact* manifest = nullptr;
    for (const auto& a : result.artifacts) {
        if (a.name == "manifest.json") {
            manifest = &a;
            continue;
        }
        write(a);
    }
    if (manifest) write(*manifest);
}

std::string describe_dataset(const market::Dataset& dataset, std::optional<Date> at) {
    const auto cal = dataset.calendar();
    const Date date = at.value_or(cal.back());
    const auto& tax = dataset.taxonomy();
    std::map<std::string, std::size_t> markets;
    for (const auto& [t, inst] : dataset.instruments()) ++markets[std::string(market::to_string(inst.market))];

    std::string out;
    out += "summary: " + std::to_string(dataset.instruments().size()) + " tickers, " + std::to_string(markets.size()) +
           " markets, " + std::to_string(tax.count(SectorLevel::L3)) + " sectors (l3), " +
           std::to_string(tax.count(SectorLevel::L2)) + " sectors (l2), " +
           std::to_string(tax.count(SectorLevel::L1)) + " sectors (l1)\n";
    out += "quoted tickers: " + std::to_string(dataset.series().size()) + "\n";
    out += "markets:";
    for (const auto& [m, n] : markets) out += " " + m + "=" + std::to_string(n);
    out += "\n";
    out += "calendar: " + std::to_string(cal.size()) + " trading days, " + cal.front().iso() + " .. " +
           cal.back().iso() + "\n";
    out += "analysis date: " + date.iso() + "\n";
    std::vector<std::string> thin;
    for (const auto& [t, inst] : dataset.instruments()) {
        const std::size_t have = dataset.has_series(t) ? indicators::history_length(dataset.series(t), date) : 0;
        if (have < static_cast<std::size_t>(indicators::kRequiredHistory)) {
            thin.push_back(t + " (" + std::to_string(have) + ")");
        }
    }
    out += "insufficient history (< " + std::to_string(indicators::kRequiredHistory) + " days): " +
           (thin.empty() ? std::string("none") : join(thin)) + "\n";
    return out;
}

std::string indicators_csv(const market::Dataset& dataset, std::optional<Date> at, bool with_sd_ret) {
    const Date date = at.value_or(dataset.calendar().back());
    std::vector<indicators::IndicatorVector> rows;
    for (const auto& [t, s] : dataset.series()) {
        if (indicators::history_length(s, date) >= static_cast<std::size_t>(indicators::kRequiredHistory)) {
            rows.push_back(indicators::indicator_vector(dataset, t, date));
        }
    }
    return indicators::indicators_csv(rows, with_sd_ret);
}

}  // namespace symbourse::pipeline
