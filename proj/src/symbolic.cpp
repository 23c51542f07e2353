#include "symbourse/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace symbourse::symbolic {

namespace {

constexpr double kModalSumTolerance = 1e-9;

std::string group_column(GroupKey key) {
    switch (key) {
        case GroupKey::Market: return "market";
        case GroupKey::SectorL1: return "sector_l1";
        case GroupKey::SectorL2: return "sector_l2";
        case GroupKey::SectorL3: return "sector_l3";
        case GroupKey::Week: return "week";
        case GroupKey::Portfolio:
        case GroupKey::Action:
        case GroupKey::All: return {};
    }
    return {};
}

}  // namespace

std::string_view to_string(VariableKind kind) {
    switch (kind) {
        case VariableKind::Single: return "single";
        case VariableKind::Interval: return "interval";
        case VariableKind::Modal: return "modal";
    }
    return "?";
}

VariableKind kind_of(const SymbolicValue& value) {
    switch (value.index()) {
        case 0: return VariableKind::Single;
        case 1: return VariableKind::Interval;
        default: return VariableKind::Modal;
    }
}

Interval as_interval(const SymbolicValue& value) {
    if (const auto* d = std::get_if<double>(&value)) {
        return {*d, *d};
    }
    if (const auto* i = std::get_if<Interval>(&value)) {
        return *i;
    }
    throw Error(ErrorKind::InvalidArgument, "modal value used where an interval is required");
}

std::optional<std::size_t> SymbolicTable::variable_index(std::string_view name) const {
    for (std::size_t j = 0; j < variables.size(); ++j) {
        if (variables[j].name == name) {
            return j;
        }
    }
    return std::nullopt;
}

void SymbolicTable::validate() const {
    if (cells.size() != labels.size() || member_counts.size() != labels.size()) {
        throw Error(ErrorKind::Validation, "symbolic table is not rectangular");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].size() != variables.size()) {
            throw Error(ErrorKind::Validation, "object '" + labels[i] + "' has a wrong number of cells");
        }
        if (member_counts[i] < 1) {
            throw Error(ErrorKind::Validation, "object '" + labels[i] + "' has no members");
        }
        for (std::size_t j = 0; j < variables.size(); ++j) {
            const auto& cell = cells[i][j];
            if (kind_of(cell) != variables[j].kind) {
                throw Error(ErrorKind::Validation, "cell (" + labels[i] + ", " + variables[j].name +
                                                       ") does not match the variable kind");
            }
            if (const auto* iv = std::get_if<Interval>(&cell); iv && !(iv->lo <= iv->hi)) {
                throw Error(ErrorKind::Validation, "interval with lo > hi at (" + labels[i] + ", " +
                                                       variables[j].name + ")");
            }
            if (const auto* m = std::get_if<Modal>(&cell)) {
                double sum = 0.0;
                for (const auto& [cat, p] : *m) {
                    if (p < 0) {
                        throw Error(ErrorKind::Validation, "negative modal frequency");
                    }
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kModalSumTolerance) {
                    throw Error(ErrorKind::Validation, "modal frequencies do not sum to 1 at (" + labels[i] +
                                                           ", " + variables[j].name + ")");
                }
            }
        }
    }
}

std::optional<std::size_t> IndividualTable::numeric_index(std::string_view name) const {
    const auto it = std::find(numeric_names.begin(), numeric_names.end(), name);
    if (it == numeric_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - numeric_names.begin());
}

std::optional<std::size_t> IndividualTable::categorical_index(std::string_view name) const {
    const auto it = std::find(categorical_names.begin(), categorical_names.end(), name);
    if (it == categorical_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categorical_names.begin());
}

std::string_view to_string(GroupKey key) {
    switch (key) {
        case GroupKey::Market: return "market";
        case GroupKey::SectorL1: return "sector_l1";
        case GroupKey::SectorL2: return "sector_l2";
        case GroupKey::SectorL3: return "sector_l3";
        case GroupKey::Portfolio: return "portfolio";
        case GroupKey::Week: return "week";
        case GroupKey::Action: return "action";
        case GroupKey::All: return "all";
    }
    return "?";
}

GroupKey parse_group_key(std::string_view text) {
    for (auto k : {GroupKey::Market, GroupKey::SectorL1, GroupKey::SectorL2, GroupKey::SectorL3,
                   GroupKey::Portfolio, GroupKey::Week, GroupKey::Action, GroupKey::All}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown group key '" + std::string(text) + "'");
}

SymbolicTable aggregate(const IndividualTable& rows, GroupKey key, std::span<const std::string> variables) {
    if (rows.rows.empty()) {
        throw Error(ErrorKind::Validation, "cannot aggregate: no individuals");
    }
    if (variables.empty()) {
        throw Error(ErrorKind::InvalidArgument, "cannot aggregate: no variables requested");
    }

    std::optional<std::size_t> key_column;
    if (const auto col = group_column(key); !col.empty()) {
        key_column = rows.categorical_index(col);
        if (!key_column) {
            throw Error(ErrorKind::InvalidArgument, "individuals carry no '" + col + "' column");
        }
    }

    struct Source {
        bool numeric;
        std::size_t index;
    };
    std::vector<Source> sources;
    SymbolicTable out;
    out.group_key = std::string(to_string(key));
    for (const auto& name : variables) {
        if (auto n = rows.numeric_index(name)) {
            sources.push_back({true, *n});
            const auto unit = rows.units.find(name);
            out.variables.push_back({name, VariableKind::Interval, unit == rows.units.end() ? "" : unit->second});
        } else if (auto c = rows.categorical_index(name)) {
            sources.push_back({false, *c});
            out.variables.push_back({name, VariableKind::Modal, ""});
        } else {
            throw Error(ErrorKind::InvalidArgument, "variable '" + name + "' missing from individual rows");
        }
    }

    std::map<std::string, std::vector<const IndividualTable::Row*>> groups;
    for (const auto& row : rows.rows) {
        std::string label;
        switch (key) {
            case GroupKey::Action: label = row.label; break;
            case GroupKey::Portfolio: label = "portfolio"; break;
            case GroupKey::All: label = "all"; break;
            default: label = row.categorical.at(*key_column); break;
        }
        groups[label].push_back(&row);
    }

    for (const auto& [label, members] : groups) {
        std::vector<SymbolicValue> cells;
        for (std::size_t v = 0; v < sources.size(); ++v) {
            const auto& src = sources[v];
            if (src.numeric) {
                Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
                for (const auto* m : members) {
                    const double x = m->numeric.at(src.index);
                    if (!std::isfinite(x)) {
                        throw Error(ErrorKind::Validation,
                                    "variable '" + variables[v] + "' missing for '" + m->label + "'");
                    }
                    iv.lo = std::min(iv.lo, x);
                    iv.hi = std::max(iv.hi, x);
                }
                cells.emplace_back(iv);
            } else {
                std::map<std::string, std::size_t> counts;
                for (const auto* m : members) {
                    const auto& c = m->categorical.at(src.index);
                    if (c.empty()) {
                        throw Error(ErrorKind::Validation,
                                    "variable '" + variables[v] + "' missing for '" + m->label + "'");
                    }
                    ++counts[c];
                }
                Modal modal;
                for (const auto& [cat, n] : counts) {
                    modal[cat] = static_cast<double>(n) / static_cast<double>(members.size());
                }
                cells.emplace_back(std::move(modal));
            }
        }
        out.labels.push_back(label);
        out.cells.push_back(std::move(cells));
        out.member_counts.push_back(members.size());
    }
    return out;
}

SymbolicTable taxonomy_rollup(const SymbolicTable& table, const market::Taxonomy& taxonomy,
                              market::SectorLevel target) {
    using market::SectorLevel;
    table.validate();
    SectorLevel source;
    if (table.group_key == "sector_l3") {
        source = SectorLevel::L3;
    } else if (table.group_key == "sector_l2") {
        source = SectorLevel::L2;
    } else {
        throw Error(ErrorKind::InvalidArgument, "rollup needs a sector_l3 or sector_l2 table, got '" +
                                                    table.group_key + "'");
    }
    if (static_cast<int>(target) > static_cast<int>(source)) {
        throw Error(ErrorKind::InvalidArgument, "rollup target must be coarser than the table's level");
    }

    const auto parent_of = [&](const std::string& code) -> std::string {
        if (source == SectorLevel::L3) {
            return taxonomy.rollup(code, target);
        }
        // source is L2
        if (target == SectorLevel::L2) {
            taxonomy.l1_of_l2(code);  // validates
            return code;
        }
        return taxonomy.l1_of_l2(code);
    };

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        groups[parent_of(table.labels[i])].push_back(i);
    }

    SymbolicTable out;
    out.group_key = std::string(market::to_string(target));
    out.variables = table.variables;
    for (auto& v : out.variables) {
        if (v.kind == VariableKind::Single) {
            v.kind = VariableKind::Interval;
        }
    }
    for (const auto& [parent, children] : groups) {
        std::size_t members = 0;
        for (auto c : children) members += table.member_counts[c];
        std::vector<SymbolicValue> cells;
        for (std::size_t j = 0; j < table.variables.size(); ++j) {
            if (table.variables[j].kind == VariableKind::Modal) {
                Modal mass;
                for (auto c : children) {
                    for (const auto& [cat, p] : std::get<Modal>(table.cells[c][j])) {
                        mass[cat] += p * static_cast<double>(table.member_counts[c]);
                    }
                }
                for (auto& [cat, m] : mass) {
                    m /= static_cast<double>(members);
                }
                cells.emplace_back(std::move(mass));
            } else {
                Interval iv = as_interval(table.cells[children.front()][j]);
                for (auto c : children) {
                    const Interval x = as_interval(table.cells[c][j]);
                    iv.lo = std::min(iv.lo, x.lo);
                    iv.hi = std::max(iv.hi, x.hi);
                }
                cells.emplace_back(iv);
            }
        }
        out.labels.push_back(parent);
        out.cells.push_back(std::move(cells));
        out.member_counts.push_back(members);
    }
    return out;
}

Normalized normalize(const Matrix& matrix, std::span<const std::string> names) {
    if (matrix.rows() < 2) {
        throw Error(ErrorKind::InvalidArgument, "normalisation needs at least 2 objects");
    }
    Normalized out{matrix, std::vector<double>(matrix.cols())};
    const double n = static_cast<double>(matrix.rows());
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < matrix.rows(); ++i) mean += matrix(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < matrix.rows(); ++i) var += (matrix(i, j) - mean) * (matrix(i, j) - mean);
        const double sd = std::sqrt(var / n);
        if (!(sd > 0.0)) {
            const std::string name = j < names.size() ? names[j] : "#" + std::to_string(j);
            throw Error(ErrorKind::Validation, "variable '" + name + "' has zero variance");
        }
        out.scales[j] = sd;
        for (std::size_t i = 0; i < matrix.rows(); ++i) out.matrix(i, j) = matrix(i, j) / sd;
    }
    return out;
}

DissimilaritySpec default_spec(const SymbolicTable& table) {
    DissimilaritySpec spec;
    for (std::size_t j = 0; j < table.variables.size(); ++j) {
        if (table.variables[j].kind == VariableKind::Modal) {
            spec.measures.push_back(Measure::HalfL1);
            spec.ranges.push_back(0.0);
            continue;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& row : table.cells) {
            const Interval iv = as_interval(row[j]);
            lo = std::min(lo, iv.lo);
            hi = std::max(hi, iv.hi);
        }
        const double range = table.cells.empty() ? 0.0 : hi - lo;
        spec.measures.push_back(range > 0 ? Measure::Hausdorff : Measure::Excluded);
        spec.ranges.push_back(range);
    }
    return spec;
}

double dissimilarity(std::span<const SymbolicValue> a, std::span<const SymbolicValue> b,
                     const DissimilaritySpec& spec) {
    if (a.size() != b.size() || a.size() != spec.measures.size() || spec.ranges.size() != spec.measures.size()) {
        throw Error(ErrorKind::InvalidArgument, "dissimilarity: variable count mismatch");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const bool modal_a = kind_of(a[j]) == VariableKind::Modal;
        const bool modal_b = kind_of(b[j]) == VariableKind::Modal;
        if (modal_a != modal_b) {
            throw Error(ErrorKind::InvalidArgument, "dissimilarity: cell kind mismatch on variable " +
                                                        std::to_string(j));
        }
        switch (spec.measures[j]) {
            case Measure::Excluded: break;
            case Measure::Hausdorff: {
                if (modal_a) {
                    throw Error(ErrorKind::InvalidArgument, "Hausdorff measure applied to a modal variable");
                }
                if (!(spec.ranges[j] > 0)) {
                    throw Error(ErrorKind::InvalidArgument, "non-positive range for variable " + std::to_string(j));
                }
                const Interval x = as_interval(a[j]);
                const Interval y = as_interval(b[j]);
                total += std::max(std::abs(x.lo - y.lo), std::abs(x.hi - y.hi)) / spec.ranges[j];
                break;
            }
            case Measure::HalfL1: {
                if (!modal_a) {
                    throw Error(ErrorKind::InvalidArgument, "half-L1 measure applied to a non-modal variable");
                }
                const auto& p = std::get<Modal>(a[j]);
                const auto& q = std::get<Modal>(b[j]);
                std::set<std::string> cats;
                for (const auto& [c, _] : p) cats.insert(c);
                for (const auto& [c, _] : q) cats.insert(c);
                double sum = 0.0;
                for (const auto& c : cats) {
                    const auto ip = p.find(c);
                    const auto iq = q.find(c);
                    sum += std::abs((ip == p.end() ? 0.0 : ip->second) - (iq == q.end() ? 0.0 : iq->second));
                }
                total += 0.5 * sum;
                break;
            }
        }
    }
    return total;
}

Matrix dissimilarity_matrix(const SymbolicTable& table, const DissimilaritySpec& spec) {
    const std::size_t n = table.object_count();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = dissimilarity(table.cells[i], table.cells[j], spec);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

Matrix dissimilarity_matrix(const SymbolicTable& table) {
    table.validate();
    return dissimilarity_matrix(table, default_spec(table));
}

SymbolicTable select_variables(const SymbolicTable& table, std::span<const std::string> names) {
    SymbolicTable out;
    out.group_key = table.group_key;
    out.labels = table.labels;
    out.member_counts = table.member_counts;
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        const auto j = table.variable_index(n);
        if (!j) {
            throw Error(ErrorKind::InvalidArgument, "variable '" + n + "' not in table");
        }
        idx.push_back(*j);
        out.variables.push_back(table.variables[*j]);
    }
    for (const auto& row : table.cells) {
        std::vector<SymbolicValue> r;
        for (auto j : idx) r.push_back(row[j]);
        out.cells.push_back(std::move(r));
    }
    return out;
}

}  // namespace symbourse::symbolic
