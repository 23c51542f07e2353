#pragma once

#include "symbourse/common.hpp"
#include "symbourse/market_data.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace symbourse::symbolic {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double mid() const { return 0.5 * (lo + hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Category -> relative frequency; frequencies sum to 1.
using Modal = std::map<std::string, double>;

using SymbolicValue = std::variant<double, Interval, Modal>;

enum class VariableKind { Single, Interval, Modal };

std::string_view to_string(VariableKind kind);
VariableKind kind_of(const SymbolicValue& value);

// Singles are read as degenerate intervals; throws on modal values.
Interval as_interval(const SymbolicValue& value);

struct VariableDescriptor {
    std::string name;
    VariableKind kind = VariableKind::Interval;
    std::string unit;

    friend bool operator==(const VariableDescriptor&, const VariableDescriptor&) = default;
};

struct SymbolicTable {
    std::string group_key;
    std::vector<std::string> labels;
    std::vector<VariableDescriptor> variables;
    std::vector<std::vector<SymbolicValue>> cells;  // [object][variable]
    std::vector<std::size_t> member_counts;

    std::size_t object_count() const { return labels.size(); }
    std::optional<std::size_t> variable_index(std::string_view name) const;

    // Rectangularity, kind agreement, interval/modal invariants, member counts.
    void validate() const;

    friend bool operator==(const SymbolicTable&, const SymbolicTable&) = default;
};

// Individual-level rows: one per stock (or stock-day) with numeric and
// categorical attributes.
struct IndividualTable {
    struct Row {
        std::string label;
        std::vector<double> numeric;
        std::vector<std::string> categorical;
    };

    std::vector<std::string> numeric_names;
    std::vector<std::string> categorical_names;
    std::map<std::string, std::string> units;
    std::vector<Row> rows;

    std::optional<std::size_t> numeric_index(std::string_view name) const;
    std::optional<std::size_t> categorical_index(std::string_view name) const;
};

enum class GroupKey { Market, SectorL1, SectorL2, SectorL3, Portfolio, Week, Action, All };

std::string_view to_string(GroupKey key);
GroupKey parse_group_key(std::string_view text);

// Groups rows and describes each group: numeric variables become [min, max]
// intervals, categorical ones become modal frequency tables. Objects are
// ordered by group label.
SymbolicTable aggregate(const IndividualTable& rows, GroupKey key, std::span<const std::string> variables);

// Regroups a sector table (l3 or l2) to a coarser taxonomy level.
SymbolicTable taxonomy_rollup(const SymbolicTable& table, const market::Taxonomy& taxonomy,
                              market::SectorLevel target);

struct Normalized {
    Matrix matrix;
    std::vector<double> scales;  // population sd per column
};

// Divides every column by its population standard deviation.
Normalized normalize(const Matrix& matrix, std::span<const std::string> names);

enum class Measure { Hausdorff, HalfL1, Excluded };

struct DissimilaritySpec {
    std::vector<Measure> measures;
    std::vector<double> ranges;  // used by Hausdorff terms
};

// Range-normalised Hausdorff for interval/single variables, half-L1 for
// modal ones; variables with zero global range are excluded.
DissimilaritySpec default_spec(const SymbolicTable& table);

double dissimilarity(std::span<const SymbolicValue> a, std::span<const SymbolicValue> b,
                     const DissimilaritySpec& spec);

Matrix dissimilarity_matrix(const SymbolicTable& table, const DissimilaritySpec& spec);
Matrix dissimilarity_matrix(const SymbolicTable& table);

// Restricts a table to the named variables, in the given order.
SymbolicTable select_variables(const SymbolicTable& table, std::span<const std::string> names);

// --- Serialisation --------------------------------------------------------
//
//   # symbolic-table group_key=<key>
//   label,members,<name>:<kind>[:<unit>],...
//   <label>,<n>,<cell>,...
//
// Cells: `v` (single), `[lo:hi]` (interval), `{cat=p;cat=p}` (modal). An
// indicator CSV (`ticker,perfmois,...`) is also accepted as a table of
// single-valued variables.

std::string format_value(const SymbolicValue& value);
SymbolicValue parse_value(std::string_view text, VariableKind kind);

std::string write_table(const SymbolicTable& table);
SymbolicTable read_table(std::string_view text);

std::string write_matrix_csv(const Matrix& matrix, std::span<const std::string> labels);
// Returns the matrix and fills `labels` from the header.
Matrix read_matrix_csv(std::string_view text, std::vector<std::string>& labels);

}  // namespace symbourse::symbolic
