#include "symbourse/symbolic.hpp"

#include <sstream>

namespace symbourse::symbolic {

namespace {

constexpr std::string_view kTableMagic = "# symbolic-table";

void check_category(const std::string& cat) {
    if (cat.empty() || cat.find_first_of("{}=;,\"\n") != std::string::npos) {
        throw Error(ErrorKind::Validation, "category '" + cat + "' cannot be serialised");
    }
}

VariableKind parse_kind(std::string_view text) {
    for (auto k : {VariableKind::Single, VariableKind::Interval, VariableKind::Modal}) {
        if (to_string(k) == text) return k;
    }
    throw Error(ErrorKind::Parse, "unknown variable kind '" + std::string(text) + "'");
}

std::vector<std::string> body_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::string format_value(const SymbolicValue& value) {
    switch (kind_of(value)) {
        case VariableKind::Single: return format_double(std::get<double>(value));
        case VariableKind::Interval: {
            const auto& iv = std::get<Interval>(value);
            return "[" + format_double(iv.lo) + ":" + format_double(iv.hi) + "]";
        }
        case VariableKind::Modal: {
            std::string out = "{";
            bool first = true;
            for (const auto& [cat, p] : std::get<Modal>(value)) {
                check_category(cat);
                if (!first) out += ";";
                first = false;
                out += cat + "=" + format_double(p);
            }
            return out + "}";
        }
    }
    return {};
}

SymbolicValue parse_value(std::string_view raw, VariableKind kind) {
    const std::string text = trim(raw);
    switch (kind) {
        case VariableKind::Single: return parse_double(text, "single value");
        case VariableKind::Interval: {
            if (text.size() < 5 || text.front() != '[' || text.back() != ']') {
                throw Error(ErrorKind::Parse, "malformed interval '" + text + "'");
            }
            const auto inner = std::string_view(text).substr(1, text.size() - 2);
            const auto colon = inner.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorKind::Parse, "malformed interval '" + text + "'");
            }
            Interval iv{parse_double(inner.substr(0, colon), "interval lower bound"),
                        parse_double(inner.substr(colon + 1), "interval upper bound")};
            if (!(iv.lo <= iv.hi)) {
                throw Error(ErrorKind::Validation, "interval with lo > hi '" + text + "'");
            }
            return iv;
        }
        case VariableKind::Modal: {
            if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
                throw Error(ErrorKind::Parse, "malformed modal value '" + text + "'");
            }
            Modal m;
            const auto inner = std::string_view(text).substr(1, text.size() - 2);
            if (!trim(inner).empty()) {
                for (const auto& part : split(inner, ';')) {
                    const auto eq = part.find('=');
                    if (eq == std::string::npos) {
                        throw Error(ErrorKind::Parse, "malformed modal entry '" + part + "'");
                    }
                    const std::string cat = trim(std::string_view(part).substr(0, eq));
                    if (!m.emplace(cat, parse_double(std::string_view(part).substr(eq + 1), "modal frequency")).second) {
                        throw Error(ErrorKind::Parse, "duplicate modal category '" + cat + "'");
                    }
                }
            }
            return m;
        }
    }
    throw Error(ErrorKind::Internal, "unhandled kind");
}

std::string write_table(const SymbolicTable& table) {
    table.validate();
    std::string out = std::string(kTableMagic) + " group_key=" + table.group_key + "\n";
    std::vector<std::string> header{"label", "members"};
    for (const auto& v : table.variables) {
        if (v.name.find(':') != std::string::npos || v.unit.find(':') != std::string::npos) {
            throw Error(ErrorKind::Validation, "variable name or unit contains ':'");
        }
        std::string h = v.name + ":" + std::string(to_string(v.kind));
        if (!v.unit.empty()) h += ":" + v.unit;
        header.push_back(std::move(h));
    }
    out += join_csv(header) + "\n";
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        std::vector<std::string> fields{table.labels[i], std::to_string(table.member_counts[i])};
        for (const auto& c : table.cells[i]) fields.push_back(format_value(c));
        out += join_csv(fields) + "\n";
    }
    return out;
}

SymbolicTable read_table(std::string_view text) {
    auto lines = body_lines(text);
    SymbolicTable t;
    std::size_t pos = 0;
    bool native = false;
    if (pos < lines.size() && lines[pos].rfind(kTableMagic, 0) == 0) {
        native = true;
        const std::string rest = trim(std::string_view(lines[pos]).substr(kTableMagic.size()));
        if (rest.rfind("group_key=", 0) == 0) {
            t.group_key = rest.substr(10);
        }
        ++pos;
    }
    if (pos >= lines.size()) {
        throw Error(ErrorKind::Parse, "symbolic table: missing header");
    }
    const auto header = split_csv_line(lines[pos++]);
    std::size_t first_var = 0;
    if (native) {
        if (header.size() < 2 || trim(header[0]) != "label" || trim(header[1]) != "members") {
            throw Error(ErrorKind::Parse, "symbolic table: header must start with 'label,members'");
        }
        first_var = 2;
        for (std::size_t k = 2; k < header.size(); ++k) {
            const auto parts = split(trim(header[k]), ':');
            if (parts.size() < 2 || parts.size() > 3 || parts[0].empty()) {
                throw Error(ErrorKind::Parse, "symbolic table: bad variable header '" + header[k] + "'");
            }
            t.variables.push_back({parts[0], parse_kind(parts[1]), parts.size() == 3 ? parts[2] : ""});
        }
    } else {
        // Indicator CSV: ticker,<numeric columns>
        if (header.empty() || trim(header[0]) != "ticker") {
            throw Error(ErrorKind::Parse, "unrecognised table format (expected symbolic table or indicator CSV)");
        }
        first_var = 1;
        t.group_key = "action";
        for (std::size_t k = 1; k < header.size(); ++k) {
            t.variables.push_back({trim(header[k]), VariableKind::Single, ""});
        }
    }
    for (std::size_t line = pos; line < lines.size(); ++line) {
        const auto fields = split_csv_line(lines[line]);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Parse, "symbolic table row " + std::to_string(line - pos + 1) + ": expected " +
                                              std::to_string(header.size()) + " fields");
        }
        t.labels.push_back(trim(fields[0]));
        t.member_counts.push_back(native ? static_cast<std::size_t>(parse_int(fields[1], "members")) : 1);
        std::vector<SymbolicValue> cells;
        for (std::size_t k = first_var; k < fields.size(); ++k) {
            cells.push_back(parse_value(fields[k], t.variables[k - first_var].kind));
        }
        t.cells.push_back(std::move(cells));
    }
    t.validate();
    return t;
}

std::string write_matrix_csv(const Matrix& matrix, std::span<const std::string> labels) {
    std::vector<std::string> header{"label"};
    header.insert(header.end(), labels.begin(), labels.end());
    std::string out = join_csv(header) + "\n";
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        std::vector<std::string> row{labels[i]};
        for (std::size_t j = 0; j < matrix.cols(); ++j) row.push_back(format_double(matrix(i, j)));
        out += join_csv(row) + "\n";
    }
    return out;
}

Matrix read_matrix_csv(std::string_view text, std::vector<std::string>& labels) {
    const auto lines = body_lines(text);
    if (lines.empty()) {
        throw Error(ErrorKind::Parse, "dissimilarity CSV: empty");
    }
    const auto header = split_csv_line(lines[0]);
    if (header.empty() || trim(header[0]) != "label") {
        throw Error(ErrorKind::Parse, "dissimilarity CSV: header must start with 'label'");
    }
    const std::size_t n = header.size() - 1;
    if (lines.size() != n + 1) {
        throw Error(ErrorKind::Parse, "dissimilarity CSV: expected " + std::to_string(n) + " rows");
    }
    labels.clear();
    for (std::size_t k = 1; k < header.size(); ++k) labels.push_back(trim(header[k]));
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto f = split_csv_line(lines[i + 1]);
        if (f.size() != n + 1 || trim(f[0]) != labels[i]) {
            throw Error(ErrorKind::Parse, "dissimilarity CSV: row " + std::to_string(i + 1) +
                                              " must be labelled '" + labels[i] + "' with " + std::to_string(n) +
                                              " values");
        }
        for (std::size_t j = 0; j < n; ++j) d(i, j) = parse_double(f[j + 1], "dissimilarity");
    }
    return d;
}

}  // namespace symbourse::symbolic
