#include "symbourse/ipca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symbourse::ipca {

namespace {

double max_off_diagonal(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) m = std::max(m, std::abs(a(i, j)));
        }
    }
    return m;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

EigenDecomposition symmetric_eigen(const Matrix& matrix, double tol, int max_sweeps) {
    const std::size_t n = matrix.rows();
    if (n == 0 || matrix.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "eigen decomposition needs a non-empty square matrix");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(matrix(i, j)));
    }
    const double abs_tol = tol * std::max(1.0, scale);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(matrix(i, j) - matrix(j, i)) > abs_tol) {
                throw Error(ErrorKind::InvalidArgument, "matrix is not symmetric");
            }
        }
    }

    Matrix a = matrix;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    }
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    EigenDecomposition out;
    while (true) {
        out.residual = max_off_diagonal(a);
        if (out.residual <= abs_tol) {
            break;
        }
        if (out.sweeps >= max_sweeps) {
            throw Error(ErrorKind::Internal, "Jacobi iteration did not converge (residual " +
                                                 format_double(out.residual) + ")");
        }
        ++out.sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(v(i, src)) > std::abs(v(lead, src)) + 1e-12) lead = i;
        }
        const double sign = v(lead, src) < 0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
    }
    return out;
}

FactorModel centers_pca(const symbolic::SymbolicTable& table, std::span<const std::string> variables) {
    const std::size_t n = table.object_count();
    const std::size_t p = variables.size();
    if (n < 2) {
        throw Error(ErrorKind::InvalidArgument, "PCA needs at least 2 objects");
    }
    if (p == 0) {
        throw Error(ErrorKind::InvalidArgument, "PCA needs at least one variable");
    }
    FactorModel model;
    model.variables.assign(variables.begin(), variables.end());
    std::vector<std::size_t> cols;
    for (const auto& name : variables) {
        const auto j = table.variable_index(name);
        if (!j) {
            throw Error(ErrorKind::InvalidArgument, "variable '" + name + "' not in table");
        }
        if (table.variables[*j].kind == symbolic::VariableKind::Modal) {
            throw Error(ErrorKind::InvalidArgument, "variable '" + name + "' is modal; PCA needs interval data");
        }
        cols.push_back(*j);
    }

    Matrix z(n, p);
    model.means.assign(p, 0.0);
    model.sds.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            z(i, k) = symbolic::as_interval(table.cells[i][cols[k]]).mid();
            model.means[k] += z(i, k);
        }
        model.means[k] /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (z(i, k) - model.means[k]) * (z(i, k) - model.means[k]);
        model.sds[k] = std::sqrt(var / static_cast<double>(n));
        if (!(model.sds[k] > 0.0)) {
            throw Error(ErrorKind::Validation, "variable '" + variables[k] + "' has zero variance");
        }
        for (std::size_t i = 0; i < n; ++i) z(i, k) = (z(i, k) - model.means[k]) / model.sds[k];
    }

    model.correlation = Matrix(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += z(i, a) * z(i, b);
            model.correlation(a, b) = s / static_cast<double>(n);
            model.correlation(b, a) = model.correlation(a, b);
        }
    }

    auto eig = symmetric_eigen(model.correlation);
    double trace = 0.0;
    for (auto& l : eig.values) {
        if (l < 0.0 && l > -1e-10) l = 0.0;
        trace += l;
    }
    model.eigenvalues = eig.values;
    model.axes = std::move(eig.vectors);
    for (double l : model.eigenvalues) model.explained.push_back(100.0 * l / trace);
    return model;
}

Rectangle project_rectangle(const FactorModel& model, std::string label, std::span<const symbolic::Interval> cells,
                            std::span<const std::size_t> axes) {
    const std::size_t p = model.dimension();
    if (cells.size() != p) {
        throw Error(ErrorKind::InvalidArgument, "object '" + label + "' is missing model variables");
    }
    Rectangle r;
    r.label = std::move(label);
    r.axes.assign(axes.begin(), axes.end());
    for (auto k : axes) {
        if (k >= p) {
            throw Error(ErrorKind::InvalidArgument, "axis " + std::to_string(k + 1) + " out of range (model has " +
                                                        std::to_string(p) + ")");
        }
        symbolic::Interval b{0.0, 0.0};
        for (std::size_t j = 0; j < p; ++j) {
            const double u = model.axes(j, k);
            const double lo = u * (cells[j].lo - model.means[j]) / model.sds[j];
            const double hi = u * (cells[j].hi - model.means[j]) / model.sds[j];
            b.lo += std::min(lo, hi);
            b.hi += std::max(lo, hi);
        }
        r.bounds.push_back(b);
    }
    return r;
}

std::vector<Rectangle> project_table(const FactorModel& model, const symbolic::SymbolicTable& table,
                                     std::span<const std::size_t> axes) {
    std::vector<std::size_t> cols;
    for (const auto& name : model.variables) {
        const auto j = table.variable_index(name);
        if (!j) {
            throw Error(ErrorKind::InvalidArgument, "variable '" + name + "' not in table");
        }
        cols.push_back(*j);
    }
    std::vector<Rectangle> out;
    for (std::size_t i = 0; i < table.object_count(); ++i) {
        std::vector<symbolic::Interval> cells;
        for (auto j : cols) cells.push_back(symbolic::as_interval(table.cells[i][j]));
        out.push_back(project_rectangle(model, table.labels[i], cells, axes));
    }
    return out;
}

std::string render_factor_plot(const FactorModel& model, std::span<const Rectangle> rectangles,
                               std::pair<std::size_t, std::size_t> axes) {
    if (rectangles.empty()) {
        throw Error(ErrorKind::InvalidArgument, "factor plot needs at least one rectangle");
    }
    const auto slot = [&](const Rectangle& r, std::size_t axis) -> const symbolic::Interval& {
        const auto it = std::find(r.axes.begin(), r.axes.end(), axis);
        if (it == r.axes.end()) {
            throw Error(ErrorKind::InvalidArgument, "rectangle '" + r.label + "' was not projected on axis " +
                                                        std::to_string(axis + 1));
        }
        return r.bounds[static_cast<std::size_t>(it - r.axes.begin())];
    };

    // World bounds always include the origin so the axes are visible.
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    for (const auto& r : rectangles) {
        const auto& bx = slot(r, axes.first);
        const auto& by = slot(r, axes.second);
        xmin = std::min(xmin, bx.lo);
        xmax = std::max(xmax, bx.hi);
        ymin = std::min(ymin, by.lo);
        ymax = std::max(ymax, by.hi);
    }
    const auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        if (!(span > 0)) span = 1.0;
        lo -= 0.05 * span;
        hi += 0.05 * span;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    constexpr double kSize = 640.0;
    constexpr double kInset = 48.0;
    const double plot = kSize - 2 * kInset;
    const auto sx = [&](double x) { return kInset + (x - xmin) / (xmax - xmin) * plot; };
    const auto sy = [&](double y) { return kInset + (ymax - y) / (ymax - ymin) * plot; };
    const auto f = [](double v) { return format_fixed(v, 2); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"white\"/>\n";
    out += "<g stroke=\"#888888\" stroke-width=\"1\">\n";
    out += "<line x1=\"" + f(sx(xmin)) + "\" y1=\"" + f(sy(0)) + "\" x2=\"" + f(sx(xmax)) + "\" y2=\"" + f(sy(0)) +
           "\"/>\n";
    out += "<line x1=\"" + f(sx(0)) + "\" y1=\"" + f(sy(ymin)) + "\" x2=\"" + f(sx(0)) + "\" y2=\"" + f(sy(ymax)) +
           "\"/>\n";
    out += "</g>\n";
    const auto title = [&](std::size_t axis) {
        return "Axis " + std::to_string(axis + 1) + " (" + format_fixed(model.explained.at(axis), 1) + "%)";
    };
    out += "<text x=\"" + f(kSize - kInset) + "\" y=\"" + f(kSize - 16) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" + title(axes.first) + "</text>\n";
    out += "<text x=\"16\" y=\"" + f(kInset - 16) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
           title(axes.second) + "</text>\n";
    out += "<g fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\">\n";
    for (const auto& r : rectangles) {
        const auto& bx = slot(r, axes.first);
        const auto& by = slot(r, axes.second);
        if (bx.hi - bx.lo == 0.0 && by.hi - by.lo == 0.0) {
            out += "<circle cx=\"" + f(sx(bx.lo)) + "\" cy=\"" + f(sy(by.lo)) + "\" r=\"3\" fill=\"#1f4e9c\"/>\n";
        } else {
            out += "<rect x=\"" + f(sx(bx.lo)) + "\" y=\"" + f(sy(by.hi)) + "\" width=\"" +
                   f(sx(bx.hi) - sx(bx.lo)) + "\" height=\"" + f(sy(by.lo) - sy(by.hi)) + "\"/>\n";
        }
    }
    out += "</g>\n";
    out += "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#202020\">\n";
    for (const auto& r : rectangles) {
        const auto& bx = slot(r, axes.first);
        const auto& by = slot(r, axes.second);
        out += "<text x=\"" + f(sx(bx.lo) + 3) + "\" y=\"" + f(sy(by.hi) - 3) + "\">" + xml_escape(r.label) +
               "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string rectangles_csv(std::span<const Rectangle> rectangles) {
    std::string out = "label";
    if (!rectangles.empty()) {
        for (auto k : rectangles.front().axes) {
            out += ",axis" + std::to_string(k + 1) + "_lo,axis" + std::to_string(k + 1) + "_hi";
        }
    }
    out += "\n";
    for (const auto& r : rectangles) {
        out += csv_field(r.label);
        for (const auto& b : r.bounds) out += "," + format_double(b.lo) + "," + format_double(b.hi);
        out += "\n";
    }
    return out;
}

}  // namespace symbourse::ipca
