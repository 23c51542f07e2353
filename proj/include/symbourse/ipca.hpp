#pragma once

#include "symbourse/common.hpp"
#include "symbourse/symbolic.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace symbourse::ipca {

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column k is the unit eigenvector of values[k]
    double residual = 0.0;       // largest off-diagonal magnitude after rotation
    int sweeps = 0;
};

// Cyclic Jacobi rotations. Each eigenvector is signed so that its
// largest-magnitude component is positive.
EigenDecomposition symmetric_eigen(const Matrix& matrix, double tol = 1e-12, int max_sweeps = 100);

struct FactorModel {
    std::vector<std::string> variables;
    std::vector<double> means;  // of interval midpoints
    std::vector<double> sds;    // population sd of midpoints
    Matrix correlation;
    std::vector<double> eigenvalues;
    Matrix axes;                     // p x p, column k is axis k+1
    std::vector<double> explained;   // percent per axis

    std::size_t dimension() const { return variables.size(); }
};

// PCA of standardised interval midpoints (centers method).
FactorModel centers_pca(const symbolic::SymbolicTable& table, std::span<const std::string> variables);

struct Rectangle {
    std::string label;
    std::vector<std::size_t> axes;            // 0-based axis indices
    std::vector<symbolic::Interval> bounds;   // one per axis
};

// Projects the hyper-rectangle `cells` (original units, one per model
// variable) onto the given axes; each side is the min/max over all vertices.
Rectangle project_rectangle(const FactorModel& model, std::string label,
                            std::span<const symbolic::Interval> cells, std::span<const std::size_t> axes);

std::vector<Rectangle> project_table(const FactorModel& model, const symbolic::SymbolicTable& table,
                                     std::span<const std::size_t> axes);

// Deterministic SVG of rectangles on a factor plane (two axes).
std::string render_factor_plot(const FactorModel& model, std::span<const Rectangle> rectangles,
                               std::pair<std::size_t, std::size_t> axes);

// `label,axis<k>_lo,axis<k>_hi,...` with 1-based axis numbers.
std::string rectangles_csv(std::span<const Rectangle> rectangles);

}  // namespace symbourse::ipca
