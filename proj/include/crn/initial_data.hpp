#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crn/entropy.hpp"

namespace crn {

/// A real function of x parsed from text such as "1 + 0.5*cos(2*pi*x)".
///
/// Supports + - * / ^, parentheses, the constants pi and e, the variable x
/// and the functions sin, cos, tan, exp, log, sqrt, abs, tanh.
class Expression {
public:
    static Expression parse(std::string_view text);
    double operator()(double x) const;

    struct Node;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// Evaluate one expression per species at the cell midpoints of an n_x grid.
/// Throws InvalidArgument if any value is negative or not finite.
SpatialField field_from_expressions(const std::vector<std::string>& expressions, std::size_t num_cells);

/// Read a CSV with header x,c_1..c_N and interpolate linearly onto the cell
/// midpoints (constant extrapolation outside the sampled range).
SpatialField field_from_csv(const std::filesystem::path& path, std::size_t num_species, std::size_t num_cells);

} // namespace crn
