#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ambiup/direction.hpp"

namespace ambiup {

// A finite set of evaluation directions treated as an equal-weight spherical
// quadrature (weight 1/P per point).
struct GridLayout {
    std::vector<Direction> points;
    std::string label;  // e.g. "fib:484" or "file:tdesign24.txt"

    std::size_t size() const { return points.size(); }
};

// Fibonacci sphere lattice: z_i = 1 - (2i+1)/n, azimuthal step pi*(3-sqrt(5)).
// Not an exact quadrature, but its Gram error decreases monotonically with n.
GridLayout fibonacci_grid(std::size_t n);

// Loads "x y z" rows (whitespace separated, '#' comments, blank lines ok).
// Rows must be unit vectors to 1e-6 (then re-normalized exactly) and pairwise
// distinct by more than 1e-9 rad; violations are FormatErrors.
GridLayout load_grid_file(const std::filesystem::path& path);

// Parses a grid spec: "fib:N" or a path to a grid file.
GridLayout parse_grid_spec(const std::string& spec);

// Worst-case deviation of the discrete SN3D Gram matrix from its continuous
// value diag(1/(2l+1)), over all channel pairs up to `order`.  Exact designs
// of strength >= 2*order sit at numerical zero.
double quadrature_error(const GridLayout& grid, int order);

}  // namespace ambiup
