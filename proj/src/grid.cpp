#include "ambiup/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ambiup/errors.hpp"
#include "ambiup/sh.hpp"

namespace ambiup {

GridLayout fibonacci_grid(std::size_t n) {
    if (n == 0) throw std::invalid_argument("fibonacci_grid: n must be positive");
    GridLayout grid;
    grid.label = "fib:" + std::to_string(n);
    grid.points.reserve(n);
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        grid.points.push_back(Direction::from_unit_vector(r * std::cos(phi), r * std::sin(phi), z));
    }
    return grid;
}

GridLayout load_grid_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("grid: cannot open " + path.string());

    GridLayout grid;
    grid.label = "file:" + path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double x, y, z;
        if (!(row >> x)) continue;  // blank or comment-only line
        if (!(row >> y >> z)) {
            throw FormatError("grid: malformed row at " + path.string() + ":" +
                              std::to_string(line_no));
        }
        double extra;
        if (row >> extra) {
            throw FormatError("grid: expected 3 values at " + path.string() + ":" +
                              std::to_string(line_no));
        }
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (std::abs(norm - 1.0) > 1e-6) {
            throw FormatError("grid: non-unit vector at " + path.string() + ":" +
                              std::to_string(line_no));
        }
        grid.points.push_back(Direction::from_unit_vector(x, y, z));
    }
    if (grid.points.empty()) throw FormatError("grid: no points in " + path.string());

    // duplicate detection: pairwise angular separation must exceed 1e-9 rad
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.points.size(); ++j) {
            if (grid.points[i].angle_to(grid.points[j]) <= 1e-9) {
                throw FormatError("grid: duplicate points " + std::to_string(i) + " and " +
                                  std::to_string(j) + " in " + path.string());
            }
        }
    }
    return grid;
}

GridLayout parse_grid_spec(const std::string& spec) {
    if (spec.rfind("fib:", 0) == 0) {
        const std::string count = spec.substr(4);
        std::size_t parsed = 0;
        unsigned long long n = 0;
        try {
            n = std::stoull(count, &parsed);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid spec: bad point count in '" + spec + "'");
        }
        if (parsed != count.size() || n == 0) {
            throw std::invalid_argument("grid spec: bad point count in '" + spec + "'");
        }
        return fibonacci_grid(static_cast<std::size_t>(n));
    }
    return load_grid_file(spec);
}

double quadrature_error(const GridLayout& grid, int order) {
    const int channels = sh_channel_count(order);
    const std::size_t n = grid.size();

    // Accumulate G = Y^T Y / P.
    std::vector<double> gram(static_cast<std::size_t>(channels) * channels, 0.0);
    std::vector<double> sh(static_cast<std::size_t>(channels));
    for (const auto& p : grid.points) {
        real_sh_into(order, p, sh.data());
        for (int i = 0; i < channels; ++i) {
            for (int j = i; j < channels; ++j) {
                gram[static_cast<std::size_t>(i) * channels + j] += sh[i] * sh[j];
            }
        }
    }

    double worst = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i < channels; ++i) {
        int degree, index;
        acn_degree_index(static_cast<std::size_t>(i), degree, index);
        for (int j = i; j < channels; ++j) {
            const double value = gram[static_cast<std::size_t>(i) * channels + j] * inv_n;
            const double exact = (i == j) ? 1.0 / (2.0 * degree + 1.0) : 0.0;
            worst = std::max(worst, std::abs(value - exact));
        }
    }
    return worst;
}

}  // namespace ambiup
