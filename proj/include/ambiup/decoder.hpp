#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ambiup/grid.hpp"

namespace ambiup {

enum class DecoderKind { Sampling, Pseudoinverse };

// Dense decode matrix mapping (order+1)^2 SN3D coefficients to one virtual
// loudspeaker feed per grid point.  Row-major, rows = grid points.
struct DecoderMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int order = 0;
    DecoderKind kind = DecoderKind::Sampling;
    std::string grid_label;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Per-degree-scaled transpose: D[p][c] = (2*l_c + 1) * Y_c(p) / P.  On an
// exact design this equals the pseudoinverse; its decode-of-encode kernel is
// the truncated delta sum_l (2l+1) P_l(cos gamma) / P, so feeds for a single
// encoded source peak at the nearest grid point.
DecoderMatrix sampling_decoder(const GridLayout& grid, int order);

// Moore-Penrose pseudoinverse of the re-encode matrix Y^T.
DecoderMatrix pseudoinverse_decoder(const GridLayout& grid, int order);

}  // namespace ambiup
