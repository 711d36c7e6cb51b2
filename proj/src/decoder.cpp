#include "ambiup/decoder.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "ambiup/sh.hpp"

namespace ambiup {

DecoderMatrix sampling_decoder(const GridLayout& grid, int order) {
    const int channels = sh_channel_count(order);
    const std::size_t n = grid.size();
    if (n == 0) throw std::invalid_argument("sampling_decoder: empty grid");

    DecoderMatrix dec;
    dec.rows = n;
    dec.cols = static_cast<std::size_t>(channels);
    dec.order = order;
    dec.kind = DecoderKind::Sampling;
    dec.grid_label = grid.label;
    dec.data.resize(n * dec.cols);

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> sh(dec.cols);
    for (std::size_t p = 0; p < n; ++p) {
        real_sh_into(order, grid.points[p], sh.data());
        double* row = dec.data.data() + p * dec.cols;
        for (int c = 0; c < channels; ++c) {
            int degree, index;
            acn_degree_index(static_cast<std::size_t>(c), degree, index);
            row[c] = (2.0 * degree + 1.0) * sh[static_cast<std::size_t>(c)] * inv_n;
        }
    }
    return dec;
}

DecoderMatrix pseudoinverse_decoder(const GridLayout& grid, int order) {
    const int channels = sh_channel_count(order);
    const std::size_t n = grid.size();
    if (n == 0) throw std::invalid_argument("pseudoinverse_decoder: empty grid");

    Eigen::MatrixXd sh_matrix(static_cast<Eigen::Index>(n), channels);
    std::vector<double> sh(static_cast<std::size_t>(channels));
    for (std::size_t p = 0; p < n; ++p) {
        real_sh_into(order, grid.points[p], sh.data());
        for (int c = 0; c < channels; ++c) {
            sh_matrix(static_cast<Eigen::Index>(p), c) = sh[static_cast<std::size_t>(c)];
        }
    }

    // D = pinv(Y^T), so the re-encode of the feeds reproduces the coefficients.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sh_matrix.transpose());
    Eigen::MatrixXd pinv = cod.pseudoInverse();

    DecoderMatrix dec;
    dec.rows = n;
    dec.cols = static_cast<std::size_t>(channels);
    dec.order = order;
    dec.kind = DecoderKind::Pseudoinverse;
    dec.grid_label = grid.label;
    dec.data.resize(n * dec.cols);
    for (std::size_t p = 0; p < n; ++p) {
        for (int c = 0; c < channels; ++c) {
            dec.data[p * dec.cols + static_cast<std::size_t>(c)] =
                pinv(static_cast<Eigen::Index>(p), c);
        }
    }
    return dec;
}

}  // namespace ambiup
