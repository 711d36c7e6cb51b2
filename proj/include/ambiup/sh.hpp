#pragma once

#include <cstddef>
#include <vector>

#include "ambiup/direction.hpp"

namespace ambiup {

// Real spherical harmonics in ACN channel order with SN3D normalization and
// no Condon-Shortley phase (AmbiX convention).  With these conventions
// channel 0 is identically 1 and every coefficient lies in [-1, 1].

inline constexpr int kMaxShOrder = 8;

// ACN index = l*(l+1) + m for degree l, index m in [-l, l].
std::size_t acn_index(int degree, int index);

// Channels for a full series of the given order: (order+1)^2.
int sh_channel_count(int order);

// Inverse of acn_index.
void acn_degree_index(std::size_t acn, int& degree, int& index);

struct ShVector {
    int order = 0;
    std::vector<double> coeffs;  // size (order+1)^2, ACN order
};

ShVector real_sh(int order, const Direction& direction);

// Writes (order+1)^2 coefficients to out; no allocation.  Hot path for
// decoder construction and rendering.
void real_sh_into(int order, const Direction& direction, double* out);

// Legendre polynomial P_l(x), used by quadrature checks and decode kernels.
double legendre_p(int degree, double x);

}  // namespace ambiup
