#include "ambiup/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace ambiup {

namespace {

void check_order(int order) {
    if (order < 0 || order > kMaxShOrder) {
        throw std::invalid_argument("sh: order out of [0, 8]");
    }
}

}  // namespace

std::size_t acn_index(int degree, int index) {
    if (degree < 0 || index < -degree || index > degree) {
        throw std::invalid_argument("acn_index: require |index| <= degree");
    }
    return static_cast<std::size_t>(degree * (degree + 1) + index);
}

int sh_channel_count(int order) {
    check_order(order);
    return (order + 1) * (order + 1);
}

void acn_degree_index(std::size_t acn, int& degree, int& index) {
    degree = static_cast<int>(std::sqrt(static_cast<double>(acn)));
    while (static_cast<std::size_t>(degree * degree) > acn) --degree;
    while (static_cast<std::size_t>((degree + 1) * (degree + 1)) <= acn) ++degree;
    index = static_cast<int>(acn) - degree * (degree + 1);
}

void real_sh_into(int order, const Direction& direction, double* out) {
    check_order(order);
    const double z = std::sin(direction.elevation());
    const double s = std::cos(direction.elevation());  // sqrt(1 - z^2), >= 0
    const double az = direction.azimuth();

    // Associated Legendre P_l^m(z) without Condon-Shortley phase, column by
    // column in m via the standard recurrences:
    //   P_m^m     = (2m-1)!! s^m
    //   P_{m+1}^m = (2m+1) z P_m^m
    //   P_l^m     = ((2l-1) z P_{l-1}^m - (l+m-1) P_{l-2}^m) / (l-m)
    double plm[kMaxShOrder + 1][kMaxShOrder + 1];
    double pmm = 1.0;
    for (int m = 0; m <= order; ++m) {
        if (m > 0) pmm *= (2.0 * m - 1.0) * s;
        plm[m][m] = pmm;
        if (m + 1 <= order) plm[m + 1][m] = (2.0 * m + 1.0) * z * pmm;
        for (int l = m + 2; l <= order; ++l) {
            plm[l][m] = ((2.0 * l - 1.0) * z * plm[l - 1][m] - (l + m - 1.0) * plm[l - 2][m]) /
                        static_cast<double>(l - m);
        }
    }

    // SN3D: N_l^m = sqrt((2 - delta_m0) (l-m)!/(l+m)!)
    for (int l = 0; l <= order; ++l) {
        out[acn_index(l, 0)] = plm[l][0];
        double ratio = 1.0;  // (l-m)!/(l+m)!
        for (int m = 1; m <= l; ++m) {
            ratio /= static_cast<double>((l - m + 1) * (l + m));
            const double norm = std::sqrt(2.0 * ratio);
            const double base = norm * plm[l][m];
            out[acn_index(l, m)] = base * std::cos(m * az);
            out[acn_index(l, -m)] = base * std::sin(m * az);
        }
    }
}

ShVector real_sh(int order, const Direction& direction) {
    ShVector sh;
    sh.order = order;
    sh.coeffs.resize(static_cast<std::size_t>(sh_channel_count(order)));
    real_sh_into(order, direction, sh.coeffs.data());
    return sh;
}

double legendre_p(int degree, double x) {
    if (degree < 0) throw std::invalid_argument("legendre_p: negative degree");
    if (degree == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int l = 2; l <= degree; ++l) {
        const double next = ((2.0 * l - 1.0) * x * p - (l - 1.0) * pm1) / static_cast<double>(l);
        pm1 = p;
        p = next;
    }
    return p;
}

}  // namespace ambiup
