#include "ambiup/direction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ambiup {

namespace {

double wrap_azimuth(double az) {
    // remainder() maps into [-pi, pi]; fold the closed upper edge.
    double w = std::remainder(az, 2.0 * M_PI);
    if (w >= M_PI) w -= 2.0 * M_PI;
    return w;
}

constexpr double kPoleEpsilon = 1e-12;

}  // namespace

Direction::Direction(double azimuth_rad, double elevation_rad) {
    if (!(elevation_rad >= -M_PI / 2 - 1e-12 && elevation_rad <= M_PI / 2 + 1e-12)) {
        throw std::invalid_argument("Direction: elevation out of [-pi/2, pi/2]");
    }
    el_ = std::clamp(elevation_rad, -M_PI / 2, M_PI / 2);
    az_ = (M_PI / 2 - std::abs(el_) < kPoleEpsilon) ? 0.0 : wrap_azimuth(azimuth_rad);
}

Direction Direction::from_unit_vector(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (norm < 1e-12) {
        throw std::invalid_argument("Direction: cannot normalize zero vector");
    }
    x /= norm;
    y /= norm;
    z /= norm;
    const double el = std::asin(std::clamp(z, -1.0, 1.0));
    const double horiz = std::sqrt(x * x + y * y);
    const double az = (horiz < kPoleEpsilon) ? 0.0 : std::atan2(y, x);
    return Direction(az, el);
}

Direction Direction::from_unit_vector(const std::array<double, 3>& v) {
    return from_unit_vector(v[0], v[1], v[2]);
}

std::array<double, 3> Direction::unit_vector() const {
    const double ce = std::cos(el_);
    return {ce * std::cos(az_), ce * std::sin(az_), std::sin(el_)};
}

double Direction::angle_to(const Direction& other) const {
    const auto a = unit_vector();
    const auto b = other.unit_vector();
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

}  // namespace ambiup
