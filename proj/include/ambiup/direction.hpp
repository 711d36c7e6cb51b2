#pragma once

#include <array>

namespace ambiup {

// A direction on the unit sphere.  Azimuth is counterclockwise from +x toward
// +y and stored normalized to [-pi, pi); elevation is up from the horizontal
// plane and must lie in [-pi/2, pi/2].  At the poles azimuth is normalized
// to 0 so that equal directions compare equal.
class Direction {
public:
    Direction() = default;
    Direction(double azimuth_rad, double elevation_rad);

    // Normalizes the input vector; throws on (near-)zero length.
    static Direction from_unit_vector(double x, double y, double z);
    static Direction from_unit_vector(const std::array<double, 3>& v);

    double azimuth() const { return az_; }
    double elevation() const { return el_; }

    // x = cos(el)cos(az), y = cos(el)sin(az), z = sin(el)
    std::array<double, 3> unit_vector() const;

    // Great-circle angle in [0, pi].
    double angle_to(const Direction& other) const;

private:
    double az_ = 0.0;
    double el_ = 0.0;
};

}  // namespace ambiup
