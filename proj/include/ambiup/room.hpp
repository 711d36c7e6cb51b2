#pragma once

#include <array>
#include <vector>

#include "ambiup/direction.hpp"

namespace ambiup {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

// Shoebox room.  Walls are indexed x0, x1, y0, y1, z0, z1; absorption is the
// energy absorption coefficient per wall in (0, 1], so the per-bounce
// amplitude reflection factor is sqrt(1 - absorption).
struct RoomSpec {
    std::array<double, 3> dimensions{6.0, 5.0, 3.0};
    std::array<double, 6> absorption{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    std::array<double, 3> listener_position{3.0, 2.5, 1.5};
    int max_image_order = 2;

    void validate() const;
};

// One mirror-image arrival at the listener.
struct ImageSourceEntry {
    double delay_s = 0.0;      // distance / c
    double amplitude = 0.0;    // product of reflection factors / distance
    Direction arrival;         // direction from listener toward the image
    int reflections = 0;       // total bounce count
};

// All image sources with at most `order_limit` reflections, direct path
// included (reflections == 0).  Entries whose amplitude is zero (fully
// absorptive wall on the path) are kept so counts stay predictable.
std::vector<ImageSourceEntry> image_source_model(const RoomSpec& room,
                                                 const std::array<double, 3>& source_position,
                                                 int order_limit);

}  // namespace ambiup
