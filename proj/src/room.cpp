#include "ambiup/room.hpp"

#include <cmath>
#include <stdexcept>

namespace ambiup {

void RoomSpec::validate() const {
    for (double d : dimensions) {
        if (!(d > 0.0)) throw std::invalid_argument("room: dimensions must be positive");
    }
    for (double a : absorption) {
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("room: absorption must be in (0, 1]");
    }
    for (int axis = 0; axis < 3; ++axis) {
        if (!(listener_position[axis] > 0.0 && listener_position[axis] < dimensions[axis])) {
            throw std::invalid_argument("room: listener must be strictly inside the room");
        }
    }
    if (max_image_order < 0) throw std::invalid_argument("room: max_image_order must be >= 0");
}

std::vector<ImageSourceEntry> image_source_model(const RoomSpec& room,
                                                 const std::array<double, 3>& source_position,
                                                 int order_limit) {
    room.validate();
    if (order_limit < 0) throw std::invalid_argument("image_source_model: negative order limit");
    for (int axis = 0; axis < 3; ++axis) {
        if (!(source_position[axis] > 0.0 && source_position[axis] < room.dimensions[axis])) {
            throw std::invalid_argument("image_source_model: source must be inside the room");
        }
    }

    // Amplitude reflection factor per wall.
    std::array<double, 6> beta;
    for (int w = 0; w < 6; ++w) beta[w] = std::sqrt(1.0 - room.absorption[w]);

    // Mirror expansion: along each axis the image coordinate is
    // (1 - 2q) s + 2 n L with q in {0,1}, n integer.  The path then bounces
    // |n - q| times off the low wall and |n| times off the high wall.
    std::vector<ImageSourceEntry> entries;
    for (int nx = -order_limit; nx <= order_limit; ++nx) {
        for (int qx = 0; qx <= 1; ++qx) {
            const int bx = std::abs(nx - qx) + std::abs(nx);
            if (bx > order_limit) continue;
            for (int ny = -order_limit; ny <= order_limit; ++ny) {
                for (int qy = 0; qy <= 1; ++qy) {
                    const int by = std::abs(ny - qy) + std::abs(ny);
                    if (bx + by > order_limit) continue;
                    for (int nz = -order_limit; nz <= order_limit; ++nz) {
                        for (int qz = 0; qz <= 1; ++qz) {
                            const int bz = std::abs(nz - qz) + std::abs(nz);
                            const int bounces = bx + by + bz;
                            if (bounces > order_limit) continue;

                            const std::array<int, 3> n{nx, ny, nz};
                            const std::array<int, 3> q{qx, qy, qz};
                            std::array<double, 3> img;
                            double gain = 1.0;
                            for (int axis = 0; axis < 3; ++axis) {
                                img[axis] = (1.0 - 2.0 * q[axis]) * source_position[axis] +
                                            2.0 * n[axis] * room.dimensions[axis];
                                const int low = std::abs(n[axis] - q[axis]);
                                const int high = std::abs(n[axis]);
                                for (int b = 0; b < low; ++b) gain *= beta[2 * axis];
                                for (int b = 0; b < high; ++b) gain *= beta[2 * axis + 1];
                            }

                            const double dx = img[0] - room.listener_position[0];
                            const double dy = img[1] - room.listener_position[1];
                            const double dz = img[2] - room.listener_position[2];
                            const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                            if (dist < 1e-9) {
                                throw std::invalid_argument(
                                    "image_source_model: source coincides with listener");
                            }

                            ImageSourceEntry e;
                            e.delay_s = dist / kSpeedOfSound;
                            e.amplitude = gain / dist;
                            e.arrival = Direction::from_unit_vector(dx, dy, dz);
                            e.reflections = bounces;
                            entries.push_back(e);
                        }
                    }
                }
            }
        }
    }
    return entries;
}

}  // namespace ambiup
