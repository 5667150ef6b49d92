#pragma once

#include <array>
#include <cmath>

namespace sagin {

using Vec3 = std::array<double, 3>;

inline double distance_3d(const Vec3& a, const Vec3& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double dz = b[2] - a[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(b[0] - a[0], b[1] - a[1]);
}

// Elevation angle of `up` as seen from `low`, degrees above the horizon.
inline double elevation_deg(const Vec3& low, const Vec3& up) {
    const double h = horizontal_distance(low, up);
    const double dz = up[2] - low[2];
    if (h == 0.0) return dz >= 0.0 ? 90.0 : -90.0;
    return std::atan2(dz, h) * 180.0 / M_PI;
}

}  // namespace sagin
