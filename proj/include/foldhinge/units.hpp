#pragma once

#include <numbers>

namespace foldhinge {

inline constexpr double pi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / pi); }

// Incompressible (Poisson ratio 0.5) conversion between Young's and shear modulus.
constexpr double shear_from_youngs(double e_mpa) { return e_mpa / 3.0; }
constexpr double youngs_from_shear(double g_mpa) { return 3.0 * g_mpa; }

}  // namespace foldhinge
