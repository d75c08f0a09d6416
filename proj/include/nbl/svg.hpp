#pragma once

// SVG figures on a fixed 1024-unit viewport: cells colored by sign,
// cells the nodal set passes through drawn black.

#include <string>

#include "nbl/nodal.hpp"
#include "nbl/sphere.hpp"

namespace nbl {

// Two panels: the base slice θ = 0 (x_3 = 0 when d = 3) and the slice
// x_2 = 0 spanned by x_1 and θ.
std::string nodal_slices_svg(const LiftedField& field, const std::string& title);

// Equirectangular plot: θ horizontal, colatitude φ vertical.
std::string sphere_svg(const sphere::SphereHarmonic& h, const std::string& title);

}  // namespace nbl
