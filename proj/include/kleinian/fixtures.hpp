#pragma once

#include "kleinian/schottky.hpp"

namespace kleinian {

// <boost(t)> acting on H^n, disks around +-e1 bounded by the isometric spheres.
SchottkyGroup cyclic_group(int n, double t);

// Rank-2 group on H^2 uniformizing a pair of pants:
//   a = B1(s) B2(t) B1(-s),  b = R(pi) a R(pi)^{-1}.
// Disks are the B1(s)-images of the isometric arcs of B2(t).
SchottkyGroup pants_group(double t, double s);

// Image of a cap under a group element (n = 2 or 3).
Disk image_disk(const GroupElement& g, const Disk& d);

}  // namespace kleinian
