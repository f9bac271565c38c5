#pragma once

#include <array>
#include <vector>

#include "mtx/mesh.hpp"

namespace mtx::detail {

// Incremental Delaunay triangulation (Lawson flips) of a point set.
// Returns counter-clockwise triangles over the convex hull.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point>& pts);

}  // namespace mtx::detail
