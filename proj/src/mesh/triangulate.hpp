#pragma once
// Internal entry point of the constrained triangulator (see triangulate.cpp).

#include <vector>

#include "thermoshape/mesh.hpp"

namespace thermoshape {

// Triangulates the given fixed point set; the loop index cycles become
// constrained edges.  `locked` marks vertices the smoothing pass must not
// move (rectangle boundary and loop vertices).
Mesh triangulate_with_loops(const std::vector<Vec2>& points,
                            const std::vector<std::vector<int>>& loop_indices,
                            const std::vector<char>& locked,
                            double width, double height, int smooth_passes);

}  // namespace thermoshape
