#pragma once

#include <array>
#include <vector>

#include "blowup/geometry.hpp"

namespace blowup::detail {

/// Delaunay triangulation of a point set (Bowyer-Watson). Input points are
/// perturbed by a deterministic sub-resolution jitter before the predicates
/// run, so cocircular configurations resolve to one valid triangulation.
/// Returned triangles are counter-clockwise in the unperturbed points.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

}  // namespace blowup::detail
