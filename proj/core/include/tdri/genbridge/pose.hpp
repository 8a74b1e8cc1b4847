#pragma once

#include <utility>

#include "tdri/core/types.hpp"

namespace tdri::genbridge {

// Throws InvalidPose when there are no keypoints or a coordinate leaves
// [0,1].
void validate(const Pose& pose);

// Keypoint (x, y) lands at pixel (x * W, y * H); cell (r, c) sits at
// integer pixel coordinates. The bump is an isotropic Gaussian of std `sigma`
// pixels over cells within 3 sigma, renormalized to unit mass. When no cell
// falls inside that radius the whole mass goes to the nearest cell.
Heatmap keypoint_bump(const Keypoint& kp, double sigma, int height, int width);

// Sum of unit bumps, one per keypoint. Keypoints are copied unchanged and
// `smoothed` is set. Throws InvalidSigma (sigma <= 0), InvalidGrid (a side
// below 8) and InvalidPose.
Pose smooth_pose(const Pose& pose, double sigma, int height, int width);

// Cell nearest to the keypoint, clamped into the grid: {row, col}.
std::pair<int, int> keypoint_cell(const Keypoint& kp, int height, int width);

}  // namespace tdri::genbridge
