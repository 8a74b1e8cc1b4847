#include "tdri/genbridge/pose.hpp"

#include <algorithm>
#include <cmath>

#include "tdri/core/error.hpp"

namespace tdri::genbridge {

void validate(const Pose& pose) {
  if (pose.keypoints.empty()) throw Error(ErrorCode::InvalidPose, "pose has no keypoints");
  for (std::size_t i = 0; i < pose.keypoints.size(); ++i) {
    const Keypoint& kp = pose.keypoints[i];
    if (!(kp.x >= 0.0 && kp.x <= 1.0 && kp.y >= 0.0 && kp.y <= 1.0))
      throw Error(ErrorCode::InvalidPose,
                  "keypoint " + std::to_string(i) + " lies outside the unit square");
  }
}

std::pair<int, int> keypoint_cell(const Keypoint& kp, int height, int width) {
  const int row = std::clamp(static_cast<int>(std::lround(kp.y * height)), 0, height - 1);
  const int col = std::clamp(static_cast<int>(std::lround(kp.x * width)), 0, width - 1);
  return {row, col};
}

Heatmap keypoint_bump(const Keypoint& kp, double sigma, int height, int width) {
  Heatmap h{height, width, std::vector<double>(static_cast<std::size_t>(height) * width, 0.0)};
  const double px = kp.x * width;
  const double py = kp.y * height;
  const double radius = 3.0 * sigma;
  const int r0 = std::max(0, static_cast<int>(std::floor(py - radius)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(py + radius)));
  const int c0 = std::max(0, static_cast<int>(std::floor(px - radius)));
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(px + radius)));

  double mass = 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double d2 = (r - py) * (r - py) + (c - px) * (c - px);
      if (d2 > radius * radius) continue;
      const double v = std::exp(-d2 / (2.0 * sigma * sigma));
      h.cells[static_cast<std::size_t>(r) * width + c] = v;
      mass += v;
    }
  }
  if (mass > 0.0) {
    for (double& v : h.cells) v /= mass;
  } else {
    const auto [row, col] = keypoint_cell(kp, height, width);
    h.cells[static_cast<std::size_t>(row) * width + col] = 1.0;
  }
  return h;
}

Pose smooth_pose(const Pose& pose, double sigma, int height, int width) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::InvalidSigma, "sigma must be positive", "pose_sigma");
  if (height < 8 || width < 8)
    throw Error(ErrorCode::InvalidGrid, "heatmap sides must be at least 8");
  validate(pose);

  Heatmap total{height, width, std::vector<double>(static_cast<std::size_t>(height) * width, 0.0)};
  for (const Keypoint& kp : pose.keypoints) {
    const Heatmap bump = keypoint_bump(kp, sigma, height, width);
    for (std::size_t i = 0; i < total.cells.size(); ++i) total.cells[i] += bump.cells[i];
  }
  Pose out = pose;
  out.heatmap = std::move(total);
  out.smoothed = true;
  return out;
}

}  // namespace tdri::genbridge
