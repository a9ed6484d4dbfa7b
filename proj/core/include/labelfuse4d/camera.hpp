// Copyright 2026 The labelfuse4d Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include <Eigen/Core>

#include "labelfuse4d/mesh.hpp"

namespace lf4d {

// Pinhole camera. World point X maps to camera coordinates
// rotation * X + translation; the camera looks down +z with x to the right
// and y down the image.
struct ViewCamera {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 position() const { return -rotation.transpose() * translation; }
  // Unit viewing direction in world coordinates.
  Vec3 forward() const { return rotation.row(2).transpose(); }
  // Pixel coordinates (continuous; pixel (x, y) has its center at
  // (x + 0.5, y + 0.5)) of a point in camera coordinates with z > 0.
  Eigen::Vector2d project_camera(const Vec3& cam) const {
    return {fx * cam.x() / cam.z() + cx, fy * cam.y() / cam.z() + cy};
  }
  // Camera-frame direction of the ray through a continuous pixel position,
  // scaled so that its z component is 1.
  Vec3 ray_direction(double px, double py) const {
    return {(px - cx) / fx, (py - cy) / fy, 1.0};
  }
};

// Throws kInvalid if the rotation is not orthonormal within 1e-6 or the
// intrinsics are unusable.
void validate(const ViewCamera& camera);

ViewCamera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                   int image_size);

struct RigParams {
  Vec3 center = Vec3::Zero();
  double radius = 3.0;
  double elevation_deg = 35.0;
  int image_size = 512;
  double focal = 0.0;  // <= 0 picks default_focal(image_size)
};

// 24 cameras: 12 on the horizontal ring at 30 degree azimuth steps (views
// 0-11), 6 on the upper ring (12-17) and 6 on the lower ring (18-23) at 60
// degree steps. All look at `center` with +y as world up.
struct ViewRig {
  std::vector<ViewCamera> cameras;
  RigParams params;

  std::size_t size() const { return cameras.size(); }
  const ViewCamera& operator[](std::size_t i) const { return cameras[i]; }
};

inline constexpr int kHorizontalViews = 12;
inline constexpr int kRingViews = 6;
inline constexpr int kRigViews = kHorizontalViews + 2 * kRingViews;

// Focal length giving a 40 degree vertical field of view.
double default_focal(int image_size);

// Camera-sphere radius at which a sphere of `bounding_radius` centered on the
// rig center spans `fill` of the image height.
double fit_rig_radius(double bounding_radius, int image_size, double focal, double fill = 0.9);

ViewRig build_rig(const RigParams& params);

}  // namespace lf4d
