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

#include "labelfuse4d/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "labelfuse4d/error.hpp"

namespace lf4d {
namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void validate(const ViewCamera& camera) {
  const Eigen::Matrix3d rrt = camera.rotation * camera.rotation.transpose();
  if (!rrt.isApprox(Eigen::Matrix3d::Identity(), 1e-6) ||
      (rrt - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
    fail(ErrorKind::kInvalid, "camera rotation is not orthonormal");
  }
  if (!(camera.fx > 0.0) || !(camera.fy > 0.0)) fail(ErrorKind::kInvalid, "camera focal must be positive");
  if (camera.width <= 0 || camera.height <= 0) fail(ErrorKind::kInvalid, "camera image size must be positive");
  if (!camera.translation.allFinite()) fail(ErrorKind::kInvalid, "camera translation is not finite");
}

ViewCamera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                   int image_size) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  ViewCamera cam;
  cam.rotation.row(0) = x.transpose();
  cam.rotation.row(1) = y.transpose();
  cam.rotation.row(2) = z.transpose();
  cam.translation = -cam.rotation * eye;
  cam.fx = cam.fy = focal;
  cam.cx = cam.cy = 0.5 * image_size;
  cam.width = cam.height = image_size;
  return cam;
}

double default_focal(int image_size) {
  return 0.5 * image_size / std::tan(radians(20.0));
}

double fit_rig_radius(double bounding_radius, int image_size, double focal, double fill) {
  if (!(bounding_radius > 0.0) || !(focal > 0.0) || image_size <= 0 || !(fill > 0.0)) {
    fail(ErrorKind::kInvalid, "fit_rig_radius: arguments must be positive");
  }
  // The silhouette of a sphere at distance d subtends half-angle asin(r/d).
  const double half_angle = std::atan(0.5 * fill * image_size / focal);
  return bounding_radius / std::sin(half_angle);
}

ViewRig build_rig(const RigParams& params) {
  if (!(params.radius > 0.0)) fail(ErrorKind::kInvalid, "rig radius must be positive");
  if (params.image_size < 64) fail(ErrorKind::kInvalid, "rig image size must be at least 64");
  if (!(std::abs(params.elevation_deg) < 90.0)) fail(ErrorKind::kInvalid, "rig elevation must be within (-90, 90)");
  ViewRig rig;
  rig.params = params;
  if (rig.params.focal <= 0.0) rig.params.focal = default_focal(params.image_size);
  if (!std::isfinite(rig.params.focal)) fail(ErrorKind::kInvalid, "rig focal must be finite");

  const Vec3 up = Vec3::UnitY();
  auto add_ring = [&](int count, double elevation_deg) {
    const double el = radians(elevation_deg);
    for (int i = 0; i < count; ++i) {
      const double az = 2.0 * std::numbers::pi * i / count;
      const Vec3 dir(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
      rig.cameras.push_back(look_at(params.center + params.radius * dir, params.center, up,
                                    rig.params.focal, params.image_size));
    }
  };
  add_ring(kHorizontalViews, 0.0);
  add_ring(kRingViews, params.elevation_deg);
  add_ring(kRingViews, -params.elevation_deg);
  return rig;
}

}  // namespace lf4d
