#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "asdr/core.hpp"

namespace asdr {

struct Ray {
  Vec3 origin{};
  Vec3 dir{};  // normalized
};

struct Camera {
  Vec3 position{};
  Vec3 right{1, 0, 0};
  Vec3 up{0, 1, 0};
  Vec3 forward{0, 0, -1};
  double fov_y = 0.5;  // radians, vertical
  uint32_t width = 1;
  uint32_t height = 1;
  double t_near = 0.1;
  double t_far = 10.0;

  void validate() const {
    if (width == 0 || height == 0)
      throw std::invalid_argument("camera: zero image dimension");
    if (!(0.0 < t_near && t_near < t_far))
      throw std::invalid_argument("camera: need 0 < near < far");
    if (!(fov_y > 0.0 && fov_y < 3.14159))
      throw std::invalid_argument("camera: fov out of range");
    const double tol = 1e-9;
    if (std::abs(right.norm() - 1) > tol || std::abs(up.norm() - 1) > tol ||
        std::abs(forward.norm() - 1) > tol ||
        std::abs(right.dot(up)) > tol || std::abs(right.dot(forward)) > tol ||
        std::abs(up.dot(forward)) > tol)
      throw std::invalid_argument("camera: basis not orthonormal");
  }
};

inline Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint,
                      double fov_y, uint32_t width, uint32_t height,
                      double t_near, double t_far) {
  Camera cam;
  cam.position = eye;
  cam.forward = (target - eye).normalized();
  cam.right = cam.forward.cross(up_hint).normalized();
  cam.up = cam.right.cross(cam.forward);
  cam.fov_y = fov_y;
  cam.width = width;
  cam.height = height;
  cam.t_near = t_near;
  cam.t_far = t_far;
  cam.validate();
  return cam;
}

// One ray per pixel through pixel centers, row-major from the top-left.
inline std::vector<Ray> generate_rays(const Camera& cam) {
  cam.validate();
  const double tan_half = std::tan(cam.fov_y / 2.0);
  const double aspect = double(cam.width) / double(cam.height);
  std::vector<Ray> rays;
  rays.reserve(size_t(cam.width) * cam.height);
  for (uint32_t y = 0; y < cam.height; ++y) {
    const double ndc_y = 1.0 - 2.0 * (double(y) + 0.5) / double(cam.height);
    for (uint32_t x = 0; x < cam.width; ++x) {
      const double ndc_x = 2.0 * (double(x) + 0.5) / double(cam.width) - 1.0;
      const Vec3 d = cam.forward + cam.right * (ndc_x * tan_half * aspect) +
                     cam.up * (ndc_y * tan_half);
      rays.push_back({cam.position, d.normalized()});
    }
  }
  return rays;
}

}  // namespace asdr
