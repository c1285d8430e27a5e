#pragma once

#include "reloc/bench.hpp"
#include "reloc/types.hpp"

#include <cmath>
#include <random>

namespace fixture {

using reloc::Point3;
using reloc::PointCloud;
using reloc::Vec3;

/// Random points on an asymmetric scene: floor, two unequal walls, a box and a
/// sloped plate, so every degree of freedom is constrained.
inline PointCloud structured_cloud(std::uint64_t seed, int per_surface = 300) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  auto patch = [&](const Point3& o, const Vec3& a, const Vec3& b) {
    for (int i = 0; i < per_surface; ++i) c.points.push_back(o + u(rng) * a + u(rng) * b);
  };
  patch(Point3(0, 0, 0), Vec3(8, 0, 0), Vec3(0, 6, 0));          // floor
  patch(Point3(0, 0, 0), Vec3(8, 0, 0), Vec3(0, 0, 3));          // long wall
  patch(Point3(0, 0, 0), Vec3(0, 4, 0), Vec3(0, 0, 2));          // short wall
  patch(Point3(5, 3, 0), Vec3(1.5, 0, 0), Vec3(0, 0, 1.2));      // box front
  patch(Point3(5, 3, 1.2), Vec3(1.5, 0, 0), Vec3(0, 1, 0));      // box top
  patch(Point3(6.5, 3, 0), Vec3(0, 1, 0), Vec3(0, 0, 1.2));      // box side
  patch(Point3(1, 4, 0.5), Vec3(2, 0, 0), Vec3(0, 1.5, 1.0));    // sloped plate
  return c;
}

/// Rigid transform with translation norm <= max_t and rotation angle <= max_deg
/// about a random axis.
inline reloc::RigidTransform random_transform(std::mt19937_64& rng, double max_t, double max_deg) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  Vec3 dir(n(rng), n(rng), n(rng));
  dir.normalize();
  reloc::RigidTransform t;
  t.rotation = Eigen::AngleAxisd(reloc::deg2rad(max_deg * u(rng)), axis).toRotationMatrix();
  t.translation = max_t * std::cbrt(u(rng)) * dir;
  return t;
}

// A small world with distinct structure in every direction.
inline reloc::WorldSpec courtyard() {
  reloc::WorldSpec w;
  w.name = "courtyard";
  w.extent = Vec3(24, 18, 6);
  w.seed = 3;
  using K = reloc::Primitive::Kind;
  w.primitives = {
      {K::Box, Point3(0, 0, 0), Point3(24, 18, 0.2)},     {K::Wall, Point3(0, 0, 0), Point3(24, 0.4, 5)},
      {K::Wall, Point3(0, 17.6, 0), Point3(14, 18, 3)},   {K::Wall, Point3(0, 0, 0), Point3(0.4, 18, 4)},
      {K::Box, Point3(19, 10, 0), Point3(24, 18, 6)},     {K::Box, Point3(5, 5, 0), Point3(7, 9, 2.5)},
      {K::Box, Point3(12, 3, 2), Point3(16, 6, 2.6)},     {K::Ramp, Point3(8, 11, 0), Point3(14, 16, 1.6), 0},
      {K::Wall, Point3(23.6, 0, 0), Point3(24, 10, 3.5)}, {K::Wall, Point3(14, 17.6, 0), Point3(19, 18, 4.5)},
      {K::Box, Point3(18, 1, 3.2), Point3(23.6, 4, 3.6)}, {K::Box, Point3(1, 7, 4.4), Point3(5, 14, 4.8)},
      {K::Box, Point3(8, 1, 4.6), Point3(11, 8, 5.0)},    {K::Box, Point3(14, 9, 5.0), Point3(19, 13, 5.4)},
  };
  w.clutter = reloc::ClutterSpec{6, Vec3(0.4, 0.4, 0.5), Vec3(1.0, 1.0, 2.0), 0.2, 1.0};
  return w;
}

}  // namespace fixture
