#pragma once

#include <array>
#include <string>
#include <vector>

#include "brlab/model.hpp"

namespace brlab {

enum class ChartId { U1, U2, U3, V1, V2, V3 };
std::string to_string(ChartId c);

struct ChartPoint {
  ChartId chart;
  double z1, z2;
};

struct DiscPoint {
  double u = 0, v = 0;
};

// Unit vector on the Poincare sphere; the disc is the projection of y3 >= 0.
using Vec3 = std::array<double, 3>;

DiscPoint plane_to_disc(PlanePoint q);
PlanePoint disc_to_plane(DiscPoint d);

Vec3 plane_to_sphere(PlanePoint q);
Vec3 disc_to_sphere(DiscPoint d);
DiscPoint sphere_to_disc(const Vec3& s);
Vec3 chart_to_sphere(const ChartPoint& cp);
// throws std::domain_error if the sphere point is outside the chart
ChartPoint sphere_to_chart(const Vec3& s, ChartId target);
ChartPoint chart_transition(const ChartPoint& cp, ChartId target);
// Chart whose defining coordinate |y_i| is largest.
ChartId best_chart(const Vec3& s);

// Polynomial fields of the charts. U1/U2 are the compactified fields; V1/V2 are the
// same expressions times -1, U3 is the plane field and V3 its negative.
Vec2 field_u1(const Params& p, double z1, double z2);
Vec2 field_u2(const Params& p, double z1, double z2);
Vec2 chart_field(const Params& p, ChartId chart, double z1, double z2);
Mat2 chart_jacobian(const Params& p, ChartId chart, double z1, double z2);

enum class InfinityKind { nilpotent_elliptic_hyperbolic, saddle, stable_node, unstable_node, saddle_node };
std::string to_string(InfinityKind k);

struct InfinitePoint {
  std::string id;  // U1, V1, U2, V2 (origin of that chart)
  ChartId chart;
  DiscPoint position;
  InfinityKind kind;
  std::array<double, 2> eigenvalues;  // linearization in its chart (0, 0 for the nilpotent points)
};

std::vector<InfinitePoint> infinite_singular_points(const Params& p);

}  // namespace brlab
