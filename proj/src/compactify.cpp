#include "brlab/compactify.hpp"

#include <cmath>
#include <stdexcept>

namespace brlab {

std::string to_string(ChartId c) {
  static const char* names[] = {"U1", "U2", "U3", "V1", "V2", "V3"};
  return names[static_cast<int>(c)];
}

DiscPoint plane_to_disc(PlanePoint q) {
  double n = std::sqrt(1 + q.x * q.x + q.y * q.y);
  return {q.x / n, q.y / n};
}

PlanePoint disc_to_plane(DiscPoint d) {
  double r2 = d.u * d.u + d.v * d.v;
  if (!(r2 < 1)) throw std::domain_error("point at infinity");
  double n = std::sqrt(1 - r2);
  return {d.u / n, d.v / n};
}

Vec3 plane_to_sphere(PlanePoint q) {
  double n = std::sqrt(1 + q.x * q.x + q.y * q.y);
  return {q.x / n, q.y / n, 1 / n};
}

Vec3 disc_to_sphere(DiscPoint d) {
  double r2 = d.u * d.u + d.v * d.v;
  if (r2 > 1 + 1e-12) throw std::domain_error("disc point outside the unit disc");
  return {d.u, d.v, std::sqrt(std::max(0.0, 1 - r2))};
}

DiscPoint sphere_to_disc(const Vec3& s) { return {s[0], s[1]}; }

namespace {

int axis_of(ChartId c) {
  switch (c) {
    case ChartId::U1: case ChartId::V1: return 0;
    case ChartId::U2: case ChartId::V2: return 1;
    default: return 2;
  }
}

bool is_v(ChartId c) { return c == ChartId::V1 || c == ChartId::V2 || c == ChartId::V3; }

Vec3 normalize(Vec3 v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

Vec3 chart_to_sphere(const ChartPoint& cp) {
  Vec3 v;
  switch (axis_of(cp.chart)) {
    case 0: v = {1, cp.z1, cp.z2}; break;
    case 1: v = {cp.z1, 1, cp.z2}; break;
    default: v = {cp.z1, cp.z2, 1}; break;
  }
  v = normalize(v);
  if (is_v(cp.chart)) v = {-v[0], -v[1], -v[2]};
  return v;
}

ChartPoint sphere_to_chart(const Vec3& s, ChartId target) {
  int a = axis_of(target);
  double d = s[a];
  if (is_v(target) ? !(d < 0) : !(d > 0))
    throw std::domain_error("point outside chart " + to_string(target));
  switch (a) {
    case 0: return {target, s[1] / d, s[2] / d};
    case 1: return {target, s[0] / d, s[2] / d};
    default: return {target, s[0] / d, s[1] / d};
  }
}

ChartPoint chart_transition(const ChartPoint& cp, ChartId target) {
  if (cp.chart == target) return cp;
  return sphere_to_chart(chart_to_sphere(cp), target);
}

ChartId best_chart(const Vec3& s) {
  int a = 0;
  for (int i = 1; i < 3; ++i)
    if (std::fabs(s[i]) > std::fabs(s[a])) a = i;
  static const ChartId pos[] = {ChartId::U1, ChartId::U2, ChartId::U3};
  static const ChartId neg[] = {ChartId::V1, ChartId::V2, ChartId::V3};
  return s[a] >= 0 ? pos[a] : neg[a];
}

Vec2 field_u1(const Params& p, double z1, double z2) {
  return {z2 + (p.b() + 1) * z1 * z1 - p.c() * z1 * z2, z2 * (z1 - z2)};
}

Vec2 field_u2(const Params& p, double z1, double z2) {
  const double c = p.c(), b = p.b();
  return {z1 * (c * z2 - z1 * z2 - b - 1), z2 * (c * z2 - z1 * z2 - z2 - b)};
}

Vec2 chart_field(const Params& p, ChartId chart, double z1, double z2) {
  Vec2 f;
  switch (axis_of(chart)) {
    case 0: f = field_u1(p, z1, z2); break;
    case 1: f = field_u2(p, z1, z2); break;
    default: f = eval_field(p, {z1, z2}); break;
  }
  if (is_v(chart)) f = {-f[0], -f[1]};
  return f;
}

Mat2 chart_jacobian(const Params& p, ChartId chart, double z1, double z2) {
  const double b = p.b(), c = p.c();
  Mat2 j;
  switch (axis_of(chart)) {
    case 0: j = {{{2 * (b + 1) * z1 - c * z2, 1 - c * z1}, {z2, z1 - 2 * z2}}}; break;
    case 1:
      j = {{{c * z2 - 2 * z1 * z2 - b - 1, z1 * (c - z1)},
            {-z2 * z2, 2 * c * z2 - 2 * z1 * z2 - 2 * z2 - b}}};
      break;
    default: j = jacobian(p, {z1, z2}); break;
  }
  if (is_v(chart))
    for (auto& r : j)
      for (auto& e : r) e = -e;
  return j;
}

std::string to_string(InfinityKind k) {
  switch (k) {
    case InfinityKind::nilpotent_elliptic_hyperbolic: return "nilpotent (hyperbolic + elliptic sectors)";
    case InfinityKind::saddle: return "saddle";
    case InfinityKind::stable_node: return "stable node";
    case InfinityKind::unstable_node: return "unstable node";
    case InfinityKind::saddle_node: return "saddle-node";
  }
  return "?";
}

std::vector<InfinitePoint> infinite_singular_points(const Params& p) {
  const double b = p.b();
  InfinityKind u2 = b < 0 ? InfinityKind::saddle : (b > 0 ? InfinityKind::stable_node : InfinityKind::saddle_node);
  InfinityKind v2 = b < 0 ? InfinityKind::saddle : (b > 0 ? InfinityKind::unstable_node : InfinityKind::saddle_node);
  return {
      {"U1", ChartId::U1, {1, 0}, InfinityKind::nilpotent_elliptic_hyperbolic, {0, 0}},
      {"U2", ChartId::U2, {0, 1}, u2, {-b - 1, -b}},
      {"V1", ChartId::V1, {-1, 0}, InfinityKind::nilpotent_elliptic_hyperbolic, {0, 0}},
      {"V2", ChartId::V2, {0, -1}, v2, {b + 1, b}},
  };
}

}  // namespace brlab
