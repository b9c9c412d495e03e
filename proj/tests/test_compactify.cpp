#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "brlab/compactify.hpp"

using namespace brlab;

namespace {

// true if a = k b with k > 0, compared after normalisation
bool positive_multiple(Vec2 a, Vec2 b, double tol) {
  double na = std::hypot(a[0], a[1]), nb = std::hypot(b[0], b[1]);
  if (na == 0 || nb == 0) return na == nb;
  return std::hypot(a[0] / na - b[0] / nb, a[1] / na - b[1] / nb) < tol;
}

// plane velocity transported to the chart coordinates of (x, y)
Vec2 transported(const Params& p, ChartId chart, double x, double y) {
  Vec2 f = eval_field(p, {x, y});
  if (chart == ChartId::U1 || chart == ChartId::V1)  // z1 = y/x, z2 = 1/x
    return {(f[1] * x - y * f[0]) / (x * x), -f[0] / (x * x)};
  return {(f[0] * y - x * f[1]) / (y * y), -f[1] / (y * y)};  // z1 = x/y, z2 = 1/y
}

}  // namespace

TEST_CASE("disc projection") {
  auto d = plane_to_disc({0, 0});
  CHECK(d.u == 0);
  CHECK(d.v == 0);
  d = plane_to_disc({1, 0});
  CHECK(d.u == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(d.v == 0);
  auto q = disc_to_plane(plane_to_disc({3, -4}));
  CHECK(std::abs(q.x - 3) < 1e-12);
  CHECK(std::abs(q.y + 4) < 1e-12);
  CHECK_THROWS_WITH_AS(disc_to_plane({1, 0}), "point at infinity", std::domain_error);
  CHECK_THROWS_AS(disc_to_plane({0.6, 0.8}), std::domain_error);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> xy(-10, 10);
  for (int i = 0; i < 500; ++i) {
    PlanePoint a{xy(rng), xy(rng)};
    auto b = disc_to_plane(plane_to_disc(a));
    // 1 - r^2 cancels, so the inverse is conditioned like 1 + |q|^2
    double tol = 1e-12 * (1 + a.x * a.x + a.y * a.y);
    CHECK(std::abs(b.x - a.x) <= tol);
    CHECK(std::abs(b.y - a.y) <= tol);
    auto s = plane_to_sphere(a);
    CHECK(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] == doctest::Approx(1));
    CHECK(sphere_to_disc(s).u == doctest::Approx(plane_to_disc(a).u));
  }
}

TEST_CASE("chart transitions") {
  auto a = chart_transition({ChartId::U3, 2, 6}, ChartId::U1);
  CHECK(a.chart == ChartId::U1);
  CHECK(a.z1 == doctest::Approx(3));
  CHECK(a.z2 == doctest::Approx(0.5));
  auto b = chart_transition(a, ChartId::U2);
  CHECK(b.z1 == doctest::Approx(1.0 / 3));
  CHECK(b.z2 == doctest::Approx(1.0 / 6));
  auto c = chart_transition(b, ChartId::U2);
  CHECK(c.z1 == b.z1);
  CHECK(c.z2 == b.z2);
  // not in the overlap: U1 needs x > 0
  CHECK_THROWS_AS(chart_transition({ChartId::U3, -1, 2}, ChartId::U1), std::domain_error);
  // V1 covers x < 0
  auto v = chart_transition({ChartId::U3, -2, 6}, ChartId::V1);
  CHECK(v.z1 == doctest::Approx(-3));
  CHECK(v.z2 == doctest::Approx(-0.5));

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> xy(-50, 50);
  const ChartId all[] = {ChartId::U1, ChartId::U2, ChartId::U3, ChartId::V1, ChartId::V2, ChartId::V3};
  for (int i = 0; i < 200; ++i) {
    Vec3 s = plane_to_sphere({xy(rng), xy(rng)});
    for (ChartId from : all)
      for (ChartId to : all) {
        ChartPoint p;
        try {
          p = sphere_to_chart(s, from);
        } catch (const std::domain_error&) {
          continue;
        }
        ChartPoint q;
        try {
          q = chart_transition(p, to);
        } catch (const std::domain_error&) {
          continue;
        }
        auto back = chart_transition(q, from);  // involutive where defined
        CHECK(back.z1 == doctest::Approx(p.z1).epsilon(1e-12));
        CHECK(back.z2 == doctest::Approx(p.z2).epsilon(1e-12));
      }
  }
}

TEST_CASE("chart field examples") {
  for (double b : {-0.5, 0.0, 1.0}) {
    Params p(b, 1.7);
    auto o = field_u1(p, 0, 0);
    CHECK(o[0] == 0);
    CHECK(o[1] == 0);
    Mat2 J = chart_jacobian(p, ChartId::U1, 0, 0);
    CHECK(J == Mat2{{{0, 1}, {0, 0}}});
    auto e = field_u1(p, 1, 0);
    CHECK(e[0] == doctest::Approx(b + 1));
    CHECK(e[1] == 0);
    J = chart_jacobian(p, ChartId::U2, 0, 0);
    CHECK(J == Mat2{{{-b - 1, 0}, {0, -b}}});
  }
  auto v = field_u1(Params(0, 1), 1, 1);
  CHECK(v[0] == 1);
  CHECK(v[1] == 0);
  // V charts carry the negated expressions
  auto w = chart_field(Params(0.3, 2), ChartId::V1, 0.4, -0.2), u = field_u1(Params(0.3, 2), 0.4, -0.2);
  CHECK(w[0] == -u[0]);
  CHECK(w[1] == -u[1]);
}

TEST_CASE("infinite singular points") {
  for (double b : {-0.9, -0.5, 0.0, 0.5, 3.0}) {
    auto pts = infinite_singular_points(Params(b, 1));
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].id == "U1");
    CHECK(pts[0].position.u == 1);
    CHECK(pts[0].kind == InfinityKind::nilpotent_elliptic_hyperbolic);
    CHECK(pts[2].position.u == -1);
    CHECK(pts[1].position.v == 1);
    CHECK(pts[3].position.v == -1);
    InfinityKind k = b < 0 ? InfinityKind::saddle : b > 0 ? InfinityKind::stable_node : InfinityKind::saddle_node;
    CHECK(pts[1].kind == k);
    for (auto& q : pts) {
      Vec3 s = disc_to_sphere(q.position);
      auto cp = sphere_to_chart(s, q.chart);
      auto f = chart_field(Params(b, 1), q.chart, cp.z1, cp.z2);
      CHECK(std::hypot(f[0], f[1]) < 1e-15);
    }
  }
  // the U1 field has no other zero on z2 = 0
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> z(-100, 100);
  for (int i = 0; i < 200; ++i) {
    double z1 = z(rng);
    CHECK(field_u1(Params(0.2, 1), z1, 0)[0] != 0);
  }
}

TEST_CASE("the infinity circle is invariant") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> bb(-0.99, 5), cc(0.01, 8), z(-20, 20);
  for (int i = 0; i < 500; ++i) {
    Params p(bb(rng), cc(rng));
    double z1 = z(rng);
    CHECK(field_u1(p, z1, 0)[1] == 0);
    CHECK(field_u2(p, z1, 0)[1] == 0);
  }
}

TEST_CASE("chart jacobians match central differences") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> bb(-0.99, 5), cc(0.01, 8), z(-3, 3);
  const double h = 1e-6;
  for (ChartId ch : {ChartId::U1, ChartId::U2, ChartId::V1, ChartId::V2})
    for (int i = 0; i < 100; ++i) {
      Params p(bb(rng), cc(rng));
      double a = z(rng), b = z(rng);
      Mat2 J = chart_jacobian(p, ch, a, b);
      Vec2 f1p = chart_field(p, ch, a + h, b), f1m = chart_field(p, ch, a - h, b);
      Vec2 f2p = chart_field(p, ch, a, b + h), f2m = chart_field(p, ch, a, b - h);
      for (int r = 0; r < 2; ++r) {
        CHECK(J[r][0] == doctest::Approx((f1p[r] - f1m[r]) / (2 * h)).epsilon(1e-6).scale(10));
        CHECK(J[r][1] == doctest::Approx((f2p[r] - f2m[r]) / (2 * h)).epsilon(1e-6).scale(10));
      }
    }
}

TEST_CASE("chart fields are orbit-equivalent to the plane field") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> bb(-0.99, 5), cc(0.01, 8), xy(-30, 30);
  int n = 0;
  for (int i = 0; i < 2000; ++i) {
    Params p(bb(rng), cc(rng));
    double x = xy(rng), y = xy(rng);
    Vec3 s = plane_to_sphere({x, y});
    for (ChartId ch : {ChartId::U1, ChartId::U2, ChartId::V1, ChartId::V2}) {
      ChartPoint cp;
      try {
        cp = sphere_to_chart(s, ch);
      } catch (const std::domain_error&) {
        continue;
      }
      Vec2 f = eval_field(p, {x, y});
      if (std::hypot(f[0], f[1]) < 1e-6) continue;
      CAPTURE(to_string(ch));
      CHECK(positive_multiple(chart_field(p, ch, cp.z1, cp.z2), transported(p, ch, x, y), 1e-9));
      ++n;
    }
  }
  CHECK(n > 3000);
}

TEST_CASE("U1 and U2 fields agree on their overlap") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> bb(-0.99, 5), cc(0.01, 8), z1s(0.05, 20), z2s(0, 5);
  for (int i = 0; i < 1000; ++i) {
    Params p(bb(rng), cc(rng));
    double z1 = z1s(rng), z2 = i % 5 == 0 ? 0.0 : z2s(rng);  // include the infinity circle
    Vec2 f = field_u1(p, z1, z2);
    // w = (1/z1, z2/z1)
    Vec2 pushed{-f[0] / (z1 * z1), (f[1] * z1 - z2 * f[0]) / (z1 * z1)};
    Vec2 g = field_u2(p, 1 / z1, z2 / z1);
    if (std::hypot(g[0], g[1]) < 1e-9) continue;
    CHECK(positive_multiple(g, pushed, 1e-9));
  }
}
