#include <algorithm>
#include <cmath>
#include <optional>
#include <array>
#include <random>

#include "brlab/flow.hpp"

namespace brlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Recurrence {
  DiscPoint centre;
  std::vector<double> crossings;  // distance from centre at successive passes through the ray u > centre.u
};

struct DiscPath {
  std::vector<std::array<double, 2>> pts;
};

DiscPath disc_path(const Orbit& o) {
  DiscPath d;
  for (const Vec3& s : o.pts) {
    DiscPoint p = sphere_to_disc(s);
    d.pts.push_back({p.u, p.v});
  }
  return d;
}

std::optional<Recurrence> recurrence(const DiscPath& o) {
  const size_t n = o.pts.size();
  if (n < 50) return std::nullopt;
  Recurrence rec;
  double su = 0, sv = 0;
  for (size_t i = n / 2; i < n; ++i) su += o.pts[i][0], sv += o.pts[i][1];
  rec.centre = {su / (n - n / 2), sv / (n - n / 2)};
  double wind = 0, prev = 0;
  bool first = true;
  for (size_t i = n / 2; i < n; ++i) {
    double a = std::atan2(o.pts[i][1] - rec.centre.v, o.pts[i][0] - rec.centre.u);
    if (!first) {
      double d = a - prev;
      while (d > kPi) d -= 2 * kPi;
      while (d < -kPi) d += 2 * kPi;
      wind += d;
    }
    prev = a;
    first = false;
  }
  if (std::fabs(wind) < 4 * kPi) return std::nullopt;
  const double sense = wind > 0 ? 1 : -1;
  for (size_t i = 1; i < n; ++i) {
    double y0 = sense * (o.pts[i - 1][1] - rec.centre.v), y1 = sense * (o.pts[i][1] - rec.centre.v);
    if (y0 < 0 && y1 >= 0) {
      double t = y0 / (y0 - y1);
      double u = o.pts[i - 1][0] + t * (o.pts[i][0] - o.pts[i - 1][0]);
      if (u > rec.centre.u) rec.crossings.push_back(u - rec.centre.u);
    }
  }
  if (rec.crossings.size() < 4) return std::nullopt;
  return rec;
}

std::optional<double> settled(const Recurrence& r) {
  const auto& c = r.crossings;
  size_t m = c.size();
  double d1 = std::fabs(c[m - 1] - c[m - 2]), d2 = std::fabs(c[m - 2] - c[m - 3]);
  if (d1 < 1e-6 || (d1 < 1e-3 && d1 <= d2)) return c[m - 1];
  return std::nullopt;
}

// Successive crossings of the ray to the right of a fixed centre, in the winding sense.
// Each bracketing step is re-integrated densely so that chord error does not mask the
// gap between neighbouring orbits.
std::vector<double> refined_crossings(const FlowContext& ctx, const Orbit& o, Direction dir, const FlowOptions& opt,
                                      DiscPoint centre) {
  const DiscPath path = disc_path(o);
  double wind = 0;
  for (size_t i = 1; i < path.pts.size(); ++i) {
    double a0 = std::atan2(path.pts[i - 1][1] - centre.v, path.pts[i - 1][0] - centre.u);
    double a1 = std::atan2(path.pts[i][1] - centre.v, path.pts[i][0] - centre.u);
    double d = a1 - a0;
    while (d > kPi) d -= 2 * kPi;
    while (d < -kPi) d += 2 * kPi;
    wind += d;
  }
  const double sense = wind >= 0 ? 1 : -1;
  FlowOptions fine = opt;
  fine.max_disc_step = 1e-4;
  fine.max_steps = 20000;
  std::vector<double> out;
  for (size_t i = 1; i < path.pts.size(); ++i) {
    double y0 = sense * (path.pts[i - 1][1] - centre.v), y1 = sense * (path.pts[i][1] - centre.v);
    if (!(y0 < 0 && y1 >= 0)) continue;
    double t = y0 / (y0 - y1);
    double u = path.pts[i - 1][0] + t * (path.pts[i][0] - path.pts[i - 1][0]);
    if (u <= centre.u) continue;
    fine.t_max = 1.5 * (o.t[i] - o.t[i - 1]);
    DiscPath d = disc_path(integrate(ctx, o.pts[i - 1], dir, fine));
    double best = u - centre.u;
    for (size_t k = 1; k < d.pts.size(); ++k) {
      double z0 = sense * (d.pts[k - 1][1] - centre.v), z1 = sense * (d.pts[k][1] - centre.v);
      if (z0 < 0 && z1 >= 0) {
        double s = z0 / (z0 - z1);
        best = d.pts[k - 1][0] + s * (d.pts[k][0] - d.pts[k - 1][0]) - centre.u;
        break;
      }
    }
    out.push_back(best);
  }
  return out;
}

double distance_to_path(const DiscPath& d, double u, double v) {
  double best = 1e300;
  for (size_t i = 1; i < d.pts.size(); ++i) {
    double ax = d.pts[i - 1][0], ay = d.pts[i - 1][1], ex = d.pts[i][0] - ax, ey = d.pts[i][1] - ay;
    double l2 = ex * ex + ey * ey, s = l2 > 0 ? ((u - ax) * ex + (v - ay) * ey) / l2 : 0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(u - ax - s * ex, v - ay - s * ey));
  }
  return best;
}

}  // namespace

LimitCycleReport detect_cycles(const FlowContext& ctx, const std::vector<DiscPoint>& seeds, const FlowOptions& opt) {
  LimitCycleReport rep;
  rep.seeds = static_cast<int>(seeds.size());
  // tails of the orbits of accepted cycles; centres and radii depend on the seed, locations do not
  std::vector<DiscPath> found;
  for (const DiscPoint& sd : seeds) {
    for (Direction dir : {Direction::forward, Direction::backward}) {
      Orbit o = integrate(ctx, disc_to_sphere(sd), dir, opt);
      if (o.termination.kind != Termination::t_max && o.termination.kind != Termination::max_steps) continue;
      ++rep.recurrent;
      DiscPath path = disc_path(o);
      auto rec = recurrence(path);
      if (!rec) continue;
      auto lim = settled(*rec);
      if (!lim || *lim < 1e-3) continue;
      // isolation: a neighbour started on the crossing ray at 1.01 times the first crossing
      // radius must converge to the same cycle; inside a period annulus the gap stays put
      DiscPoint c = rec->centre;
      auto c1 = refined_crossings(ctx, o, dir, opt, c);
      if (c1.size() < 5) continue;
      double k = 1.01;
      if (std::hypot(c.u + k * c1[0], c.v) >= 1) k = 0.99;
      Orbit o2 = integrate(ctx, disc_to_sphere({c.u + k * c1[0], c.v}), dir, opt);
      if (o2.termination.kind != Termination::t_max && o2.termination.kind != Termination::max_steps) continue;
      // the neighbour starts on the ray, so its j-th crossing pairs with the (j+1)-th of o
      auto c2 = refined_crossings(ctx, o2, dir, opt, c);
      const size_t m = std::min(c1.size() - 1, c2.size());
      if (m < 4) continue;
      double gap0 = std::fabs(k - 1) * c1[0], gap1 = std::fabs(c1[m] - c2[m - 1]);
      if (gap1 < 1e-7 || gap1 < 0.1 * gap0) {
        const auto& q = path.pts.back();
        bool dup = false;
        for (auto& f : found) dup |= distance_to_path(f, q[0], q[1]) < 1e-3;
        if (!dup) {
          rep.cycles.push_back({sd, dir, c1[m]});
          DiscPath tail;
          tail.pts.assign(path.pts.begin() + path.pts.size() / 2, path.pts.end());
          found.push_back(std::move(tail));
        }
      } else {
        ++rep.non_isolated;
      }
    }
  }
  return rep;
}

LimitCycleReport limit_cycle_scan(const Params& p, int seeds, unsigned long seed) {
  FlowContext ctx = make_context(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<DiscPoint> pts;
  for (int i = 0; i < seeds; ++i) {
    double r = 0.97 * std::sqrt(U(rng)), a = 2 * kPi * U(rng);
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  FlowOptions opt;
  opt.t_max = 300;
  opt.max_steps = 100000;
  return detect_cycles(ctx, pts, opt);
}

}  // namespace brlab
